#include "filmnet/graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "filmnet/errors.hpp"

namespace filmnet {

std::vector<std::size_t> MetricGraph::boundary_set() const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < boundary_.size(); ++v)
    if (boundary_[v]) out.push_back(v);
  return out;
}

std::vector<std::size_t> MetricGraph::interior_set() const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < boundary_.size(); ++v)
    if (!boundary_[v]) out.push_back(v);
  return out;
}

std::optional<std::size_t> MetricGraph::find_vertex(const std::string& name) const {
  auto it = std::find(vertex_names_.begin(), vertex_names_.end(), name);
  if (it == vertex_names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - vertex_names_.begin());
}

std::optional<std::size_t> MetricGraph::find_edge(const std::string& id) const {
  auto it = std::find(edge_ids_.begin(), edge_ids_.end(), id);
  if (it == edge_ids_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - edge_ids_.begin());
}

std::size_t MetricGraph::degree(std::size_t v) const {
  std::size_t d = 0;
  for (const auto& e : edges_) d += (e.tail == v) + (e.head == v);
  return d;
}

double MetricGraph::total_measure() const {
  return std::accumulate(edges_.begin(), edges_.end(), 0.0,
                         [](double acc, const Edge& e) { return acc + e.weight * e.length; });
}

GraphSpec MetricGraph::to_spec() const {
  GraphSpec spec;
  spec.vertices = vertex_names_;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    spec.edges.push_back({edge_ids_[e], vertex_names_[edges_[e].tail],
                          vertex_names_[edges_[e].head], edges_[e].length, edges_[e].weight});
  }
  for (std::size_t v : boundary_set()) spec.boundary.push_back(vertex_names_[v]);
  return spec;
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::string ValidationReport::first_failure() const {
  for (const auto& c : checks)
    if (!c.passed) return c.name + ": " + c.message;
  return {};
}

namespace {

void fail(ValidationCheck& check, const std::string& msg) {
  if (check.passed) {
    check.passed = false;
    check.message = msg;
  } else {
    check.message += "; " + msg;
  }
}

}  // namespace

ValidationReport validate(const GraphSpec& spec) {
  ValidationCheck vertices{"vertices", true, {}};
  ValidationCheck endpoints{"endpoints", true, {}};
  ValidationCheck lengths{"positive-lengths", true, {}};
  ValidationCheck weights{"positive-weights", true, {}};
  ValidationCheck simple{"simplicity", true, {}};
  ValidationCheck partition{"boundary-partition", true, {}};
  ValidationCheck connected{"connectivity", true, {}};

  std::map<std::string, std::size_t> index;
  for (const auto& name : spec.vertices) {
    if (name.empty()) fail(vertices, "empty vertex name");
    if (!index.emplace(name, index.size()).second) fail(vertices, "duplicate vertex '" + name + "'");
  }
  if (spec.vertices.empty()) fail(vertices, "graph has no vertices");
  if (spec.edges.empty()) fail(endpoints, "graph has no edges");

  std::set<std::string> edge_ids;
  std::set<std::pair<std::string, std::string>> ordered_pairs;
  for (const auto& e : spec.edges) {
    const std::string label = "edge '" + e.id + "'";
    if (e.id.empty()) fail(endpoints, "edge with empty id");
    if (!edge_ids.insert(e.id).second) fail(simple, "duplicate edge id '" + e.id + "'");
    if (!index.count(e.tail)) fail(endpoints, label + " tail '" + e.tail + "' is not a declared vertex");
    if (!index.count(e.head)) fail(endpoints, label + " head '" + e.head + "' is not a declared vertex");
    if (!(e.length > 0.0)) {
      std::ostringstream os;
      os << label << " has nonpositive length " << e.length;
      fail(lengths, os.str());
    }
    if (!(e.weight > 0.0)) {
      std::ostringstream os;
      os << label << " has nonpositive weight " << e.weight;
      fail(weights, os.str());
    }
    if (e.tail == e.head) fail(simple, label + " is a self-loop");
    if (!ordered_pairs.emplace(e.tail, e.head).second)
      fail(simple, label + " duplicates an existing edge " + e.tail + "->" + e.head);
  }

  std::set<std::string> boundary;
  for (const auto& b : spec.boundary) {
    if (!index.count(b)) fail(partition, "boundary vertex '" + b + "' is not a declared vertex");
    if (!boundary.insert(b).second) fail(partition, "boundary vertex '" + b + "' listed twice");
  }

  // Union-find over declared vertices.
  std::vector<std::size_t> parent(index.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::size_t> degree(index.size(), 0);
  for (const auto& e : spec.edges) {
    auto t = index.find(e.tail);
    auto h = index.find(e.head);
    if (t == index.end() || h == index.end()) continue;
    ++degree[t->second];
    ++degree[h->second];
    parent[find(t->second)] = find(h->second);
  }
  if (!index.empty()) {
    std::set<std::size_t> roots;
    for (std::size_t v = 0; v < index.size(); ++v) roots.insert(find(v));
    if (roots.size() > 1) {
      std::ostringstream os;
      os << "graph has " << roots.size() << " connected components";
      fail(connected, os.str());
    }
  }

  ValidationReport report;
  report.checks = {vertices, endpoints, lengths, weights, simple, partition, connected};
  if (spec.boundary.empty())
    report.warnings.push_back(
        "empty boundary: closed network without no-flux vertices; the nonnegativity and existence "
        "theory assumes a nonempty boundary");
  for (const auto& [name, v] : index) {
    if (degree[v] == 1 && !boundary.count(name))
      report.warnings.push_back("vertex '" + name + "' has degree 1 but is interior");
  }
  return report;
}

MetricGraph build_graph(const GraphSpec& spec) {
  const ValidationReport report = validate(spec);
  if (!report.passed()) throw GraphError(report.first_failure());

  MetricGraph g;
  g.vertex_names_ = spec.vertices;
  g.boundary_.assign(spec.vertices.size(), false);
  std::map<std::string, std::size_t> index;
  for (std::size_t v = 0; v < spec.vertices.size(); ++v) index[spec.vertices[v]] = v;
  for (const auto& e : spec.edges) {
    g.edge_ids_.push_back(e.id);
    g.edges_.push_back({index.at(e.tail), index.at(e.head), e.length, e.weight});
  }
  for (const auto& b : spec.boundary) g.boundary_[index.at(b)] = true;
  return g;
}

IncidenceSets incidence(const MetricGraph& graph) {
  IncidenceSets sets;
  sets.j_plus.resize(graph.vertex_count());
  sets.j_minus.resize(graph.vertex_count());
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    sets.j_plus[graph.edge(e).head].push_back(e);
    sets.j_minus[graph.edge(e).tail].push_back(e);
  }
  return sets;
}

std::optional<GraphSpec> builtin_graph(const std::string& name) {
  GraphSpec spec;
  if (name == "star3") {
    spec.vertices = {"a0", "a1", "a2", "a3"};
    spec.edges = {{"e1", "a1", "a0"}, {"e2", "a2", "a0"}, {"e3", "a3", "a0"}};
    spec.boundary = {"a1", "a2", "a3"};
    return spec;
  }
  if (name == "cycle4") {
    spec.vertices = {"a1", "a2", "a3", "a4"};
    spec.edges = {{"e1", "a1", "a2"}, {"e2", "a2", "a3"}, {"e3", "a3", "a4"}, {"e4", "a4", "a1"}};
    return spec;
  }
  if (name == "paper-example-8") {
    spec.vertices = {"a1", "a2", "a3", "a4", "a5", "a6", "a7", "a8"};
    spec.edges = {{"e1", "a1", "a5"}, {"e2", "a2", "a6"}, {"e3", "a3", "a7"},
                  {"e4", "a4", "a8"}, {"e5", "a5", "a6"}, {"e6", "a6", "a8"},
                  {"e7", "a7", "a8"}, {"e8", "a5", "a7"}};
    spec.boundary = {"a1", "a2", "a3", "a4"};
    return spec;
  }
  return std::nullopt;
}

std::vector<std::string> builtin_graph_names() { return {"star3", "cycle4", "paper-example-8"}; }

GraphSpec reverse_edge(GraphSpec spec, std::size_t edge) {
  auto& e = spec.edges.at(edge);
  std::swap(e.tail, e.head);
  return spec;
}

}  // namespace filmnet
