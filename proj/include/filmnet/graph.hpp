#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace filmnet {

/// One directed edge as written in a graph description.
struct EdgeSpec {
  std::string id;
  std::string tail;
  std::string head;
  double length = 1.0;
  double weight = 1.0;  // cross-section d_j

  bool operator==(const EdgeSpec&) const = default;
};

/// Unvalidated graph description. Boundary vertices are listed explicitly;
/// they are never inferred from vertex degree.
struct GraphSpec {
  std::vector<std::string> vertices;
  std::vector<EdgeSpec> edges;
  std::vector<std::string> boundary;

  bool operator==(const GraphSpec&) const = default;
};

struct Edge {
  std::size_t tail = 0;
  std::size_t head = 0;
  double length = 1.0;
  double weight = 1.0;
};

struct IncidenceSets {
  // j_plus[v]: edges whose head is v. j_minus[v]: edges whose tail is v.
  std::vector<std::vector<std::size_t>> j_plus;
  std::vector<std::vector<std::size_t>> j_minus;
};

/// Validated, immutable metric graph.
class MetricGraph {
 public:
  std::size_t vertex_count() const noexcept { return vertex_names_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const std::vector<std::string>& vertex_names() const noexcept { return vertex_names_; }
  const std::vector<std::string>& edge_ids() const noexcept { return edge_ids_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_.at(e); }

  bool is_boundary(std::size_t v) const { return boundary_.at(v); }
  std::vector<std::size_t> boundary_set() const;
  std::vector<std::size_t> interior_set() const;

  std::optional<std::size_t> find_vertex(const std::string& name) const;
  std::optional<std::size_t> find_edge(const std::string& id) const;

  std::size_t degree(std::size_t v) const;

  /// Σ_j d_j ℓ_j.
  double total_measure() const;

  /// The description this graph was built from (round-trips through build_graph).
  GraphSpec to_spec() const;

 private:
  friend MetricGraph build_graph(const GraphSpec& spec);

  std::vector<std::string> vertex_names_;
  std::vector<std::string> edge_ids_;
  std::vector<Edge> edges_;
  std::vector<bool> boundary_;
};

struct ValidationCheck {
  std::string name;
  bool passed = true;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  std::vector<std::string> warnings;

  bool passed() const;
  /// First failed check message, or empty.
  std::string first_failure() const;
};

/// Runs every structural check on a description without throwing.
ValidationReport validate(const GraphSpec& spec);

/// Throws GraphError with the first failed check when validation fails.
MetricGraph build_graph(const GraphSpec& spec);

IncidenceSets incidence(const MetricGraph& graph);

/// Built-in topologies: "star3", "cycle4", "paper-example-8".
/// Returns std::nullopt for unknown names.
std::optional<GraphSpec> builtin_graph(const std::string& name);
std::vector<std::string> builtin_graph_names();

/// Reverses the orientation of one edge in a description.
GraphSpec reverse_edge(GraphSpec spec, std::size_t edge);

}  // namespace filmnet
