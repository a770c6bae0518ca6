#include "filmnet/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "filmnet/errors.hpp"

namespace filmnet {

namespace {

std::string where(const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  if (mark.is_null()) return {};
  return " (line " + std::to_string(mark.line + 1) + ", column " + std::to_string(mark.column + 1) + ")";
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void require_map(const YAML::Node& node, const std::string& path) {
  if (!node.IsMap()) throw ConfigError("expected a mapping" + where(node), path);
}

void check_keys(const YAML::Node& node, const std::string& path, std::initializer_list<const char*> allowed) {
  require_map(node, path);
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!known) throw ConfigError("unknown key '" + key + "'" + where(kv.first), join(path, key));
  }
}

template <class T>
T read(const YAML::Node& node, const std::string& path) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("cannot convert value '" + (node.IsScalar() ? node.Scalar() : std::string("<non-scalar>")) +
                          "'" + where(node),
                      path);
  }
}

template <class T>
void read_optional(const YAML::Node& parent, const char* key, const std::string& path, T& out) {
  if (const YAML::Node node = parent[key]) out = read<T>(node, join(path, key));
}

std::size_t read_count(const YAML::Node& node, const std::string& path) {
  const auto value = read<long long>(node, path);
  if (value < 0) throw ConfigError("must be nonnegative" + where(node), path);
  return static_cast<std::size_t>(value);
}

double read_double(const YAML::Node& parent, const char* key, const std::string& path) {
  const YAML::Node node = parent[key];
  if (!node) throw ConfigError("missing required key" + where(parent), join(path, key));
  return read<double>(node, join(path, key));
}

GraphSpec parse_graph(const YAML::Node& node, const std::string& path, std::string& builtin) {
  check_keys(node, path, {"builtin", "vertices", "edges", "boundary"});
  if (const YAML::Node b = node["builtin"]) {
    builtin = read<std::string>(b, join(path, "builtin"));
    if (node["vertices"] || node["edges"] || node["boundary"])
      throw ConfigError("builtin graphs cannot be combined with explicit vertices/edges/boundary" + where(node), path);
    auto spec = builtin_graph(builtin);
    if (!spec) {
      std::string names;
      for (const auto& n : builtin_graph_names()) names += (names.empty() ? "" : ", ") + n;
      throw ConfigError("unknown builtin graph '" + builtin + "' (known: " + names + ")" + where(b),
                        join(path, "builtin"));
    }
    return *spec;
  }

  GraphSpec spec;
  const YAML::Node vertices = node["vertices"];
  if (!vertices || !vertices.IsSequence()) throw ConfigError("expected a vertex list" + where(node), join(path, "vertices"));
  for (std::size_t i = 0; i < vertices.size(); ++i)
    spec.vertices.push_back(read<std::string>(vertices[i], join(path, "vertices[" + std::to_string(i) + "]")));

  const YAML::Node edges = node["edges"];
  if (!edges || !edges.IsSequence()) throw ConfigError("expected an edge list" + where(node), join(path, "edges"));
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string epath = join(path, "edges[" + std::to_string(i) + "]");
    check_keys(edges[i], epath, {"id", "tail", "head", "length", "weight"});
    EdgeSpec e;
    e.id = edges[i]["id"] ? read<std::string>(edges[i]["id"], join(epath, "id")) : "e" + std::to_string(i + 1);
    if (!edges[i]["tail"] || !edges[i]["head"]) throw ConfigError("edge needs tail and head" + where(edges[i]), epath);
    e.tail = read<std::string>(edges[i]["tail"], join(epath, "tail"));
    e.head = read<std::string>(edges[i]["head"], join(epath, "head"));
    read_optional(edges[i], "length", epath, e.length);
    read_optional(edges[i], "weight", epath, e.weight);
    spec.edges.push_back(std::move(e));
  }

  if (const YAML::Node boundary = node["boundary"]) {
    if (!boundary.IsSequence()) throw ConfigError("expected a vertex list" + where(boundary), join(path, "boundary"));
    for (std::size_t i = 0; i < boundary.size(); ++i)
      spec.boundary.push_back(read<std::string>(boundary[i], join(path, "boundary[" + std::to_string(i) + "]")));
  }
  return spec;
}

InitialProfile parse_profile(const YAML::Node& node, const std::string& path) {
  require_map(node, path);
  if (!node["kind"]) throw ConfigError("profile needs a 'kind'" + where(node), path);
  const auto kind = read<std::string>(node["kind"], join(path, "kind"));
  if (kind == "constant") {
    check_keys(node, path, {"kind", "value"});
    profile::Constant p{read_double(node, "value", path)};
    if (!(p.value >= 0.0)) throw ConfigError("constant profile must be >= 0", join(path, "value"));
    return p;
  }
  if (kind == "droplet") {
    check_keys(node, path, {"kind", "center", "width", "height", "base"});
    profile::Droplet p;
    read_optional(node, "center", path, p.center);
    read_optional(node, "width", path, p.width);
    read_optional(node, "height", path, p.height);
    read_optional(node, "base", path, p.base);
    if (!(p.center >= 0.0 && p.center <= 1.0)) throw ConfigError("center must lie in [0, 1]", join(path, "center"));
    if (!(p.width > 0.0)) throw ConfigError("width must be > 0", join(path, "width"));
    if (!(p.height >= 0.0)) throw ConfigError("height must be >= 0", join(path, "height"));
    if (!(p.base >= 0.0)) throw ConfigError("base must be >= 0", join(path, "base"));
    return p;
  }
  if (kind == "linear") {
    check_keys(node, path, {"kind", "a", "b"});
    profile::Linear p{read_double(node, "a", path), read_double(node, "b", path)};
    if (!(p.a >= 0.0 && p.b >= 0.0)) throw ConfigError("linear profile endpoints must be >= 0", path);
    return p;
  }
  if (kind == "random") {
    check_keys(node, path, {"kind", "base", "amplitude", "seed"});
    profile::Random p;
    read_optional(node, "base", path, p.base);
    read_optional(node, "amplitude", path, p.amplitude);
    if (const YAML::Node s = node["seed"]) p.seed = read<std::uint64_t>(s, join(path, "seed"));
    if (!(p.base >= 0.0 && p.amplitude >= 0.0)) throw ConfigError("base and amplitude must be >= 0", path);
    return p;
  }
  throw ConfigError("unknown profile kind '" + kind + "' (constant|droplet|linear|random)" + where(node["kind"]),
                    join(path, "kind"));
}

void parse_solver(const YAML::Node& node, SolverConfig& cfg) {
  const std::string path = "solver";
  check_keys(node, path,
             {"n", "eps", "theta", "dt_init", "dt_min", "dt_max", "adapt_target", "linear_tol", "t_end",
              "steady_tol", "average", "negativity_slack", "change_floor", "entropy_base", "allow_out_of_range",
              "max_steps", "stop_at_steady"});
  read_optional(node, "n", path, cfg.n);
  read_optional(node, "eps", path, cfg.eps);
  read_optional(node, "theta", path, cfg.theta);
  read_optional(node, "dt_init", path, cfg.dt_init);
  read_optional(node, "dt_min", path, cfg.dt_min);
  read_optional(node, "dt_max", path, cfg.dt_max);
  read_optional(node, "adapt_target", path, cfg.adapt_target);
  read_optional(node, "linear_tol", path, cfg.linear_tol);
  read_optional(node, "t_end", path, cfg.t_end);
  read_optional(node, "steady_tol", path, cfg.steady_tol);
  if (const YAML::Node a = node["average"]) {
    try {
      cfg.average = face_average_from_string(read<std::string>(a, "solver.average"));
    } catch (const ConfigError& e) {
      throw ConfigError(e.what() + where(a), "solver.average");
    }
  }
  read_optional(node, "negativity_slack", path, cfg.negativity_slack);
  read_optional(node, "change_floor", path, cfg.change_floor);
  read_optional(node, "entropy_base", path, cfg.entropy_base);
  read_optional(node, "allow_out_of_range", path, cfg.allow_out_of_range);
  if (const YAML::Node m = node["max_steps"]) cfg.max_steps = read_count(m, "solver.max_steps");
  read_optional(node, "stop_at_steady", path, cfg.stop_at_steady);
}

void emit_profile(YAML::Emitter& out, const InitialProfile& p) {
  out << YAML::Flow << YAML::BeginMap;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, profile::Constant>) {
          out << YAML::Key << "kind" << YAML::Value << "constant";
          out << YAML::Key << "value" << YAML::Value << v.value;
        } else if constexpr (std::is_same_v<T, profile::Droplet>) {
          out << YAML::Key << "kind" << YAML::Value << "droplet";
          out << YAML::Key << "center" << YAML::Value << v.center;
          out << YAML::Key << "width" << YAML::Value << v.width;
          out << YAML::Key << "height" << YAML::Value << v.height;
          out << YAML::Key << "base" << YAML::Value << v.base;
        } else if constexpr (std::is_same_v<T, profile::Linear>) {
          out << YAML::Key << "kind" << YAML::Value << "linear";
          out << YAML::Key << "a" << YAML::Value << v.a;
          out << YAML::Key << "b" << YAML::Value << v.b;
        } else {
          out << YAML::Key << "kind" << YAML::Value << "random";
          out << YAML::Key << "base" << YAML::Value << v.base;
          out << YAML::Key << "amplitude" << YAML::Value << v.amplitude;
          if (v.seed) out << YAML::Key << "seed" << YAML::Value << *v.seed;
        }
      },
      p);
  out << YAML::EndMap;
}

}  // namespace

std::vector<std::size_t> RunSpec::cells_for(const MetricGraph& graph) const {
  std::vector<std::size_t> cells(graph.edge_count(), default_cells);
  for (const auto& [id, n] : edge_cells) cells.at(*graph.find_edge(id)) = n;
  return cells;
}

const InitialProfile& RunSpec::profile_for(const std::string& edge_id) const {
  if (auto it = edge_profiles.find(edge_id); it != edge_profiles.end()) return it->second;
  if (default_profile) return *default_profile;
  throw ConfigError("missing initial condition for edge '" + edge_id + "'", "initial.edges." + edge_id);
}

RunSpec parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("parse error at line " + std::to_string(e.mark.line + 1) + ", column " +
                      std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  if (!root || root.IsNull()) throw ConfigError("empty configuration");
  check_keys(root, "", {"graph", "grid", "solver", "initial", "output", "seed"});

  RunSpec spec;
  if (!root["graph"]) throw ConfigError("missing graph section", "graph");
  spec.graph = parse_graph(root["graph"], "graph", spec.builtin);
  const ValidationReport report = validate(spec.graph);
  if (!report.passed()) throw ConfigError(report.first_failure() + where(root["graph"]), "graph");
  spec.warnings = report.warnings;
  const MetricGraph graph = build_graph(spec.graph);

  if (const YAML::Node grid = root["grid"]) {
    check_keys(grid, "grid", {"cells", "edges"});
    if (grid["cells"]) spec.default_cells = read_count(grid["cells"], "grid.cells");
    if (const YAML::Node edges = grid["edges"]) {
      require_map(edges, "grid.edges");
      for (const auto& kv : edges) {
        const auto id = kv.first.as<std::string>();
        if (!graph.find_edge(id)) throw ConfigError("unknown edge '" + id + "'" + where(kv.first), "grid.edges." + id);
        spec.edge_cells[id] = read_count(kv.second, "grid.edges." + id);
      }
    }
  }
  if (spec.default_cells < 3) throw ConfigError("at least 3 cells per edge required", "grid.cells");
  for (const auto& [id, n] : spec.edge_cells)
    if (n < 3) throw ConfigError("at least 3 cells per edge required", "grid.edges." + id);

  if (const YAML::Node solver = root["solver"]) parse_solver(solver, spec.solver);
  spec.solver.validate();

  if (const YAML::Node initial = root["initial"]) {
    check_keys(initial, "initial", {"default", "edges"});
    if (initial["default"]) spec.default_profile = parse_profile(initial["default"], "initial.default");
    if (const YAML::Node edges = initial["edges"]) {
      require_map(edges, "initial.edges");
      for (const auto& kv : edges) {
        const auto id = kv.first.as<std::string>();
        if (!graph.find_edge(id))
          throw ConfigError("unknown edge '" + id + "'" + where(kv.first), "initial.edges." + id);
        spec.edge_profiles.emplace(id, parse_profile(kv.second, "initial.edges." + id));
      }
    }
  }
  for (const auto& id : graph.edge_ids()) (void)spec.profile_for(id);

  if (const YAML::Node output = root["output"]) {
    check_keys(output, "output", {"directory", "snapshot_every_steps", "snapshot_every_time"});
    read_optional(output, "directory", "output", spec.output.directory);
    if (output["snapshot_every_steps"])
      spec.output.snapshot_every_steps = read_count(output["snapshot_every_steps"], "output.snapshot_every_steps");
    read_optional(output, "snapshot_every_time", "output", spec.output.snapshot_every_time);
    if (!(spec.output.snapshot_every_time >= 0.0))
      throw ConfigError("must be >= 0", "output.snapshot_every_time");
  }
  if (root["seed"]) spec.seed = read<std::uint64_t>(root["seed"], "seed");
  return spec;
}

RunSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const RunSpec& spec) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;

  out << YAML::Key << "graph" << YAML::Value << YAML::BeginMap;
  if (!spec.builtin.empty()) {
    out << YAML::Key << "builtin" << YAML::Value << spec.builtin;
  } else {
    out << YAML::Key << "vertices" << YAML::Value << YAML::Flow << spec.graph.vertices;
    out << YAML::Key << "edges" << YAML::Value << YAML::BeginSeq;
    for (const auto& e : spec.graph.edges) {
      out << YAML::Flow << YAML::BeginMap;
      out << YAML::Key << "id" << YAML::Value << e.id;
      out << YAML::Key << "tail" << YAML::Value << e.tail;
      out << YAML::Key << "head" << YAML::Value << e.head;
      out << YAML::Key << "length" << YAML::Value << e.length;
      out << YAML::Key << "weight" << YAML::Value << e.weight;
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "boundary" << YAML::Value << YAML::Flow << spec.graph.boundary;
  }
  out << YAML::EndMap;

  out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "cells" << YAML::Value << spec.default_cells;
  if (!spec.edge_cells.empty()) {
    out << YAML::Key << "edges" << YAML::Value << YAML::BeginMap;
    for (const auto& [id, n] : spec.edge_cells) out << YAML::Key << id << YAML::Value << n;
    out << YAML::EndMap;
  }
  out << YAML::EndMap;

  const SolverConfig& s = spec.solver;
  out << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n" << YAML::Value << s.n;
  out << YAML::Key << "eps" << YAML::Value << s.eps;
  out << YAML::Key << "theta" << YAML::Value << s.theta;
  out << YAML::Key << "dt_init" << YAML::Value << s.dt_init;
  out << YAML::Key << "dt_min" << YAML::Value << s.dt_min;
  out << YAML::Key << "dt_max" << YAML::Value << s.dt_max;
  out << YAML::Key << "adapt_target" << YAML::Value << s.adapt_target;
  out << YAML::Key << "linear_tol" << YAML::Value << s.linear_tol;
  out << YAML::Key << "t_end" << YAML::Value << s.t_end;
  out << YAML::Key << "steady_tol" << YAML::Value << s.steady_tol;
  out << YAML::Key << "average" << YAML::Value << to_string(s.average);
  out << YAML::Key << "negativity_slack" << YAML::Value << s.negativity_slack;
  out << YAML::Key << "change_floor" << YAML::Value << s.change_floor;
  out << YAML::Key << "entropy_base" << YAML::Value << s.entropy_base;
  out << YAML::Key << "allow_out_of_range" << YAML::Value << s.allow_out_of_range;
  out << YAML::Key << "max_steps" << YAML::Value << s.max_steps;
  out << YAML::Key << "stop_at_steady" << YAML::Value << s.stop_at_steady;
  out << YAML::EndMap;

  out << YAML::Key << "initial" << YAML::Value << YAML::BeginMap;
  if (spec.default_profile) {
    out << YAML::Key << "default" << YAML::Value;
    emit_profile(out, *spec.default_profile);
  }
  if (!spec.edge_profiles.empty()) {
    out << YAML::Key << "edges" << YAML::Value << YAML::BeginMap;
    for (const auto& [id, p] : spec.edge_profiles) {
      out << YAML::Key << id << YAML::Value;
      emit_profile(out, p);
    }
    out << YAML::EndMap;
  }
  out << YAML::EndMap;

  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "directory" << YAML::Value << spec.output.directory;
  out << YAML::Key << "snapshot_every_steps" << YAML::Value << spec.output.snapshot_every_steps;
  out << YAML::Key << "snapshot_every_time" << YAML::Value << spec.output.snapshot_every_time;
  out << YAML::EndMap;

  out << YAML::Key << "seed" << YAML::Value << spec.seed;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::string config_hash(const RunSpec& spec) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_config(spec)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_schema_help() {
  return R"(Run configuration (YAML):

graph:                       # either a builtin topology ...
  builtin: star3             #   star3 | cycle4 | paper-example-8
  # ... or an explicit directed graph
  vertices: [a0, a1]
  edges:
    - {id: e1, tail: a1, head: a0, length: 1.0, weight: 1.0}
  boundary: [a1]             # explicit no-flux vertices (may be empty)
grid:
  cells: 64                  # cells per edge (>= 3)
  edges: {e1: 128}           # optional per-edge override
solver:
  n: 1                       # mobility exponent (>= 1 unless allow_out_of_range)
  eps: 1.0e-6                # regularization, f(u) = |u|^n + eps
  theta: 0.25                # initial lift eps^theta, theta in (0, 0.5)
  dt_init: 1.0e-7
  dt_min: 1.0e-14
  dt_max: 0.1
  adapt_target: 1.0e-3       # target relative change per step
  linear_tol: 1.0e-12        # <= 1e-10
  t_end: 10
  steady_tol: 1.0e-3
  average: arithmetic        # arithmetic | harmonic | geometric
  negativity_slack: 1.0e-12
  change_floor: 1.0e-12
  entropy_base: 1.0
  allow_out_of_range: false
  max_steps: 1000000
  stop_at_steady: true
initial:
  default: {kind: droplet, center: 1.0, width: 0.3, height: 1.0, base: 0.05}
  edges:                     # per-edge overrides; every edge needs a profile
    e1: {kind: constant, value: 0.2}
    # {kind: linear, a: 0.1, b: 0.3}
    # {kind: random, base: 0.2, amplitude: 0.05, seed: 7}
output:
  directory: output
  snapshot_every_steps: 0    # 0 disables
  snapshot_every_time: 0.0   # 0 disables
seed: 0
)";
}

}  // namespace filmnet
