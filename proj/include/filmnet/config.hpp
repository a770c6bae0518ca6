#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "filmnet/graph.hpp"
#include "filmnet/timestepper.hpp"

namespace filmnet {

namespace profile {

struct Constant {
  double value = 0.0;
  bool operator==(const Constant&) const = default;
};

/// base + height · max(0, 1 - ((s - center)/width)²)²
struct Droplet {
  double center = 0.5;
  double width = 0.25;
  double height = 1.0;
  double base = 0.0;
  bool operator==(const Droplet&) const = default;
};

/// Straight line from `a` at s = 0 to `b` at s = 1.
struct Linear {
  double a = 0.0;
  double b = 0.0;
  bool operator==(const Linear&) const = default;
};

/// base + amplitude · Σ_{k=1..4} r_k sin²(πks) / 4 with r_k ~ U[0,1).
/// Equals `base` at both edge ends. Without a seed the run seed is used.
struct Random {
  double base = 0.0;
  double amplitude = 0.0;
  std::optional<std::uint64_t> seed;
  bool operator==(const Random&) const = default;
};

}  // namespace profile

using InitialProfile = std::variant<profile::Constant, profile::Droplet, profile::Linear, profile::Random>;

struct OutputSpec {
  std::string directory = "output";
  std::size_t snapshot_every_steps = 0;  // 0: off
  double snapshot_every_time = 0.0;      // 0: off

  bool operator==(const OutputSpec&) const = default;
};

struct RunSpec {
  std::string builtin;  // empty for an explicit graph
  GraphSpec graph;
  std::size_t default_cells = 64;
  std::map<std::string, std::size_t> edge_cells;
  SolverConfig solver;
  std::optional<InitialProfile> default_profile;
  std::map<std::string, InitialProfile> edge_profiles;
  OutputSpec output;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;

  std::vector<std::size_t> cells_for(const MetricGraph& graph) const;
  const InitialProfile& profile_for(const std::string& edge_id) const;

  bool operator==(const RunSpec&) const = default;
};

/// Parses and validates a YAML run configuration. Unknown keys are errors.
/// Throws ConfigError with "line:column" for syntax errors and a field path
/// for semantic ones.
RunSpec parse_config(const std::string& text);
RunSpec load_config(const std::string& path);

/// Canonical YAML text; parse_config(serialize_config(s)) == s.
std::string serialize_config(const RunSpec& spec);

/// 64-bit FNV-1a of the canonical serialization, as 16 hex digits.
std::string config_hash(const RunSpec& spec);

/// Documented schema, printed by the CLI on usage errors.
std::string config_schema_help();

}  // namespace filmnet
