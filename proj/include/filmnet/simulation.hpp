#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "filmnet/config.hpp"
#include "filmnet/grid.hpp"
#include "filmnet/timestepper.hpp"

namespace filmnet {

struct RunOptions {
  /// Overrides spec.output.directory when non-empty.
  std::filesystem::path directory;
  /// Also write L and B(u0) as triplet files.
  bool dump_operators = false;
};

struct RunArtifacts {
  RunResult result;
  std::filesystem::path directory;
  std::vector<std::filesystem::path> snapshots;
  std::string config_hash;
};

/// Graph, grid and lifted initial state for a run configuration.
struct Problem {
  GraphGrid grid;
  FilmState initial;
};

Problem make_problem(const RunSpec& spec);

/// Runs a configuration end to end and persists the outputs:
///   run_metadata.yaml   canonical configuration and hash
///   diagnostics.csv     initial record plus one row per accepted step
///   snapshot_NNNNNN.csv initial, cadence and final states
/// I/O failures leave an INCOMPLETE marker in the directory and throw IoError.
RunArtifacts execute_run(const RunSpec& spec, const RunOptions& options = {});

}  // namespace filmnet
