#include "filmnet/simulation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <system_error>

#include "filmnet/errors.hpp"
#include "filmnet/io.hpp"
#include "filmnet/operators.hpp"
#include "filmnet/profiles.hpp"

namespace filmnet {

namespace fs = std::filesystem;

Problem make_problem(const RunSpec& spec) {
  MetricGraph graph = build_graph(spec.graph);
  const auto cells = spec.cells_for(graph);
  GraphGrid grid(std::move(graph), cells);
  FilmState initial;
  initial.u = lift_initial(build_initial_state(spec, grid), spec.solver);
  return {std::move(grid), std::move(initial)};
}

namespace {

void mark_incomplete(const fs::path& dir, const std::string& why) {
  std::ofstream marker(dir / "INCOMPLETE");
  marker << why << "\n";
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::string snapshot_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%06zu.csv", index);
  return buf;
}

}  // namespace

RunArtifacts execute_run(const RunSpec& spec, const RunOptions& options) {
  RunArtifacts artifacts;
  artifacts.directory = options.directory.empty() ? fs::path(spec.output.directory) : options.directory;
  artifacts.config_hash = config_hash(spec);

  std::error_code ec;
  fs::create_directories(artifacts.directory, ec);
  if (ec) throw IoError("cannot create output directory '" + artifacts.directory.string() + "': " + ec.message());
  fs::remove(artifacts.directory / "INCOMPLETE", ec);

  Problem problem = make_problem(spec);
  const GraphGrid& grid = problem.grid;
  const auto& dir = artifacts.directory;

  try {
    {
      auto meta = open_output(dir / "run_metadata.yaml");
      meta << "# config_hash: " << artifacts.config_hash << "\n";
      meta << "# unknowns: " << grid.size() << "\n";
      meta << serialize_config(spec);
      if (!meta) throw IoError("failed writing run metadata");
    }
    if (options.dump_operators) {
      auto l = open_output(dir / "operator_L.csv");
      write_triplets(assemble_neg_laplacian(grid), l);
      auto b = open_output(dir / "operator_B0.csv");
      write_triplets(assemble_mobility_flux_div(grid, problem.initial.u, spec.solver.mobility()), b);
      if (!l || !b) throw IoError("failed writing operator dumps");
    }

    auto diagnostics = open_output(dir / "diagnostics.csv");
    write_diagnostics_header(diagnostics, artifacts.config_hash, spec.solver.n);

    auto write_snap = [&](const FilmState& s) {
      const fs::path path = dir / snapshot_name(artifacts.snapshots.size());
      auto out = open_output(path);
      write_snapshot(out, s, grid, artifacts.config_hash);
      artifacts.snapshots.push_back(path);
    };

    const double every_time = spec.output.snapshot_every_time;
    double next_time = every_time;
    std::size_t last_snapshot_step = 0;
    RunObserver observer;
    observer.on_record = [&](const FilmState& s, const DiagnosticsRecord& r) {
      write_diagnostics(diagnostics, r);
      if (!diagnostics) throw IoError("failed writing diagnostics row");
      bool due = s.step_count == 0;
      if (spec.output.snapshot_every_steps > 0 && s.step_count > 0 &&
          s.step_count % spec.output.snapshot_every_steps == 0)
        due = true;
      if (every_time > 0.0 && s.t >= next_time) {
        due = true;
        next_time = (std::floor(s.t / every_time) + 1.0) * every_time;
      }
      if (due) {
        write_snap(s);
        last_snapshot_step = s.step_count;
      }
    };

    artifacts.result = run(grid, problem.initial, spec.solver, observer);
    if (artifacts.result.final_state.step_count != last_snapshot_step) write_snap(artifacts.result.final_state);
    diagnostics.flush();
    if (!diagnostics) throw IoError("failed flushing diagnostics");
  } catch (const IoError& e) {
    mark_incomplete(dir, e.what());
    throw;
  } catch (const NumericalError& e) {
    mark_incomplete(dir, e.what());
    throw;
  }
  return artifacts;
}

}  // namespace filmnet
