// filmnet: thin-film coating flow on metric graphs.
//
//   filmnet run <config> [--out DIR] [--dump-operators]
//   filmnet eigen <config> --modes K
//   filmnet check-decay <diagnostics.csv> --n N [--slack S]
//   filmnet validate <config>
//
// Exit codes: 0 success, 2 configuration/usage error, 3 numerical failure,
// 4 I/O error.

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "filmnet/config.hpp"
#include "filmnet/diagnostics.hpp"
#include "filmnet/errors.hpp"
#include "filmnet/graph.hpp"
#include "filmnet/io.hpp"
#include "filmnet/simulation.hpp"
#include "filmnet/spectral.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

int report_error(const char* category, const std::string& message, int code) {
  std::cerr << "error[" << category << "]: " << message << "\n";
  return code;
}

void print_warnings(const filmnet::RunSpec& spec) {
  for (const auto& w : spec.warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_run(const std::string& config, const std::string& out, bool dump_operators) {
  const filmnet::RunSpec spec = filmnet::load_config(config);
  print_warnings(spec);
  filmnet::RunOptions options;
  options.directory = out;
  options.dump_operators = dump_operators;
  const auto artifacts = filmnet::execute_run(spec, options);
  const auto& r = artifacts.result;
  const auto& first = r.diagnostics.front();
  const auto& last = r.diagnostics.back();
  std::cout << std::setprecision(10);
  std::cout << "output:          " << artifacts.directory.string() << "\n"
            << "config hash:     " << artifacts.config_hash << "\n"
            << "final time:      " << r.final_state.t << "\n"
            << "accepted steps:  " << r.accepted_steps << " (rejected " << r.rejected_steps << ")\n"
            << "steady value K:  " << r.steady_value << (r.reached_steady ? " (reached)" : " (not reached)") << "\n"
            << "mass drift:      " << std::abs(last.mass - first.mass) / std::abs(first.mass) << "\n"
            << "energy:          " << first.energy << " -> " << last.energy << "\n"
            << "entropy:         " << first.entropy << " -> " << last.entropy << "\n"
            << "clamp events:    " << r.clamp_events << "\n"
            << "snapshots:       " << artifacts.snapshots.size() << "\n";
  if (!r.energy_violations.empty())
    std::cerr << "warning: energy increased above slack at " << r.energy_violations.size() << " records\n";
  return 0;
}

int cmd_eigen(const std::string& config, std::size_t modes) {
  const filmnet::RunSpec spec = filmnet::load_config(config);
  print_warnings(spec);
  const filmnet::Problem problem = filmnet::make_problem(spec);
  const auto pairs = filmnet::graph_laplacian_eigen(problem.grid, modes);
  std::cout << std::setprecision(12);
  std::cout << "# computed eigenvalues (unknowns=" << problem.grid.size()
            << ", residual=" << filmnet::eigen_residual(problem.grid, pairs) << ")\n";
  std::cout << "index,lambda\n";
  for (std::size_t i = 0; i < pairs.size(); ++i) std::cout << i << "," << pairs[i].lambda << "\n";
  std::cout << "# comparison with closed-form edge-class eigenvalues\n";
  std::cout << "class,mode,analytic,computed,relative_error\n";
  for (const auto& c : filmnet::compare_with_example(pairs))
    std::cout << filmnet::to_string(c.cls) << "," << c.mode << "," << c.analytic << "," << c.nearest_computed << ","
              << c.relative_error << "\n";
  return 0;
}

int cmd_check_decay(const std::string& path, double n, double slack) {
  const auto table = filmnet::read_diagnostics_file(path);
  if (table.n && *table.n != n)
    throw filmnet::ConfigError("diagnostics were recorded with n = " + std::to_string(*table.n) +
                               ", requested n = " + std::to_string(n));
  const auto report = filmnet::decay_bound_check(table.records, n, nullptr, slack);
  std::cout << std::setprecision(10);
  std::cout << "status:             " << filmnet::to_string(report.status) << "\n"
            << "records:            " << table.records.size() << "\n"
            << "C (sup moment):     " << report.c_bound << "\n"
            << "max E/bound:        " << report.max_ratio << "\n"
            << "empirical exponent: " << report.empirical_exponent << "\n"
            << "detail:             " << report.message << "\n";
  if (report.status == filmnet::DecayStatus::pass) return 0;
  return report_error("decay-check", report.message, kExitNumerical);
}

int cmd_validate(const std::string& config) {
  const filmnet::RunSpec spec = filmnet::load_config(config);
  const auto report = filmnet::validate(spec.graph);
  for (const auto& c : report.checks)
    std::cout << (c.passed ? "pass " : "FAIL ") << c.name << (c.message.empty() ? "" : ": " + c.message) << "\n";
  print_warnings(spec);
  const filmnet::Problem problem = filmnet::make_problem(spec);
  std::cout << "unknowns: " << problem.grid.size() << "\n";
  return report.passed() ? 0 : kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thin-film coating flow on metric graphs"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  bool dump_operators = false;
  auto* run = app.add_subcommand("run", "Run a simulation and write snapshots and diagnostics");
  run->add_option("config", config, "Run configuration (YAML)")->required();
  run->add_option("--out", out, "Output directory (overrides output.directory)");
  run->add_flag("--dump-operators", dump_operators, "Write L and B(u0) as row,col,value triplets");

  std::size_t modes = 10;
  auto* eigen = app.add_subcommand("eigen", "Graph Laplacian eigenvalues against closed forms");
  eigen->add_option("config", config, "Run configuration (YAML)")->required();
  eigen->add_option("--modes", modes, "Number of eigenpairs")->check(CLI::PositiveNumber);

  std::string diagnostics;
  double n = 1.0;
  double slack = 0.05;
  auto* decay = app.add_subcommand("check-decay", "Check the energy decay bound on a diagnostics file");
  decay->add_option("diagnostics", diagnostics, "diagnostics.csv from a run")->required();
  decay->add_option("--n", n, "Mobility exponent")->required();
  decay->add_option("--slack", slack, "Relative slack on the bound");

  auto* validate = app.add_subcommand("validate", "Validate a configuration and its graph");
  validate->add_option("config", config, "Run configuration (YAML)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << "\n" << filmnet::config_schema_help();
    return kExitConfig;
  }

  try {
    if (*run) return cmd_run(config, out, dump_operators);
    if (*eigen) return cmd_eigen(config, modes);
    if (*decay) return cmd_check_decay(diagnostics, n, slack);
    if (*validate) return cmd_validate(config);
  } catch (const filmnet::ConfigError& e) {
    return report_error("config", e.what(), kExitConfig);
  } catch (const filmnet::GraphError& e) {
    return report_error("config", e.what(), kExitConfig);
  } catch (const filmnet::NumericalError& e) {
    return report_error("numerical", e.what(), kExitNumerical);
  } catch (const filmnet::IoError& e) {
    return report_error("io", e.what(), kExitIo);
  } catch (const std::exception& e) {
    return report_error("numerical", e.what(), kExitNumerical);
  }
  return kExitConfig;
}
