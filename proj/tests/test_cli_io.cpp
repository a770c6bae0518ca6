#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "filmnet/config.hpp"
#include "filmnet/errors.hpp"
#include "filmnet/io.hpp"
#include "filmnet/profiles.hpp"
#include "filmnet/simulation.hpp"
#include "support.hpp"

using namespace filmnet;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(FILMNET_SCRATCH_DIR) / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Cli {
  int code;
  std::string out;
  std::string err;
};

Cli cli(const std::string& args) {
  const fs::path dir = fs::path(FILMNET_SCRATCH_DIR) / "cli_capture";
  fs::create_directories(dir);
  const std::string cmd = std::string(FILMNET_CLI) + " " + args + " > " + (dir / "out").string() + " 2> " +
                          (dir / "err").string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(dir / "out"), read_file(dir / "err")};
}

std::size_t count_data_rows(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::size_t rows = 0;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    ++rows;
  }
  return rows;
}

const char* kStar3 = R"(
graph: {builtin: star3}
grid: {cells: 16}
solver: {t_end: 0.05}
initial:
  default: {kind: droplet, center: 1.0, width: 0.3, height: 1.0, base: 0.05}
)";

}  // namespace

TEST_CASE("minimal star3 configuration") {
  const RunSpec spec = parse_config(kStar3);
  CHECK(spec.builtin == "star3");
  const MetricGraph g = build_graph(spec.graph);
  CHECK(g.edge_count() == 3);
  for (const auto& e : g.edges()) CHECK(e.length == 1.0);
  CHECK(g.boundary_set().size() == 3);
  CHECK(spec.warnings.empty());
  CHECK(spec.default_cells == 16);
  CHECK(spec.solver.t_end == 0.05);
  CHECK(spec.solver.n == 1.0);
}

TEST_CASE("cycle4 configuration carries the empty-boundary warning") {
  const RunSpec spec = parse_config("graph: {builtin: cycle4}\ninitial: {default: {kind: constant, value: 0.2}}\n");
  CHECK(build_graph(spec.graph).edge_count() == 4);
  REQUIRE(spec.warnings.size() == 1);
  CHECK(spec.warnings[0].rfind("empty boundary", 0) == 0);
}

TEST_CASE("configuration errors") {
  auto path_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.path() + " | " + e.what();
    }
    return std::string("no error");
  };
  SUBCASE("missing initial condition names the edge") {
    const auto msg = path_of("graph: {builtin: star3}\ninitial:\n  edges: {e1: {kind: constant, value: 0.1}, e3: {kind: constant, value: 0.1}}\n");
    CHECK(msg.find("initial.edges.e2") != std::string::npos);
    CHECK(msg.find("'e2'") != std::string::npos);
  }
  SUBCASE("unknown keys are rejected with a position") {
    const auto msg = path_of("graph: {builtin: star3}\nsolver:\n  n: 1\n  dt_maxx: 0.1\n");
    CHECK(msg.find("solver.dt_maxx") != std::string::npos);
    CHECK(msg.find("line 4") != std::string::npos);
  }
  SUBCASE("syntax errors report line and column") {
    const auto msg = path_of("graph: {builtin: star3\nsolver: [\n");
    CHECK(msg.find("line") != std::string::npos);
    CHECK(msg.find("column") != std::string::npos);
  }
  SUBCASE("bad boundary set") {
    const auto msg = path_of(
        "graph:\n  vertices: [a, b]\n  edges: [{id: e1, tail: a, head: b}]\n  boundary: [a, z]\n"
        "initial: {default: {kind: constant, value: 0.1}}\n");
    CHECK(msg.rfind("graph |", 0) == 0);
    CHECK(msg.find("'z'") != std::string::npos);
  }
  SUBCASE("unknown builtin") {
    CHECK(path_of("graph: {builtin: star4}\n").find("graph.builtin") != std::string::npos);
  }
  SUBCASE("semantic solver errors carry a field path") {
    CHECK(path_of(std::string(kStar3) + "\n").find("no error") != std::string::npos);
    CHECK(path_of("graph: {builtin: star3}\nsolver: {theta: 0.7}\ninitial: {default: {kind: constant, value: 1}}\n")
              .rfind("solver.theta", 0) == 0);
    CHECK(path_of("graph: {builtin: star3}\nsolver: {n: 0.5}\ninitial: {default: {kind: constant, value: 1}}\n")
              .rfind("solver.n", 0) == 0);
    CHECK(path_of("graph: {builtin: star3}\nsolver: {average: median}\ninitial: {default: {kind: constant, value: 1}}\n")
              .rfind("solver.average", 0) == 0);
  }
  SUBCASE("too few cells") {
    CHECK(path_of("graph: {builtin: star3}\ngrid: {cells: 2}\ninitial: {default: {kind: constant, value: 1}}\n")
              .rfind("grid.cells", 0) == 0);
  }
  SUBCASE("profile validation") {
    CHECK(path_of("graph: {builtin: star3}\ninitial: {default: {kind: droplet, width: -1}}\n")
              .rfind("initial.default.width", 0) == 0);
    CHECK(path_of("graph: {builtin: star3}\ninitial: {default: {kind: blob}}\n").rfind("initial.default.kind", 0) == 0);
  }
}

TEST_CASE("canonical serialization round-trips") {
  const std::string text = R"(
graph:
  vertices: [a, b, c]
  edges:
    - {id: left, tail: a, head: b, length: 0.7, weight: 2.0}
    - {id: right, tail: b, head: c, length: 1.3}
  boundary: [a, c]
grid: {cells: 20, edges: {right: 31}}
solver: {n: 1.5, eps: 1.0e-4, average: harmonic, t_end: 0.1, stop_at_steady: false}
initial:
  default: {kind: linear, a: 0.1, b: 0.3}
  edges:
    right: {kind: random, base: 0.3, amplitude: 0.1, seed: 99}
output: {directory: somewhere, snapshot_every_steps: 5}
seed: 12
)";
  const RunSpec spec = parse_config(text);
  const std::string canonical = serialize_config(spec);
  const RunSpec again = parse_config(canonical);
  CHECK(again == spec);
  CHECK(serialize_config(again) == canonical);
  CHECK(config_hash(again) == config_hash(spec));
  CHECK(config_hash(spec).size() == 16);
  RunSpec changed = spec;
  changed.solver.eps = 2e-4;
  CHECK(config_hash(changed) != config_hash(spec));
  CHECK(spec.cells_for(build_graph(spec.graph)) == std::vector<std::size_t>{20, 31});
}

TEST_CASE("profiles") {
  const GraphGrid grid = testing::builtin("star3", 8);
  SUBCASE("constant") {
    for (double v : initial_profile(profile::Constant{0.2}, grid, 0)) CHECK(v == 0.2);
  }
  SUBCASE("droplet at the inner node end is symmetric across arms") {
    RunSpec spec = parse_config(kStar3);
    const GraphGrid g16(build_graph(spec.graph), spec.cells_for(build_graph(spec.graph)));
    const Eigen::VectorXd u = build_initial_state(spec, g16);
    for (std::size_t k = 0; k <= 16; ++k) {
      CHECK(u[static_cast<Eigen::Index>(g16.node(0, k))] == u[static_cast<Eigen::Index>(g16.node(1, k))]);
      CHECK(u[static_cast<Eigen::Index>(g16.node(0, k))] == u[static_cast<Eigen::Index>(g16.node(2, k))]);
    }
    CHECK(u[static_cast<Eigen::Index>(g16.vertex_node(*g16.graph().find_vertex("a0")))] == doctest::Approx(1.05));
    CHECK(u[static_cast<Eigen::Index>(g16.node(0, 0))] == doctest::Approx(0.05));
  }
  SUBCASE("linear runs from a to b") {
    const auto v = initial_profile(profile::Linear{0.1, 0.5}, grid, 1);
    CHECK(v.front() == doctest::Approx(0.1));
    CHECK(v.back() == doctest::Approx(0.5));
    CHECK(v[4] == doctest::Approx(0.3));
  }
  SUBCASE("random profiles are reproducible and pinned at the ends") {
    const profile::Random r{0.3, 0.2, std::nullopt};
    const auto a = initial_profile(r, grid, 0, 5);
    CHECK(a == initial_profile(r, grid, 0, 5));
    CHECK(a != initial_profile(r, grid, 1, 5));
    CHECK(a != initial_profile(r, grid, 0, 6));
    CHECK(a.front() == doctest::Approx(0.3));
    CHECK(a.back() == doctest::Approx(0.3));
    for (double v : a) {
      CHECK(v >= 0.3);
      CHECK(v <= 0.5);
    }
    const profile::Random fixed{0.3, 0.2, 7};
    CHECK(initial_profile(fixed, grid, 0, 5) == initial_profile(fixed, grid, 0, 6));
  }
  SUBCASE("negative samples are rejected") {
    CHECK_THROWS_AS(initial_profile(profile::Linear{-0.1, 0.2}, grid, 0), ConfigError);
  }
  SUBCASE("vertex continuity is enforced") {
    const RunSpec spec = parse_config(R"(
graph:
  vertices: [a, b, c]
  edges: [{id: e1, tail: a, head: b}, {id: e2, tail: b, head: c}]
  boundary: [a, c]
initial:
  edges: {e1: {kind: constant, value: 0.2}, e2: {kind: constant, value: 0.3}}
)");
    const MetricGraph g = build_graph(spec.graph);
    const GraphGrid path(g, spec.cells_for(g));
    CHECK_THROWS_WITH_AS(build_initial_state(spec, path), doctest::Contains("'b'"), ConfigError);
  }
}

TEST_CASE("snapshots") {
  const GraphGrid grid = testing::builtin("star3", 4);
  const FilmState c{Eigen::VectorXd::Constant(13, 0.25), 1.5, 12};
  std::ostringstream os;
  write_snapshot(os, c, grid, "abc");
  CHECK(count_data_rows(os.str()) == 15);
  CHECK(os.str().rfind("# t=1.5,step=12,config_hash=abc\nedge_id,s,x,u\n", 0) == 0);

  std::mt19937_64 rng(8);
  const GraphGrid fine = testing::builtin("paper-example-8", 7);
  const FilmState s{testing::random_vector(fine.size(), 0.0, 1.0, rng), 0.1 + 0.2, 3};
  std::ostringstream out;
  write_snapshot(out, s, fine, "deadbeef");
  std::istringstream in(out.str());
  const Snapshot back = read_snapshot(in, fine);
  CHECK(back.config_hash == "deadbeef");
  CHECK(back.state.t == s.t);
  CHECK(back.state.step_count == 3);
  CHECK((back.state.u.array() == s.u.array()).all());

  std::istringstream truncated("# t=0\nedge_id,s,x,u\ne1,0,0,1\n");
  CHECK_THROWS_AS(read_snapshot(truncated, grid), IoError);
  std::istringstream garbage("edge_id,s,x,u\ne9,0,0,1\n");
  CHECK_THROWS_AS(read_snapshot(garbage, grid), IoError);
}

TEST_CASE("diagnostics files") {
  DiagnosticsRecord r;
  r.t = 0.1;
  r.mass = 1.0 / 3.0;
  r.energy = 2e-300;
  r.entropy = std::numeric_limits<double>::infinity();
  r.min_u = 0.0;
  r.max_u = 1.25;
  r.vertex_residual_max = 3e-7;
  r.clamp_events = 4;
  r.moment = 0.7;
  std::ostringstream os;
  write_diagnostics_header(os, "0123456789abcdef", 1.5);
  write_diagnostics(os, r);
  write_diagnostics(os, r);
  std::istringstream is(os.str());
  const DiagnosticsTable t = read_diagnostics(is);
  CHECK(t.config_hash == "0123456789abcdef");
  REQUIRE(t.n.has_value());
  CHECK(*t.n == 1.5);
  REQUIRE(t.records.size() == 2);
  CHECK(t.records[0] == r);
  std::istringstream bad("t,mass,energy\n1,2\n");
  CHECK_THROWS_AS(read_diagnostics(bad), IoError);
  CHECK_THROWS_AS(read_diagnostics_file("/nonexistent/diagnostics.csv"), IoError);
}

TEST_CASE("a 100-step run writes 101 diagnostics rows") {
  RunSpec spec = parse_config(kStar3);
  spec.solver.t_end = 100.0;
  spec.solver.max_steps = 100;
  spec.solver.stop_at_steady = false;
  spec.output.snapshot_every_steps = 25;
  RunOptions opt;
  opt.directory = scratch("hundred");
  const RunArtifacts art = execute_run(spec, opt);
  CHECK(art.result.accepted_steps == 100);
  const std::string diag = read_file(opt.directory / "diagnostics.csv");
  CHECK(count_data_rows(diag) == 101);
  const auto table = read_diagnostics_file(opt.directory / "diagnostics.csv");
  CHECK(table.config_hash == config_hash(spec));
  CHECK(table.records == art.result.diagnostics);
  // initial, steps 25/50/75/100
  CHECK(art.snapshots.size() == 5);
  std::ifstream last(art.snapshots.back());
  const Snapshot snap = read_snapshot(last, make_problem(spec).grid);
  CHECK((snap.state.u.array() == art.result.final_state.u.array()).all());
  CHECK(snap.state.step_count == 100);
  CHECK(fs::exists(opt.directory / "run_metadata.yaml"));
  CHECK_FALSE(fs::exists(opt.directory / "INCOMPLETE"));
}

TEST_CASE("I/O failure leaves a partial-output marker") {
  RunSpec spec = parse_config(kStar3);
  RunOptions opt;
  opt.directory = scratch("blocked");
  fs::create_directories(opt.directory / "diagnostics.csv");
  CHECK_THROWS_AS(execute_run(spec, opt), IoError);
  CHECK(fs::exists(opt.directory / "INCOMPLETE"));
}

TEST_CASE("command line") {
  const fs::path dir = scratch("cli");
  const fs::path cfg = dir / "star3.yaml";
  write_file(cfg, kStar3);

  SUBCASE("run produces snapshots and diagnostics") {
    const Cli r = cli("run " + cfg.string() + " --out " + (dir / "out").string() + " --dump-operators");
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "out" / "diagnostics.csv"));
    CHECK(fs::exists(dir / "out" / "snapshot_000000.csv"));
    CHECK(fs::exists(dir / "out" / "operator_L.csv"));
    CHECK(fs::exists(dir / "out" / "operator_B0.csv"));
    const Cli d = cli("check-decay " + (dir / "out" / "diagnostics.csv").string() + " --n 1");
    CHECK(d.code == 0);
    CHECK(d.out.find("pass") != std::string::npos);
    const Cli mismatch = cli("check-decay " + (dir / "out" / "diagnostics.csv").string() + " --n 2");
    CHECK(mismatch.code == 2);
    CHECK(mismatch.err.find("error[config]") != std::string::npos);
  }
  SUBCASE("validate warns about the empty boundary") {
    const Cli r = cli("validate " + std::string(FILMNET_CONFIG_DIR) + "/cycle4.yaml");
    CHECK(r.code == 0);
    CHECK(r.err.find("empty boundary") != std::string::npos);
  }
  SUBCASE("eigen prints a comparison table") {
    const Cli r = cli("eigen " + std::string(FILMNET_CONFIG_DIR) + "/example8.yaml --modes 10");
    CHECK(r.code == 0);
    CHECK(r.out.find("class,mode,analytic,computed,relative_error") != std::string::npos);
    CHECK(r.out.find("pendant,1,") != std::string::npos);
  }
  SUBCASE("usage errors print the schema") {
    const Cli r = cli("frobnicate");
    CHECK(r.code == 2);
    CHECK(r.err.find("Run configuration (YAML)") != std::string::npos);
  }
  SUBCASE("configuration errors") {
    write_file(dir / "bad.yaml", "graph: {builtin: star3}\nsolver: {nn: 1}\n");
    const Cli r = cli("run " + (dir / "bad.yaml").string());
    CHECK(r.code == 2);
    CHECK(r.err.find("error[config]") != std::string::npos);
    CHECK(r.err.find("solver.nn") != std::string::npos);
  }
  SUBCASE("missing files are I/O errors") {
    const Cli r = cli("run " + (dir / "nope.yaml").string());
    CHECK(r.code == 4);
    CHECK(r.err.find("error[io]") != std::string::npos);
  }
  SUBCASE("numerical failures") {
    write_file(dir / "dry.yaml", R"(
graph: {builtin: star3}
grid: {cells: 32}
solver: {eps: 0.0, t_end: 0.01}
initial:
  default: {kind: droplet, center: 1.0, width: 0.3, height: 1.0, base: 0.0}
)");
    const Cli r = cli("run " + (dir / "dry.yaml").string() + " --out " + (dir / "dry").string());
    CHECK(r.code == 3);
    CHECK(r.err.find("error[numerical]") != std::string::npos);
    CHECK(fs::exists(dir / "dry" / "INCOMPLETE"));
  }
}
