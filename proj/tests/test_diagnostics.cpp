#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "filmnet/diagnostics.hpp"
#include "support.hpp"

using namespace filmnet;
using std::numbers::pi;

namespace {

Mobility mob(double n, double eps) { return {n, eps, FaceAverage::arithmetic, false}; }

// Composite Simpson on ∫_A^z (z - y) / f(y) dy, with f smooth on the path.
double simpson_entropy(double z, double n, double eps, double base) {
  const int m = 20000;
  const double h = (z - base) / m;
  double sum = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double y = base + i * h;
    const double g = (z - y) / (std::pow(std::abs(y), n) + eps);
    sum += (i == 0 || i == m ? 1.0 : (i % 2 ? 4.0 : 2.0)) * g;
  }
  return sum * h / 3.0;
}

std::vector<DiagnosticsRecord> series_from(const std::vector<double>& t, const std::vector<double>& e, double moment) {
  std::vector<DiagnosticsRecord> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    DiagnosticsRecord r;
    r.t = t[i];
    r.energy = e[i];
    r.moment = moment;
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("mass") {
  const GraphGrid star = testing::builtin("star3", 8);
  CHECK(mass(star, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(star.size()))) == doctest::Approx(3.0).epsilon(1e-15));
  const GraphGrid cycle = testing::builtin("cycle4", 8);
  const double k = 0.37;
  CHECK(mass(cycle, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(cycle.size()), k)) ==
        doctest::Approx(4.0 * k).epsilon(1e-15));
}

TEST_CASE("energy") {
  const GraphGrid cycle = testing::builtin("cycle4", 8);
  CHECK(energy(cycle, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(cycle.size()), 0.3)) == 0.0);
  const GraphGrid edge = testing::single_edge(16);
  CHECK(energy(edge, testing::sample(edge, [](std::size_t, double s) { return s; })) ==
        doctest::Approx(0.5).epsilon(1e-14));
  const GraphGrid fine = testing::single_edge(200);
  const double e = energy(fine, testing::sample(fine, [](std::size_t, double s) { return std::cos(pi * s); }));
  CHECK(std::abs(e - pi * pi / 4.0) / (pi * pi / 4.0) <= 1e-3);
}

TEST_CASE("energy carries the edge weight") {
  GraphSpec spec = testing::single_edge_spec(2.0);
  spec.edges[0].weight = 3.0;
  const GraphGrid grid(build_graph(spec), 10);
  // u = s/2 along an edge of length 2: ½ · 3 · ∫_0^2 (1/2)² dx = 3/4.
  CHECK(energy(grid, testing::sample(grid, [](std::size_t, double s) { return s; })) ==
        doctest::Approx(0.75).epsilon(1e-14));
  CHECK(mass(grid, Eigen::VectorXd::Ones(11)) == doctest::Approx(6.0));
}

TEST_CASE("entropy density closed forms") {
  SUBCASE("vanishes at the base point") {
    for (double n : {1.0, 1.5, 2.0})
      for (double eps : {0.0, 1e-3}) CHECK(entropy_density(0.7, mob(n, eps), 0.7) == 0.0);
  }
  SUBCASE("n = 1, eps = 0 at z = e") {
    CHECK(entropy_density(std::exp(1.0), mob(1.0, 0.0), 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(entropy_density_quadrature(std::exp(1.0), mob(1.0, 0.0), 1.0) == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("n = 2, eps = 0 at z = 2") {
    const double expected = 1.0 - std::log(2.0);
    CHECK(entropy_density(2.0, mob(2.0, 0.0), 1.0) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(entropy_density(2.0, mob(2.0, 0.0), 1.0) == doctest::Approx(0.30685).epsilon(1e-5));
    CHECK(entropy_density_quadrature(2.0, mob(2.0, 0.0), 1.0) == doctest::Approx(expected).epsilon(1e-10));
  }
  SUBCASE("closed forms agree with quadrature and an independent Simpson rule") {
    for (double n : {1.0, 2.0})
      for (double eps : {1e-6, 1e-2, 0.5})
        for (double z : {0.05, 0.3, 1.0, 2.5}) {
          const double closed = entropy_density(z, mob(n, eps), 1.0);
          CHECK(closed == doctest::Approx(entropy_density_quadrature(z, mob(n, eps), 1.0)).epsilon(1e-9));
          CHECK(closed == doctest::Approx(simpson_entropy(z, n, eps, 1.0)).epsilon(1e-7));
        }
  }
  SUBCASE("general exponent uses quadrature") {
    for (double z : {0.2, 0.9, 3.0})
      CHECK(entropy_density(z, mob(1.5, 1e-3), 1.0) == doctest::Approx(simpson_entropy(z, 1.5, 1e-3, 1.0)).epsilon(1e-7));
  }
  SUBCASE("convexity and nonnegativity") {
    const Mobility m = mob(1.0, 1e-4);
    for (double z = 0.0; z < 3.0; z += 0.1) CHECK(entropy_density(z, m, 1.0) >= 0.0);
  }
  SUBCASE("divergent case") {
    CHECK(std::isinf(entropy_density(0.0, mob(2.0, 0.0), 1.0)));
    CHECK(std::isfinite(entropy_density(0.0, mob(1.0, 0.0), 1.0)));
    CHECK(entropy_density(0.0, mob(1.0, 0.0), 1.0) == doctest::Approx(1.0));
  }
}

TEST_CASE("entropy functional") {
  const GraphGrid edge = testing::single_edge(10);
  const Eigen::VectorXd e = Eigen::VectorXd::Constant(11, std::exp(1.0));
  CHECK(entropy(edge, e, mob(1.0, 0.0), 1.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(entropy(edge, Eigen::VectorXd::Constant(11, 2.0), mob(2.0, 0.0), 1.0) ==
        doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-13));
  CHECK(entropy(edge, Eigen::VectorXd::Ones(11), mob(1.0, 1e-3), 1.0) == 0.0);
  Eigen::VectorXd dry = Eigen::VectorXd::Ones(11);
  dry[4] = 0.0;
  CHECK(std::isinf(entropy(edge, dry, mob(2.0, 0.0), 1.0)));
  CHECK(std::isfinite(entropy(edge, dry, mob(2.0, 1e-6), 1.0)));
}

TEST_CASE("steady value") {
  SUBCASE("star with 0.2 per edge") {
    const GraphGrid grid = testing::builtin("star3", 10);
    const Eigen::VectorXd u = testing::sample(grid, [](std::size_t, double s) { return 0.05 + 0.3 * s; });
    CHECK(steady_value(grid, u) == doctest::Approx(0.2).epsilon(1e-14));
  }
  SUBCASE("cycle with masses 0.4, 0.1, 0.4, 0.1") {
    const std::size_t n = 12;
    const GraphGrid grid = testing::builtin("cycle4", n);
    const double masses[4] = {0.4, 0.1, 0.4, 0.1};
    // Discrete integral of s(1 - s) on a uniform node grid.
    const double unit = (1.0 - 1.0 / static_cast<double>(n * n)) / 6.0;
    const Eigen::VectorXd u = testing::sample(grid, [&](std::size_t e, double s) { return masses[e] * s * (1.0 - s) / unit; });
    CHECK(steady_value(grid, u) == doctest::Approx(0.25).epsilon(1e-14));
  }
  SUBCASE("constant data") {
    const GraphGrid grid = testing::builtin("paper-example-8", 5);
    CHECK(steady_value(grid, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid.size()), 0.42)) ==
          doctest::Approx(0.42).epsilon(1e-14));
  }
}

TEST_CASE("decay moment") {
  GraphSpec spec = *builtin_graph("star3");
  spec.edges[0].length = 0.7;
  spec.edges[2].weight = 2.5;
  const GraphGrid grid(build_graph(spec), 9);
  std::mt19937_64 rng(4);
  const Eigen::VectorXd u = testing::random_vector(grid.size(), 0.0, 1.0, rng);
  CHECK(std::abs(decay_moment(grid, u, 2.0) - grid.graph().total_measure()) <= 1e-12);
  CHECK(decay_moment(grid, u, 1.0) == doctest::Approx(mass(grid, u)).epsilon(1e-14));
  CHECK(std::isnan(decay_moment(grid, u, 3.0)));
  CHECK(std::isnan(decay_moment(grid, u, 0.5)));
}

TEST_CASE("diagnostic records") {
  const GraphGrid grid = testing::single_edge(8);
  const Eigen::VectorXd u = testing::sample(grid, [](std::size_t, double s) { return 0.5 + 0.25 * s; });
  const auto r = make_record(grid, u, 1.5, mob(1.0, 1e-6), 1.0, 7);
  CHECK(r.t == 1.5);
  CHECK(r.mass == doctest::Approx(0.625));
  CHECK(r.energy == doctest::Approx(0.03125));
  CHECK(r.min_u == 0.5);
  CHECK(r.max_u == 0.75);
  CHECK(r.clamp_events == 7);
  CHECK(r.moment == doctest::Approx(0.625));
  CHECK(r.vertex_residual_max == 0.0);
  CHECK(r.entropy > 0.0);
}

TEST_CASE("decay bound check") {
  SUBCASE("constant data passes trivially") {
    const auto rep = decay_bound_check(series_from({0.0, 0.1, 0.2, 0.3}, {0.0, 0.0, 0.0, 0.0}, 1.0), 1.0);
    CHECK(rep.status == DecayStatus::pass);
    CHECK(rep.max_ratio == 0.0);
  }
  SUBCASE("too few records") {
    CHECK(decay_bound_check(series_from({0.0, 0.1}, {1.0, 0.5}, 1.0), 1.0).status == DecayStatus::insufficient_data);
  }
  SUBCASE("exponent outside the derivation") {
    CHECK(decay_bound_check(series_from({0.0, 0.1, 0.2}, {1.0, 0.5, 0.2}, 1.0), 3.0).status ==
          DecayStatus::out_of_scope);
    CHECK(decay_bound_check(series_from({0.0, 0.1, 0.2}, {1.0, 0.5, 0.2}, 1.0), 0.5).status ==
          DecayStatus::out_of_scope);
  }
  SUBCASE("C is the running supremum of the moment") {
    auto s = series_from({0.0, 0.1, 0.2}, {1.0, 0.5, 0.2}, 1.0);
    s[1].moment = 4.0;
    CHECK(decay_bound_check(s, 1.5).c_bound == 4.0);
  }
  SUBCASE("n = 2 uses the total measure") {
    const GraphGrid grid = testing::builtin("cycle4", 6);
    const auto rep = decay_bound_check(series_from({0.0, 0.1, 0.2}, {1.0, 0.5, 0.2}, 4.0), 2.0, &grid);
    CHECK(rep.c_bound == doctest::Approx(4.0).epsilon(1e-14));
  }
  SUBCASE("exact bound trajectory passes, inflated one fails") {
    const double e0 = 2.0;
    const double c = 3.0;
    std::vector<double> t;
    std::vector<double> e;
    std::vector<double> bad;
    for (int k = 0; k <= 50; ++k) {
      t.push_back(0.02 * k);
      e.push_back(e0 / (1.0 + 9.0 / c * e0 * t.back()));
      bad.push_back(e.back() * (k == 20 ? 1.1 : 1.0));
    }
    const auto ok = decay_bound_check(series_from(t, e, c), 1.0);
    CHECK(ok.status == DecayStatus::pass);
    CHECK(ok.max_ratio == doctest::Approx(1.0));
    const auto fail = decay_bound_check(series_from(t, bad, c), 1.0);
    CHECK(fail.status == DecayStatus::fail);
    REQUIRE(fail.first_violation.has_value());
    CHECK(*fail.first_violation == 20);
    CHECK(decay_bound_check(series_from(t, bad, c), 1.0, nullptr, 0.15).status == DecayStatus::pass);
  }
  SUBCASE("empirical exponent of a power law") {
    std::vector<double> t;
    std::vector<double> e;
    for (int k = 0; k <= 40; ++k) {
      t.push_back(k == 0 ? 0.0 : std::pow(10.0, -3.0 + 0.1 * k));
      e.push_back(k == 0 ? 1.0 : 1e-3 * std::pow(t.back(), -1.0));
    }
    CHECK(decay_bound_check(series_from(t, e, 1.0), 1.0).empirical_exponent == doctest::Approx(-1.0));
  }
  CHECK(to_string(DecayStatus::insufficient_data) == "insufficient-data");
}
