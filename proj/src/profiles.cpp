#include "filmnet/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "filmnet/errors.hpp"

namespace filmnet {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::size_t edge) {
  return seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(edge) + 1));
}

}  // namespace

double evaluate_profile(const InitialProfile& profile, double s, std::uint64_t seed) {
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, profile::Constant>) {
          return p.value;
        } else if constexpr (std::is_same_v<T, profile::Droplet>) {
          const double x = (s - p.center) / p.width;
          const double bump = std::max(0.0, 1.0 - x * x);
          return p.base + p.height * bump * bump;
        } else if constexpr (std::is_same_v<T, profile::Linear>) {
          return p.a + (p.b - p.a) * s;
        } else {
          std::mt19937_64 rng(seed);
          double sum = 0.0;
          for (int k = 1; k <= 4; ++k) {
            const double r = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            const double sk = std::sin(std::numbers::pi * k * s);
            sum += r * sk * sk;
          }
          return p.base + p.amplitude * sum / 4.0;
        }
      },
      profile);
}

std::vector<double> initial_profile(const InitialProfile& profile, const GraphGrid& grid, std::size_t edge,
                                    std::uint64_t run_seed) {
  std::uint64_t seed = run_seed;
  if (const auto* r = std::get_if<profile::Random>(&profile); r != nullptr && r->seed) seed = *r->seed;
  seed = mix_seed(seed, edge);
  const std::size_t n = grid.cells(edge);
  std::vector<double> out(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    // Pin the end points so they are exact regardless of rounding in k/n.
    const double s = k == n ? 1.0 : static_cast<double>(k) / static_cast<double>(n);
    out[k] = evaluate_profile(profile, s, seed);
    if (!(out[k] >= 0.0)) {
      std::ostringstream os;
      os << "initial profile is negative (" << out[k] << ") at s = " << s;
      throw ConfigError(os.str(), "initial.edges." + grid.graph().edge_ids()[edge]);
    }
  }
  return out;
}

Eigen::VectorXd build_initial_state(const RunSpec& spec, const GraphGrid& grid) {
  const MetricGraph& g = grid.graph();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
  std::vector<std::vector<double>> vertex_samples(g.vertex_count());

  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto samples = initial_profile(spec.profile_for(g.edge_ids()[e]), grid, e, spec.seed);
    const std::size_t n = grid.cells(e);
    for (std::size_t k = 1; k < n; ++k) u[static_cast<Eigen::Index>(grid.node(e, k))] = samples[k];
    vertex_samples[g.edge(e).tail].push_back(samples.front());
    vertex_samples[g.edge(e).head].push_back(samples.back());
  }

  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    const auto& vs = vertex_samples[v];
    const auto [lo, hi] = std::minmax_element(vs.begin(), vs.end());
    if (*hi - *lo > 1e-12) {
      std::ostringstream os;
      os << "initial profiles disagree at vertex '" << g.vertex_names()[v] << "' (values from " << *lo << " to "
         << *hi << "); the film height must be continuous";
      throw ConfigError(os.str(), "initial");
    }
    double mean = 0.0;
    for (double x : vs) mean += x;
    u[static_cast<Eigen::Index>(grid.vertex_node(v))] = mean / static_cast<double>(vs.size());
  }
  return u;
}

}  // namespace filmnet
