#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Core>
#include <Eigen/LU>

#include "filmnet/graph.hpp"
#include "filmnet/grid.hpp"

namespace testing {

inline filmnet::GraphSpec single_edge_spec(double length = 1.0) {
  return {{"a1", "a2"}, {{"e1", "a1", "a2", length, 1.0}}, {"a1", "a2"}};
}

inline filmnet::GraphGrid single_edge(std::size_t cells, double length = 1.0) {
  return {filmnet::build_graph(single_edge_spec(length)), cells};
}

inline filmnet::GraphGrid builtin(const std::string& name, std::size_t cells) {
  return {filmnet::build_graph(*filmnet::builtin_graph(name)), cells};
}

/// Samples g(s) along every edge at the grid nodes; vertex values come from
/// the first incident edge visited.
template <class F>
Eigen::VectorXd sample(const filmnet::GraphGrid& grid, F g) {
  Eigen::VectorXd u(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t e = 0; e < grid.graph().edge_count(); ++e) {
    const std::size_t n = grid.cells(e);
    for (std::size_t k = 0; k <= n; ++k)
      u[static_cast<Eigen::Index>(grid.node(e, k))] = g(e, static_cast<double>(k) / static_cast<double>(n));
  }
  return u;
}

inline Eigen::VectorXd random_vector(std::size_t n, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = dist(rng);
  return v;
}

// Dense oracle of the linearly implicit step, assembled edge by edge from
// the node map without going through the library's face list or operators.
inline Eigen::VectorXd dense_step_oracle(const filmnet::GraphGrid& grid, const Eigen::VectorXd& u, double dt, double n,
                                         double eps) {
  const auto size = static_cast<Eigen::Index>(grid.size());
  const filmnet::MetricGraph& g = grid.graph();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(size);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(size, size);
  Eigen::MatrixXd kf = Eigen::MatrixXd::Zero(size, size);
  auto f = [&](double z) { return std::pow(std::abs(z), n) + eps; };
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const std::size_t cells = grid.cells(e);
    const double h = g.edge(e).length / static_cast<double>(cells);
    const double d = g.edge(e).weight;
    for (std::size_t j = 0; j < cells; ++j) {
      const auto a = static_cast<Eigen::Index>(grid.node(e, j));
      const auto b = static_cast<Eigen::Index>(grid.node(e, j + 1));
      m[a] += d * h / 2.0;
      m[b] += d * h / 2.0;
      const double c = d / h;
      const double cf = c * (f(u[a]) + f(u[b])) / 2.0;
      k(a, a) += c;
      k(b, b) += c;
      k(a, b) -= c;
      k(b, a) -= c;
      kf(a, a) += cf;
      kf(b, b) += cf;
      kf(a, b) -= cf;
      kf(b, a) -= cf;
    }
  }
  const Eigen::MatrixXd minv = m.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(size, size) + dt * minv * kf * minv * k;
  return a.fullPivLu().solve(u);
}

/// Quartic droplet of the given half-width on each arm, centred on the hub.
inline Eigen::VectorXd droplet_on_star(const filmnet::GraphGrid& grid, const double widths[3]) {
  return sample(grid, [&](std::size_t e, double s) {
    const double x = (s - 1.0) / widths[e];
    return 0.1 + (std::abs(x) < 1.0 ? std::pow(1.0 - x * x, 2) : 0.0);
  });
}

inline double max_abs(const Eigen::VectorXd& v) { return v.lpNorm<Eigen::Infinity>(); }

}  // namespace testing
