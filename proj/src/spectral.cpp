#include "filmnet/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "filmnet/errors.hpp"
#include "stiff_integrator.hpp"

namespace filmnet {

namespace {

// Modified Gram-Schmidt, applied twice, in the measure-weighted inner product.
void orthonormalize(Eigen::MatrixXd& q, const Eigen::VectorXd& m) {
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
      for (Eigen::Index p = 0; p < j; ++p) q.col(j) -= q.col(p).dot(m.cwiseProduct(q.col(j))) * q.col(p);
      q.col(j) /= std::sqrt(q.col(j).dot(m.cwiseProduct(q.col(j))));
    }
  }
}

// The dense solve leaves residuals near n·eps·‖L‖, which is far above the
// low eigenvalues on fine grids. Two sweeps of shifted inverse iteration per
// vector followed by Rayleigh-Ritz on the block bring them to eps·‖L‖.
void refine(const GraphGrid& grid, Eigen::MatrixXd& q, Eigen::VectorXd& lambda) {
  const SparseMatrix l = assemble_neg_laplacian(grid).matrix;
  const Eigen::VectorXd& m = grid.measure();
  const auto n = static_cast<Eigen::Index>(grid.size());
  SparseMatrix identity(n, n);
  identity.setIdentity();
  Eigen::SparseLU<SparseMatrix> lu;
  for (int sweep = 0; sweep < 2; ++sweep) {
    // Connected graph: the kernel is exactly the constants.
    q.col(0).setConstant(1.0 / std::sqrt(grid.total_measure()));
    for (Eigen::Index i = 1; i < q.cols(); ++i) {
      const double shift = lambda[i] - 1e-6 * std::max(lambda[i], 1.0);
      const SparseMatrix shifted = l - shift * identity;
      lu.compute(shifted);
      if (lu.info() != Eigen::Success) continue;
      const Eigen::VectorXd y = lu.solve(q.col(i));
      if (lu.info() != Eigen::Success || !y.allFinite()) continue;
      q.col(i) = y;
    }
    orthonormalize(q, m);
    Eigen::MatrixXd lq(n, q.cols());
    for (Eigen::Index i = 0; i < q.cols(); ++i) lq.col(i) = apply_neg_laplacian(grid, q.col(i));
    Eigen::MatrixXd h = q.transpose() * m.asDiagonal() * lq;
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(h);
    if (ritz.info() != Eigen::Success) throw NumericalError("Rayleigh-Ritz eigensolver did not converge");
    q = (q * ritz.eigenvectors()).eval();
    lambda = ritz.eigenvalues();
  }
}

}  // namespace

std::vector<EigenPair> graph_laplacian_eigen(const GraphGrid& grid, std::size_t k) {
  if (k > grid.size())
    throw std::invalid_argument("requested " + std::to_string(k) + " eigenpairs from a grid of " +
                                std::to_string(grid.size()) + " unknowns");
  const Eigen::MatrixXd l = Eigen::MatrixXd(assemble_neg_laplacian(grid).matrix);
  const Eigen::VectorXd sqrt_m = grid.measure().cwiseSqrt();
  Eigen::MatrixXd s = sqrt_m.asDiagonal() * l * sqrt_m.cwiseInverse().asDiagonal();
  s = 0.5 * (s + s.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  if (solver.info() != Eigen::Success) throw NumericalError("dense eigensolver did not converge");

  const auto kk = static_cast<Eigen::Index>(k);
  Eigen::MatrixXd q = sqrt_m.cwiseInverse().asDiagonal() * solver.eigenvectors().leftCols(kk);
  Eigen::VectorXd lambda = solver.eigenvalues().head(kk);
  if (k > 0) refine(grid, q, lambda);

  std::vector<EigenPair> pairs;
  pairs.reserve(k);
  for (Eigen::Index i = 0; i < kk; ++i) {
    EigenPair p;
    p.lambda = std::max(lambda[i], 0.0);
    p.phi = q.col(i);
    // Sign convention: the first entry of appreciable size is positive.
    const double scale = p.phi.lpNorm<Eigen::Infinity>();
    for (Eigen::Index j = 0; j < p.phi.size(); ++j) {
      if (std::abs(p.phi[j]) > 1e-8 * scale) {
        if (p.phi[j] < 0.0) p.phi = -p.phi;
        break;
      }
    }
    pairs.push_back(std::move(p));
  }

  const double residual = eigen_residual(grid, pairs);
  if (!(residual < 1e-6)) {
    std::ostringstream os;
    os << "eigenpairs inaccurate: scaled residual " << residual;
    throw NumericalError(os.str());
  }
  return pairs;
}

double eigen_residual(const GraphGrid& grid, const std::vector<EigenPair>& pairs) {
  double worst = 0.0;
  for (const auto& p : pairs) {
    const Eigen::VectorXd r = apply_neg_laplacian(grid, p.phi) - p.lambda * p.phi;
    worst = std::max(worst, r.lpNorm<Eigen::Infinity>() / std::max(p.lambda, 1.0));
  }
  return worst;
}

Eigen::MatrixXd eigen_gram(const GraphGrid& grid, const std::vector<EigenPair>& pairs) {
  const auto k = static_cast<Eigen::Index>(pairs.size());
  Eigen::MatrixXd g(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      g(i, j) = weighted_dot(grid, pairs[static_cast<std::size_t>(i)].phi, pairs[static_cast<std::size_t>(j)].phi);
  return g;
}

EdgeClass edge_class_from_string(const std::string& name) {
  if (name == "pendant") return EdgeClass::pendant;
  if (name == "cycle-long") return EdgeClass::cycle_long;
  if (name == "cycle-short") return EdgeClass::cycle_short;
  throw std::invalid_argument("unknown edge class '" + name + "' (pendant|cycle-long|cycle-short)");
}

std::string to_string(EdgeClass cls) {
  switch (cls) {
    case EdgeClass::pendant: return "pendant";
    case EdgeClass::cycle_long: return "cycle-long";
    case EdgeClass::cycle_short: return "cycle-short";
  }
  return "pendant";
}

double analytic_example_eigen(EdgeClass cls, int i) {
  if (i < 1) throw std::invalid_argument("mode index must be >= 1");
  const double base = std::numbers::pi * static_cast<double>(i);
  switch (cls) {
    case EdgeClass::pendant:
    case EdgeClass::cycle_short: return base * base;
    case EdgeClass::cycle_long: return 4.0 * base * base;
  }
  throw std::invalid_argument("unknown edge class");
}

std::vector<EigenComparison> compare_with_example(const std::vector<EigenPair>& pairs) {
  std::vector<EigenComparison> out;
  if (pairs.empty()) return out;
  const double top = pairs.back().lambda;
  for (EdgeClass cls : {EdgeClass::pendant, EdgeClass::cycle_long, EdgeClass::cycle_short}) {
    for (int i = 1;; ++i) {
      const double analytic = analytic_example_eigen(cls, i);
      if (analytic > top) break;
      EigenComparison c{cls, i, analytic, 0.0, std::numeric_limits<double>::infinity()};
      for (const auto& p : pairs) {
        const double rel = std::abs(p.lambda - analytic) / analytic;
        if (rel < c.relative_error) {
          c.relative_error = rel;
          c.nearest_computed = p.lambda;
        }
      }
      out.push_back(c);
    }
  }
  return out;
}

Eigen::VectorXd galerkin_coefficients(const GraphGrid& grid, const std::vector<EigenPair>& basis,
                                      const Eigen::VectorXd& u) {
  Eigen::VectorXd c(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) c[static_cast<Eigen::Index>(i)] = weighted_dot(grid, u, basis[i].phi);
  return c;
}

namespace {

bool is_single_edge_or_star(const MetricGraph& g) {
  if (g.edge_count() == 1) return true;
  for (std::size_t v = 0; v < g.vertex_count(); ++v)
    if (g.degree(v) == g.edge_count()) return true;
  return false;
}

// Dense per-face tables of the truncated basis.
struct GalerkinModel {
  Eigen::MatrixXd derivative;  // faces × modes, (φ_r - φ_l)/Δx
  Eigen::MatrixXd gauss_a;     // faces × modes, φ at the first Gauss point
  Eigen::MatrixXd gauss_b;     // faces × modes, φ at the second Gauss point
  Eigen::VectorXd half_width;  // d_j Δx_j / 2 (Gauss weight times measure)
  Eigen::VectorXd lambda;
  Mobility mobility;

  double f_prime(double z) const {
    const double a = std::abs(z);
    const double sign = z < 0.0 ? -1.0 : 1.0;
    if (mobility.n == 0.0) return 0.0;
    return sign * mobility.n * std::pow(a, mobility.n - 1.0);
  }

  Eigen::VectorXd rhs(const Eigen::VectorXd& c, Eigen::MatrixXd* jacobian) const {
    const Eigen::VectorXd ua = gauss_a * c;
    const Eigen::VectorXd ub = gauss_b * c;
    const Eigen::VectorXd g = derivative * lambda.cwiseProduct(c);
    const auto faces = ua.size();
    Eigen::VectorXd q(faces);
    for (Eigen::Index f = 0; f < faces; ++f) q[f] = half_width[f] * (mobility(ua[f]) + mobility(ub[f]));
    const Eigen::VectorXd out = -derivative.transpose() * q.cwiseProduct(g);
    if (jacobian != nullptr) {
      // ∂q_f/∂c_m = w_f (f'(u_a) φ_m(a) + f'(u_b) φ_m(b))
      Eigen::MatrixXd dq(faces, c.size());
      for (Eigen::Index f = 0; f < faces; ++f)
        dq.row(f) = half_width[f] * (f_prime(ua[f]) * gauss_a.row(f) + f_prime(ub[f]) * gauss_b.row(f));
      *jacobian = -derivative.transpose() *
                  (g.asDiagonal() * dq + q.asDiagonal() * derivative * lambda.asDiagonal());
    }
    return out;
  }
};

}  // namespace

GalerkinTrajectory galerkin_reference_solve(const GraphGrid& grid, const Eigen::VectorXd& u0,
                                            const Mobility& mobility, const GalerkinOptions& options) {
  if (!is_single_edge_or_star(grid.graph()))
    throw std::invalid_argument("Galerkin reference is limited to single-edge and star graphs");
  if (!(mobility.eps > 0.0)) throw std::invalid_argument("Galerkin reference needs eps > 0");
  if (options.modes == 0 || options.modes > 32) throw std::invalid_argument("Galerkin reference supports 1..32 modes");
  if (static_cast<std::size_t>(u0.size()) != grid.size()) throw std::invalid_argument("state size does not match grid");
  if (!(u0.minCoeff() > 0.0)) throw std::invalid_argument("Galerkin reference needs strictly positive data");
  if (!(options.t_end > 0.0)) throw std::invalid_argument("t_end must be positive");

  const auto basis = graph_laplacian_eigen(grid, options.modes);
  const auto modes = static_cast<Eigen::Index>(basis.size());
  const auto faces = static_cast<Eigen::Index>(grid.faces().size());

  GalerkinModel model;
  model.mobility = mobility;
  model.derivative.resize(faces, modes);
  model.gauss_a.resize(faces, modes);
  model.gauss_b.resize(faces, modes);
  model.half_width.resize(faces);
  model.lambda.resize(modes);
  const double xi = 0.5 - 0.5 / std::sqrt(3.0);
  for (Eigen::Index m = 0; m < modes; ++m) model.lambda[m] = basis[static_cast<std::size_t>(m)].lambda;
  for (Eigen::Index f = 0; f < faces; ++f) {
    const Face& face = grid.faces()[static_cast<std::size_t>(f)];
    model.half_width[f] = 0.5 * face.weight * face.spacing;
    for (Eigen::Index m = 0; m < modes; ++m) {
      const auto& phi = basis[static_cast<std::size_t>(m)].phi;
      const double pl = phi[static_cast<Eigen::Index>(face.left)];
      const double pr = phi[static_cast<Eigen::Index>(face.right)];
      model.derivative(f, m) = (pr - pl) / face.spacing;
      model.gauss_a(f, m) = (1.0 - xi) * pl + xi * pr;
      model.gauss_b(f, m) = xi * pl + (1.0 - xi) * pr;
    }
  }

  GalerkinTrajectory out;
  for (const auto& p : basis) out.eigenvalues.push_back(p.lambda);

  std::vector<double> times = options.output_times;
  if (times.empty()) times = {0.0, options.t_end};
  if (!std::is_sorted(times.begin(), times.end()) || times.front() < 0.0 || times.back() > options.t_end)
    throw std::invalid_argument("output times must be sorted within [0, t_end]");

  const Eigen::VectorXd c0 = galerkin_coefficients(grid, basis, u0);
  auto observer = [&](const Eigen::VectorXd& c, double t) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(u0.size());
    for (Eigen::Index m = 0; m < modes; ++m) u += c[m] * basis[static_cast<std::size_t>(m)].phi;
    out.times.push_back(t);
    out.coefficients.push_back(c);
    out.states.push_back(std::move(u));
  };
  auto rhs = [&](const Eigen::VectorXd& c, Eigen::MatrixXd* jac) { return model.rhs(c, jac); };
  detail::integrate_rosenbrock(rhs, c0, times, std::min(1e-8, options.t_end), options.tolerance, observer);
  return out;
}

}  // namespace filmnet
