#include "filmnet/operators.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "filmnet/errors.hpp"

namespace filmnet {

std::string to_string(FaceAverage avg) {
  switch (avg) {
    case FaceAverage::arithmetic: return "arithmetic";
    case FaceAverage::harmonic: return "harmonic";
    case FaceAverage::geometric: return "geometric";
  }
  return "arithmetic";
}

FaceAverage face_average_from_string(const std::string& name) {
  if (name == "arithmetic") return FaceAverage::arithmetic;
  if (name == "harmonic") return FaceAverage::harmonic;
  if (name == "geometric") return FaceAverage::geometric;
  throw ConfigError("unknown face average '" + name + "' (arithmetic|harmonic|geometric)");
}

double Mobility::operator()(double z) const {
  const double a = std::abs(z);
  if (n == 1.0) return a + eps;
  if (n == 2.0) return a * a + eps;
  return std::pow(a, n) + eps;
}

double Mobility::face(double left, double right) const {
  const double fl = (*this)(left);
  const double fr = (*this)(right);
  switch (average) {
    case FaceAverage::arithmetic: return 0.5 * (fl + fr);
    case FaceAverage::harmonic: return fl + fr > 0.0 ? 2.0 * fl * fr / (fl + fr) : 0.0;
    case FaceAverage::geometric: return std::sqrt(fl * fr);
  }
  return 0.5 * (fl + fr);
}

void Mobility::check() const {
  if (!(eps >= 0.0)) throw ConfigError("regularization eps must be >= 0", "solver.eps");
  if (!std::isfinite(n)) throw ConfigError("mobility exponent must be finite", "solver.n");
  if (!allow_out_of_range && n < 1.0)
    throw ConfigError("mobility exponent n must be >= 1 (set allow_out_of_range to override)", "solver.n");
  if (n < 0.0) throw ConfigError("mobility exponent n must be >= 0", "solver.n");
}

namespace {

// Assembles sign * (-M^{-1} Σ_f c_f (e_l - e_r)(e_l - e_r)^T) with per-face
// coefficients c_f = d_j F_f / Δx_j.
template <class Coefficient>
SparseMatrix assemble_face_operator(const GraphGrid& grid, Coefficient coefficient, double sign) {
  const auto& m = grid.measure();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(grid.faces().size() * 4);
  for (const Face& f : grid.faces()) {
    const double c = sign * coefficient(f);
    const auto l = static_cast<Eigen::Index>(f.left);
    const auto r = static_cast<Eigen::Index>(f.right);
    triplets.emplace_back(l, l, -c / m[l]);
    triplets.emplace_back(l, r, c / m[l]);
    triplets.emplace_back(r, r, -c / m[r]);
    triplets.emplace_back(r, l, c / m[r]);
  }
  const auto n = static_cast<Eigen::Index>(grid.size());
  SparseMatrix out(n, n);
  out.setFromTriplets(triplets.begin(), triplets.end());
  out.makeCompressed();
  return out;
}

// Flux-form application: exact zero on constant fields.
template <class Coefficient>
Eigen::VectorXd apply_face_operator(const GraphGrid& grid, const Eigen::VectorXd& v, Coefficient coefficient) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  for (const Face& f : grid.faces()) {
    const auto l = static_cast<Eigen::Index>(f.left);
    const auto r = static_cast<Eigen::Index>(f.right);
    const double flux = coefficient(f) * (v[r] - v[l]);
    out[l] += flux;
    out[r] -= flux;
  }
  return out.cwiseQuotient(grid.measure());
}

}  // namespace

DiscreteOperator assemble_neg_laplacian(const GraphGrid& grid) {
  auto coefficient = [](const Face& f) { return f.weight / f.spacing; };
  return {assemble_face_operator(grid, coefficient, -1.0), true, "neg_laplacian"};
}

DiscreteOperator assemble_mobility_flux_div(const GraphGrid& grid, const Eigen::VectorXd& u,
                                            const Mobility& mobility) {
  mobility.check();
  if (static_cast<std::size_t>(u.size()) != grid.size())
    throw std::invalid_argument("state size does not match grid");
  auto coefficient = [&](const Face& f) {
    return f.weight * mobility.face(u[static_cast<Eigen::Index>(f.left)], u[static_cast<Eigen::Index>(f.right)]) /
           f.spacing;
  };
  return {assemble_face_operator(grid, coefficient, 1.0), true, "mobility_flux_div"};
}

Eigen::VectorXd apply_neg_laplacian(const GraphGrid& grid, const Eigen::VectorXd& u) {
  return -apply_face_operator(grid, u, [](const Face& f) { return f.weight / f.spacing; });
}

Eigen::VectorXd apply_mobility_flux_div(const GraphGrid& grid, const Eigen::VectorXd& u, const Eigen::VectorXd& w,
                                        const Mobility& mobility) {
  mobility.check();
  if (static_cast<std::size_t>(u.size()) != grid.size() || static_cast<std::size_t>(w.size()) != grid.size())
    throw std::invalid_argument("state size does not match grid");
  return apply_face_operator(grid, w, [&](const Face& f) {
    return f.weight * mobility.face(u[static_cast<Eigen::Index>(f.left)], u[static_cast<Eigen::Index>(f.right)]) /
           f.spacing;
  });
}

Eigen::VectorXd evaluate_rhs(const GraphGrid& grid, const Eigen::VectorXd& u, const Mobility& mobility) {
  return apply_mobility_flux_div(grid, u, apply_neg_laplacian(grid, u), mobility);
}

std::vector<VertexResidual> vertex_flux_residual(const GraphGrid& grid, const Eigen::VectorXd& u,
                                                 const Eigen::VectorXd& w) {
  const MetricGraph& g = grid.graph();
  std::vector<VertexResidual> out;
  for (std::size_t v : g.interior_set()) out.push_back({v, 0.0, 0.0});
  std::vector<long> slot(g.vertex_count(), -1);
  for (std::size_t i = 0; i < out.size(); ++i) slot[out[i].vertex] = static_cast<long>(i);

  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const Edge& edge = g.edge(e);
    const double h = grid.spacing(e);
    const auto n = grid.cells(e);
    // Incoming at the head: + ∂_s(1) ≈ (x_a - x_{N-1}) / h.
    if (slot[edge.head] >= 0) {
      auto& r = out[static_cast<std::size_t>(slot[edge.head])];
      const auto a = static_cast<Eigen::Index>(grid.node(e, n));
      const auto b = static_cast<Eigen::Index>(grid.node(e, n - 1));
      r.u_balance += edge.weight * (u[a] - u[b]) / h;
      r.w_balance += edge.weight * (w[a] - w[b]) / h;
    }
    // Outgoing at the tail: - ∂_s(0) ≈ -(x_1 - x_a) / h.
    if (slot[edge.tail] >= 0) {
      auto& r = out[static_cast<std::size_t>(slot[edge.tail])];
      const auto a = static_cast<Eigen::Index>(grid.node(e, 0));
      const auto b = static_cast<Eigen::Index>(grid.node(e, 1));
      r.u_balance += edge.weight * (u[a] - u[b]) / h;
      r.w_balance += edge.weight * (w[a] - w[b]) / h;
    }
  }
  return out;
}

double max_vertex_residual(const std::vector<VertexResidual>& residuals) {
  double m = 0.0;
  for (const auto& r : residuals) m = std::max({m, std::abs(r.u_balance), std::abs(r.w_balance)});
  return m;
}

void write_triplets(const DiscreteOperator& op, std::ostream& os) {
  os << "# " << op.tag << " " << op.matrix.rows() << "x" << op.matrix.cols() << "\n";
  os << "row,col,value\n";
  os << std::setprecision(17);
  for (Eigen::Index k = 0; k < op.matrix.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(op.matrix, k); it; ++it)
      os << it.row() << "," << it.col() << "," << it.value() << "\n";
}

}  // namespace filmnet
