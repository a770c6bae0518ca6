#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "filmnet/grid.hpp"

namespace filmnet {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class FaceAverage { arithmetic, harmonic, geometric };

std::string to_string(FaceAverage avg);
FaceAverage face_average_from_string(const std::string& name);

/// Regularised mobility f_ε(z) = |z|^n + ε and its face averaging rule.
struct Mobility {
  double n = 1.0;
  double eps = 0.0;
  FaceAverage average = FaceAverage::arithmetic;
  /// Permits n < 1 (e.g. n = 0 for a linear test problem).
  bool allow_out_of_range = false;

  double operator()(double z) const;
  double face(double left, double right) const;
  /// Throws ConfigError when n < 1 or eps < 0 without the override.
  void check() const;
};

struct DiscreteOperator {
  SparseMatrix matrix;
  /// Symmetric with respect to the measure-weighted inner product.
  bool weighted_symmetric = false;
  std::string tag;
};

/// L with w = L u, the discrete -∂_ss. Vertex rows close the per-edge
/// stencils through the vertex control volume, so the flux balance over
/// incident edges (and no-flux at boundary vertices) is the natural condition.
DiscreteOperator assemble_neg_laplacian(const GraphGrid& grid);

/// B(u) with u_t = B(u) w: the conservative flux divergence
/// ∂_s(f_ε(u) ∂_s w) with face mobilities averaged from neighbouring nodes.
DiscreteOperator assemble_mobility_flux_div(const GraphGrid& grid, const Eigen::VectorXd& u,
                                            const Mobility& mobility);

/// L u in flux form (exactly zero on constants).
Eigen::VectorXd apply_neg_laplacian(const GraphGrid& grid, const Eigen::VectorXd& u);

/// B(u) w in flux form (exactly zero when w is constant).
Eigen::VectorXd apply_mobility_flux_div(const GraphGrid& grid, const Eigen::VectorXd& u, const Eigen::VectorXd& w,
                                        const Mobility& mobility);

/// B(u) · (L u), the semi-discrete time derivative.
Eigen::VectorXd evaluate_rhs(const GraphGrid& grid, const Eigen::VectorXd& u, const Mobility& mobility);

/// Per-interior-vertex discrete flux balance Σ_{J+} ∂_s(·)(1) - Σ_{J-} ∂_s(·)(0)
/// using one-sided differences (d_j-weighted).
struct VertexResidual {
  std::size_t vertex = 0;
  double u_balance = 0.0;
  double w_balance = 0.0;
};

std::vector<VertexResidual> vertex_flux_residual(const GraphGrid& grid, const Eigen::VectorXd& u,
                                                 const Eigen::VectorXd& w);
double max_vertex_residual(const std::vector<VertexResidual>& residuals);

/// Writes "row,col,value" lines (zero-based) with a one-line header.
void write_triplets(const DiscreteOperator& op, std::ostream& os);

}  // namespace filmnet
