#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "filmnet/grid.hpp"
#include "filmnet/operators.hpp"

namespace filmnet {

struct EigenPair {
  double lambda = 0.0;
  Eigen::VectorXd phi;  // unit norm in the measure-weighted inner product
};

/// The k smallest eigenpairs of the assembled L, ascending. Solved densely
/// through the symmetric similarity transform M^{1/2} L M^{-1/2}.
std::vector<EigenPair> graph_laplacian_eigen(const GraphGrid& grid, std::size_t k);

/// max_i ‖L φ_i - λ_i φ_i‖∞ / max(λ_i, 1).
double eigen_residual(const GraphGrid& grid, const std::vector<EigenPair>& pairs);

/// Gram matrix of the eigenvectors in the measure-weighted inner product.
Eigen::MatrixXd eigen_gram(const GraphGrid& grid, const std::vector<EigenPair>& pairs);

/// Edge classes of the eight-edge example graph ("paper-example-8").
enum class EdgeClass { pendant, cycle_long, cycle_short };

EdgeClass edge_class_from_string(const std::string& name);
std::string to_string(EdgeClass cls);

/// Closed-form eigenvalue: pendant and cycle-short edges (πi)², cycle-long (2πi)².
double analytic_example_eigen(EdgeClass cls, int i);

struct EigenComparison {
  EdgeClass cls = EdgeClass::pendant;
  int mode = 1;
  double analytic = 0.0;
  double nearest_computed = 0.0;
  double relative_error = 0.0;
};

/// For every edge class and mode i with analytic value below the largest
/// computed eigenvalue, the nearest computed eigenvalue.
std::vector<EigenComparison> compare_with_example(const std::vector<EigenPair>& pairs);

struct GalerkinOptions {
  std::size_t modes = 16;
  double t_end = 1e-2;
  std::vector<double> output_times;  // must be increasing, within [0, t_end]
  double tolerance = 1e-8;
};

struct GalerkinTrajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;        // u on the grid
  std::vector<Eigen::VectorXd> coefficients;  // c(t) in the eigenbasis
  std::vector<double> eigenvalues;
};

/// Projection coefficients c_i = <u, φ_i>_M.
Eigen::VectorXd galerkin_coefficients(const GraphGrid& grid, const std::vector<EigenPair>& basis,
                                      const Eigen::VectorXd& u);

/// Reference integrator in the truncated eigenbasis:
///   c_i' = -Σ_k λ_k c_k ∫ f_ε(u) φ_k' φ_i' ds,
/// the mobility integral taken by two-point Gauss quadrature per cell on
/// the piecewise-linear u, integrated with an adaptive Rosenbrock method.
/// Restricted to single-edge or star graphs, ε > 0, positive data and at
/// most 32 modes.
GalerkinTrajectory galerkin_reference_solve(const GraphGrid& grid, const Eigen::VectorXd& u0,
                                            const Mobility& mobility, const GalerkinOptions& options);

}  // namespace filmnet
