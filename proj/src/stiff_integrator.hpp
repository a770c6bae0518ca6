#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace filmnet::detail {

/// Right-hand side of an autonomous system. Fills the Jacobian when the
/// pointer is non-null.
using StiffRhs = std::function<Eigen::VectorXd(const Eigen::VectorXd&, Eigen::MatrixXd*)>;
using StiffObserver = std::function<void(const Eigen::VectorXd&, double)>;

/// Adaptive Rosenbrock (order 4) with dense output, reporting the state at
/// each requested time. Built as C++17: uBLAS in Boost 1.74 relies on
/// allocator members removed in C++20.
void integrate_rosenbrock(const StiffRhs& rhs, const Eigen::VectorXd& x0, const std::vector<double>& times,
                          double dt0, double tolerance, const StiffObserver& observe);

}  // namespace filmnet::detail
