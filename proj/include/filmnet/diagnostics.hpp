#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "filmnet/grid.hpp"
#include "filmnet/operators.hpp"

namespace filmnet {

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double entropy = 0.0;
  double min_u = 0.0;
  double max_u = 0.0;
  double vertex_residual_max = 0.0;
  std::size_t clamp_events = 0;  // cumulative over the run
  /// Σ∫|u|^{2-n} for the run's exponent; NaN when 1 <= n <= 2 does not hold.
  double moment = 0.0;

  bool operator==(const DiagnosticsRecord&) const = default;
};

double mass(const GraphGrid& grid, const Eigen::VectorXd& u);

/// ½ Σ_j d_j Σ_faces ((u_r - u_l)/Δx_j)² Δx_j.
double energy(const GraphGrid& grid, const Eigen::VectorXd& u);

/// G_ε(z) = ∫_A^z ∫_A^v dy dv / f_ε(y) = ∫_A^z (z - y) / f_ε(y) dy.
/// Closed form for n ∈ {1, 2} on z >= 0, adaptive quadrature otherwise.
/// Returns +inf where the integral diverges (ε = 0, n >= 2, z = 0).
double entropy_density(double z, const Mobility& mobility, double base);

/// Same integral by adaptive Gauss-Kronrod quadrature only.
double entropy_density_quadrature(double z, const Mobility& mobility, double base);

double entropy(const GraphGrid& grid, const Eigen::VectorXd& u, const Mobility& mobility, double base);

/// K = mass / Σ_j d_j ℓ_j.
double steady_value(const GraphGrid& grid, const Eigen::VectorXd& initial);

/// Σ_j d_j ∫ |u|^{2-n}; NaN outside 1 <= n <= 2.
double decay_moment(const GraphGrid& grid, const Eigen::VectorXd& u, double n);

DiagnosticsRecord make_record(const GraphGrid& grid, const Eigen::VectorXd& u, double t,
                              const Mobility& mobility, double entropy_base, std::size_t clamp_events);

enum class DecayStatus { pass, fail, insufficient_data, out_of_scope };
std::string to_string(DecayStatus status);

struct DecayReport {
  DecayStatus status = DecayStatus::insufficient_data;
  double c_bound = 0.0;           // running sup of Σ∫|u|^{2-n}
  double max_ratio = 0.0;         // max_k E(t_k) / bound(t_k)
  std::optional<std::size_t> first_violation;
  double empirical_exponent = 0.0;  // slope of ln E against ln t
  std::string message;
};

/// Checks E(t_k) <= E(0) / (1 + (9/C) E(0) t_k) · (1 + slack) along a
/// recorded trajectory, C taken as the running supremum of the `moment`
/// column. For n = 2 the moment is the total measure of the grid.
DecayReport decay_bound_check(const std::vector<DiagnosticsRecord>& series, double n,
                              const GraphGrid* grid = nullptr, double slack = 0.05);

}  // namespace filmnet
