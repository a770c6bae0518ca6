#include "filmnet/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace filmnet {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// Roundoff-level energies of (numerically) constant states.
constexpr double kEnergyFloor = 1e-24;
}

double mass(const GraphGrid& grid, const Eigen::VectorXd& u) { return grid.measure().dot(u); }

double energy(const GraphGrid& grid, const Eigen::VectorXd& u) {
  double sum = 0.0;
  for (const Face& f : grid.faces()) {
    const double du = u[static_cast<Eigen::Index>(f.right)] - u[static_cast<Eigen::Index>(f.left)];
    sum += f.weight * du * du / f.spacing;
  }
  return 0.5 * sum;
}

double entropy_density_quadrature(double z, const Mobility& mobility, double base) {
  if (z == base) return 0.0;
  if (mobility.eps == 0.0 && z == 0.0 && mobility.n >= 2.0) return kInf;
  auto integrand = [&](double y) { return (z - y) / mobility(y); };
  // G is the integral from base to z; the integrand is nonnegative on either side.
  const double lo = std::min(z, base);
  const double hi = std::max(z, base);
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 21>::integrate(integrand, lo, hi, 30, 1e-12);
  return z < base ? -value : value;
}

double entropy_density(double z, const Mobility& mobility, double base) {
  if (z == base) return 0.0;
  const double eps = mobility.eps;
  if (z >= 0.0 && mobility.n == 1.0) {
    // ∫ (z - y)/(y + ε) dy = (z + ε) ln(y + ε) - y
    const double p = z + eps;
    const double log_term = p > 0.0 ? p * std::log(p / (base + eps)) : 0.0;
    return log_term - (z - base);
  }
  if (z >= 0.0 && mobility.n == 2.0) {
    if (eps == 0.0) {
      if (z == 0.0) return kInf;
      return z / base - 1.0 - std::log(z / base);
    }
    const double r = std::sqrt(eps);
    return z / r * (std::atan(z / r) - std::atan(base / r)) -
           0.5 * std::log((z * z + eps) / (base * base + eps));
  }
  return entropy_density_quadrature(z, mobility, base);
}

double entropy(const GraphGrid& grid, const Eigen::VectorXd& u, const Mobility& mobility, double base) {
  const auto& m = grid.measure();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double g = entropy_density(u[i], mobility, base);
    if (std::isinf(g)) return kInf;
    sum += m[i] * g;
  }
  return sum;
}

double steady_value(const GraphGrid& grid, const Eigen::VectorXd& initial) {
  return mass(grid, initial) / grid.graph().total_measure();
}

double decay_moment(const GraphGrid& grid, const Eigen::VectorXd& u, double n) {
  if (n < 1.0 || n > 2.0) return std::numeric_limits<double>::quiet_NaN();
  const double p = 2.0 - n;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) sum += grid.measure()[i] * std::pow(std::abs(u[i]), p);
  return sum;
}

DiagnosticsRecord make_record(const GraphGrid& grid, const Eigen::VectorXd& u, double t,
                              const Mobility& mobility, double entropy_base, std::size_t clamp_events) {
  DiagnosticsRecord r;
  r.t = t;
  r.mass = mass(grid, u);
  r.energy = energy(grid, u);
  r.entropy = entropy(grid, u, mobility, entropy_base);
  r.min_u = u.minCoeff();
  r.max_u = u.maxCoeff();
  const Eigen::VectorXd w = apply_neg_laplacian(grid, u);
  r.vertex_residual_max = max_vertex_residual(vertex_flux_residual(grid, u, w));
  r.clamp_events = clamp_events;
  r.moment = decay_moment(grid, u, mobility.n);
  return r;
}

std::string to_string(DecayStatus status) {
  switch (status) {
    case DecayStatus::pass: return "pass";
    case DecayStatus::fail: return "fail";
    case DecayStatus::insufficient_data: return "insufficient-data";
    case DecayStatus::out_of_scope: return "out-of-scope";
  }
  return "unknown";
}

DecayReport decay_bound_check(const std::vector<DiagnosticsRecord>& series, double n, const GraphGrid* grid,
                              double slack) {
  DecayReport report;
  if (n < 1.0 || n > 2.0) {
    report.status = DecayStatus::out_of_scope;
    report.message = "out of derivation scope: the bound needs 1 <= n <= 2";
    return report;
  }
  if (series.size() < 3) {
    report.status = DecayStatus::insufficient_data;
    report.message = "need at least 3 records";
    return report;
  }

  double c = 0.0;
  if (grid != nullptr && n == 2.0) {
    c = grid->total_measure();
  } else {
    for (const auto& r : series) {
      if (std::isnan(r.moment)) {
        report.status = DecayStatus::insufficient_data;
        report.message = "moment column missing for this exponent";
        return report;
      }
      c = std::max(c, r.moment);
    }
  }
  report.c_bound = c;

  const double e0 = series.front().energy;
  const double t0 = series.front().t;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double t = series[k].t - t0;
    const double bound = c > 0.0 ? e0 / (1.0 + 9.0 / c * e0 * t) : e0;
    const double ratio = bound > 0.0 ? series[k].energy / bound : (series[k].energy > 0.0 ? kInf : 0.0);
    report.max_ratio = std::max(report.max_ratio, ratio);
    if (series[k].energy > bound * (1.0 + slack) + kEnergyFloor && !report.first_violation) report.first_violation = k;
  }

  // Least-squares slope of ln E against ln t.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  for (const auto& r : series) {
    const double t = r.t - t0;
    if (t > 0.0 && r.energy > 0.0) {
      const double x = std::log(t);
      const double y = std::log(r.energy);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++count;
    }
  }
  if (count >= 2) {
    const double denom = static_cast<double>(count) * sxx - sx * sx;
    if (denom != 0.0) report.empirical_exponent = (static_cast<double>(count) * sxy - sx * sy) / denom;
  }

  std::ostringstream os;
  if (report.first_violation) {
    report.status = DecayStatus::fail;
    const auto& r = series[*report.first_violation];
    os << "energy " << r.energy << " exceeds bound at t = " << r.t << " (record " << *report.first_violation << ")";
  } else {
    report.status = DecayStatus::pass;
    os << "energy within bound at all " << series.size() << " records";
  }
  report.message = os.str();
  return report;
}

}  // namespace filmnet
