#include "stiff_integrator.hpp"

#include <utility>

#include <boost/numeric/odeint.hpp>
#include <boost/numeric/ublas/matrix.hpp>
#include <boost/numeric/ublas/vector.hpp>

namespace filmnet::detail {

namespace {

using ublas_vector = boost::numeric::ublas::vector<double>;
using ublas_matrix = boost::numeric::ublas::matrix<double>;

Eigen::VectorXd to_eigen(const ublas_vector& v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

}  // namespace

void integrate_rosenbrock(const StiffRhs& rhs, const Eigen::VectorXd& x0, const std::vector<double>& times,
                          double dt0, double tolerance, const StiffObserver& observe) {
  const auto n = static_cast<std::size_t>(x0.size());
  ublas_vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = x0[static_cast<Eigen::Index>(i)];

  auto system = [&](const ublas_vector& v, ublas_vector& dxdt, double) {
    const Eigen::VectorXd d = rhs(to_eigen(v), nullptr);
    for (std::size_t i = 0; i < n; ++i) dxdt[i] = d[static_cast<Eigen::Index>(i)];
  };
  auto jacobian = [&](const ublas_vector& v, ublas_matrix& jac, double, ublas_vector& dfdt) {
    Eigen::MatrixXd j;
    rhs(to_eigen(v), &j);
    for (std::size_t r = 0; r < n; ++r) {
      dfdt[r] = 0.0;
      for (std::size_t c = 0; c < n; ++c) jac(r, c) = j(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  };
  auto observer = [&](const ublas_vector& v, double t) { observe(to_eigen(v), t); };

  namespace odeint = boost::numeric::odeint;
  auto stepper = odeint::make_dense_output(tolerance, tolerance, odeint::rosenbrock4<double>());
  odeint::integrate_times(stepper, std::make_pair(system, jacobian), x, times.begin(), times.end(), dt0, observer);
}

}  // namespace filmnet::detail
