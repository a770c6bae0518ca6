#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseLU>

#include "filmnet/diagnostics.hpp"
#include "filmnet/grid.hpp"
#include "filmnet/operators.hpp"

namespace filmnet {

struct FilmState {
  Eigen::VectorXd u;
  double t = 0.0;
  std::size_t step_count = 0;
};

struct SolverConfig {
  double n = 1.0;
  double eps = 1e-6;
  double theta = 0.25;
  double dt_init = 1e-7;
  double dt_min = 1e-14;
  double dt_max = 1e-1;
  double adapt_target = 1e-3;
  double linear_tol = 1e-12;
  double t_end = 10.0;
  double steady_tol = 1e-3;
  FaceAverage average = FaceAverage::arithmetic;
  double negativity_slack = 1e-12;
  /// Lower bound on the denominator of the relative-change ratio.
  double change_floor = 1e-12;
  double entropy_base = 1.0;  // A
  bool allow_out_of_range = false;
  std::size_t max_steps = 1000000;
  bool stop_at_steady = true;

  Mobility mobility() const { return {n, eps, average, allow_out_of_range}; }
  /// Throws ConfigError on inconsistent fields.
  void validate() const;

  bool operator==(const SolverConfig&) const = default;
};

/// u0 + ε^θ when ε > 0, otherwise u0 unchanged.
Eigen::VectorXd lift_initial(const Eigen::VectorXd& u0, const SolverConfig& cfg);

struct StepOutcome {
  FilmState state;
  bool solved = false;
  double residual = 0.0;  // relative residual of the linear solve
  std::string failure;
};

/// Linearly-implicit backward Euler with mobility frozen at the current
/// state: (I - dt B(u^k) L) u^{k+1} = u^k. Keeps the factorization pattern
/// across calls.
class ImplicitStepper {
 public:
  ImplicitStepper(const GraphGrid& grid, const SolverConfig& cfg);

  /// Non-finite results throw NumericalError; a failed or inaccurate linear
  /// solve is reported through `solved == false`.
  StepOutcome step(const FilmState& state, double dt);

  const SparseMatrix& neg_laplacian() const noexcept { return laplacian_; }

 private:
  const GraphGrid& grid_;
  SolverConfig cfg_;
  Mobility mobility_;
  SparseMatrix laplacian_;
  Eigen::SparseLU<SparseMatrix> solver_;
  bool pattern_ready_ = false;
};

StepOutcome step(const GraphGrid& grid, const FilmState& state, double dt, const SolverConfig& cfg);

struct AdaptDecision {
  bool accept = false;
  double dt_next = 0.0;
  double ratio = 0.0;  // relative change r
};

/// r = ‖u_new - u_old‖∞ / max(‖u_old‖∞, floor); accept iff r <= 2·target and
/// min(u_new) >= -slack; dt_next = dt·clip(target/r, 0.3, 2) clipped into
/// [dt_min, dt_max]. A rejection at dt <= dt_min throws NumericalError.
AdaptDecision adapt_dt(const FilmState& prev, const FilmState& next, double dt, const SolverConfig& cfg);

/// ‖u - K‖∞ <= steady_tol.
bool detect_steady(const FilmState& state, double steady_value, const SolverConfig& cfg);

struct RunObserver {
  /// Called for the initial state and after every accepted step.
  std::function<void(const FilmState&, const DiagnosticsRecord&)> on_record;
};

struct RunResult {
  FilmState final_state;
  std::vector<DiagnosticsRecord> diagnostics;
  double steady_value = 0.0;
  bool reached_steady = false;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t clamp_events = 0;
  double max_linear_residual = 0.0;
  /// Records where E(t_{k+1}) > E(t_k) + 1e-10·E(0).
  std::vector<std::size_t> energy_violations;
};

/// Advances state0 to cfg.t_end (or until steady). state0 is used as given;
/// apply lift_initial beforehand when a regularised start is wanted.
RunResult run(const GraphGrid& grid, const FilmState& state0, const SolverConfig& cfg,
              const RunObserver& observer = {});

}  // namespace filmnet
