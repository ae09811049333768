#pragma once

#include <cstddef>
#include <functional>
#include <limits>

#include <Eigen/Dense>

namespace addyn {

struct OdeTolerances {
  double abs = 1e-10;
  double rel = 1e-8;
  double initial_step = 1e-3;
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 50'000'000;
};

using OdeRhs = std::function<void(double t, const Eigen::VectorXd& y, Eigen::VectorXd& dydt)>;

/// Embedded Runge-Kutta 5(4) pair of Dormand and Prince with FSAL and
/// standard step-size control.
class DormandPrince {
 public:
  DormandPrince(OdeRhs rhs, Eigen::VectorXd y0, double t0, OdeTolerances tol = {});

  /// Takes one accepted step, never past `t_stop`. Returns the step length.
  double step(double t_stop);

  /// Advances exactly to `t_target` (no-op if already there).
  void advance_to(double t_target);

  double t() const { return t_; }
  const Eigen::VectorXd& y() const { return y_; }
  /// Sum over accepted steps of the max-norm local error estimate.
  double accumulated_error() const { return accumulated_error_; }
  std::size_t steps() const { return steps_; }

  /// Optional hook applied to every accepted state (e.g. clamping).
  std::function<void(Eigen::VectorXd&)> post_step;

 private:
  OdeRhs rhs_;
  Eigen::VectorXd y_;
  double t_;
  OdeTolerances tol_;
  double h_;
  Eigen::VectorXd k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, y_new_, err_;
  double accumulated_error_ = 0.0;
  std::size_t steps_ = 0;
};

}  // namespace addyn
