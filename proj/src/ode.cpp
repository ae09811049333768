#include "addyn/ode.hpp"

#include <algorithm>
#include <cmath>

#include "addyn/errors.hpp"

namespace addyn {

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

DormandPrince::DormandPrince(OdeRhs rhs, Eigen::VectorXd y0, double t0, OdeTolerances tol)
    : rhs_(std::move(rhs)), y_(std::move(y0)), t_(t0), tol_(tol), h_(tol.initial_step) {
  const auto n = y_.size();
  for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &y_new_, &err_}) {
    v->resize(n);
  }
  rhs_(t_, y_, k1_);
}

double DormandPrince::step(double t_stop) {
  if (t_stop <= t_) {
    return 0.0;
  }
  for (;;) {
    if (steps_ >= tol_.max_steps) {
      throw NumericalError("ODE integrator exceeded its step budget");
    }
    double h = std::min({h_, tol_.max_step, t_stop - t_});
    const bool hits_stop = (h >= t_stop - t_);

    tmp_ = y_ + h * a21 * k1_;
    rhs_(t_ + c2 * h, tmp_, k2_);
    tmp_ = y_ + h * (a31 * k1_ + a32 * k2_);
    rhs_(t_ + c3 * h, tmp_, k3_);
    tmp_ = y_ + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
    rhs_(t_ + c4 * h, tmp_, k4_);
    tmp_ = y_ + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
    rhs_(t_ + c5 * h, tmp_, k5_);
    tmp_ = y_ + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
    rhs_(t_ + h, tmp_, k6_);
    y_new_ = y_ + h * (a71 * k1_ + a73 * k3_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
    rhs_(t_ + h, y_new_, k7_);
    err_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);

    double norm = 0.0;
    for (Eigen::Index i = 0; i < y_.size(); ++i) {
      const double sc = tol_.abs + tol_.rel * std::max(std::abs(y_[i]), std::abs(y_new_[i]));
      const double q = err_[i] / sc;
      norm += q * q;
    }
    norm = std::sqrt(norm / std::max<Eigen::Index>(1, y_.size()));
    if (!std::isfinite(norm)) {
      h_ = 0.1 * h;
      if (h_ < 1e-14 * std::max(1.0, std::abs(t_))) {
        throw NumericalError("ODE integrator: non-finite state");
      }
      continue;
    }
    const double factor =
        norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
    if (norm <= 1.0) {
      t_ = hits_stop ? t_stop : t_ + h;
      y_.swap(y_new_);
      if (post_step) {
        post_step(y_);
        rhs_(t_, y_, k1_);
      } else {
        k1_.swap(k7_);
      }
      accumulated_error_ += err_.cwiseAbs().maxCoeff();
      ++steps_;
      // Keep the proposed length when the step was clipped by t_stop.
      if (!hits_stop || factor < 1.0) {
        h_ = h * factor;
      }
      return h;
    }
    h_ = h * std::max(0.2, factor);
    if (h_ < 1e-14 * std::max(1.0, std::abs(t_))) {
      throw NumericalError("ODE integrator: step size underflow");
    }
  }
}

void DormandPrince::advance_to(double t_target) {
  while (t_ < t_target) {
    step(t_target);
  }
}

}  // namespace addyn
