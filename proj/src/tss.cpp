#include "addyn/tss.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "addyn/errors.hpp"
#include "addyn/fitness.hpp"
#include "addyn/ode.hpp"
#include "addyn/quadrature.hpp"

namespace addyn {

double g_function(const ModelSpec& model, Trait y, Trait x) {
  const double lam_y = model.birth(y);
  if (!(lam_y > 0.0)) {
    std::ostringstream os;
    os << "lambda(" << y << ") = " << lam_y << " is not positive";
    throw AssumptionViolation(os.str());
  }
  return model.mut_prob(x) * model.birth(x) * monomorphic_equilibrium(model, x) *
         fitness1(model, y, x) / lam_y;
}

double compute_gamma(const ModelSpec& model, int grid, double safety) {
  const auto& sp = model.space;
  const int n = std::max(grid, 2);
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sp.lower + sp.diameter() * i / (n - 1);
    for (int j = 0; j < n; ++j) {
      const double y = sp.lower + sp.diameter() * j / (n - 1);
      best = std::max(best, g_function(model, y, x));
    }
  }
  return safety * best;
}

Trait TSSPath::at(double t) const {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto idx = it == times.begin() ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
  return traits[idx];
}

TSSPath simulate_tss(const ModelSpec& model, Trait x0, double epsilon, double t_end,
                     Rng& rng, const TssParams& params) {
  if (!model.space.contains(x0)) {
    throw DomainError("TSS start outside the trait space");
  }
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw DomainError("epsilon must lie in (0, 1]");
  }
  const double gamma = params.gamma > 0.0 ? params.gamma : compute_gamma(model);
  TSSPath path;
  path.epsilon = epsilon;
  path.times.push_back(0.0);
  path.traits.push_back(x0);
  if (!(gamma > 0.0)) {
    return path;
  }
  const auto& k = model.kernel;
  const double rate = gamma * k.dominating_mass / (epsilon * epsilon);
  double t = 0.0;
  Trait x = x0;
  for (;;) {
    t += exponential(rng, rate);
    if (t > t_end) {
      break;
    }
    ++path.proposals;
    const double h = k.sample_dominating(rng);
    const double u = uniform01(rng);
    const double m = k.density(x, h);
    if (!(m > 0.0)) {
      continue;
    }
    const Trait y = std::clamp(x + epsilon * h, model.space.lower, model.space.upper);
    const double ratio = std::max(g_function(model, y, x), 0.0) / gamma * m /
                         k.dominating_density(h);
    if (ratio > 1.0) {
      std::ostringstream os;
      os << "TSS thinning ratio " << ratio << " > 1 at x=" << x << ", h=" << h
         << ": dominating bound violated";
      throw AssumptionViolation(os.str());
    }
    if (u < ratio) {
      x = y;
      path.times.push_back(t);
      path.traits.push_back(x);
    }
  }
  return path;
}

double tss_jump_rate(const ModelSpec& model, Trait x, double epsilon) {
  const auto [lo, hi] = model.kernel.support(x);
  auto integrand = [&](double h) {
    const Trait y = std::clamp(x + epsilon * h, model.space.lower, model.space.upper);
    return std::max(g_function(model, y, x), 0.0) * model.kernel.density(x, h);
  };
  // The integrand has a kink at h = 0; integrate each side separately.
  double total = 0.0;
  if (lo < 0.0) {
    total += default_rule().integrate(integrand, lo, std::min(hi, 0.0));
  }
  if (hi > 0.0) {
    total += default_rule().integrate(integrand, std::max(lo, 0.0), hi);
  }
  return total / (epsilon * epsilon);
}

double g_gradient(const ModelSpec& model, Trait x) {
  if (!model.space.contains(x)) {
    throw DomainError("trait outside the trait space");
  }
  // g(y; x) with the trait-space check relaxed so the stencil may straddle
  // the boundary.
  auto g = [&](double y) {
    const double r = model.growth(x);
    const double nbar = r / model.competition(x, x);
    const double f = model.growth(y) - model.competition(y, x) * nbar;
    return model.mut_prob(x) * model.birth(x) * nbar * f / model.birth(y);
  };
  const double step = FdSteps{}.first * (1.0 + std::abs(x));
  return (g(x + step) - g(x - step)) / (2.0 * step);
}

double canonical_drift(const ModelSpec& model, Trait x) {
  const double dg = g_gradient(model, x);
  if (dg == 0.0) {
    return 0.0;
  }
  const auto [lo, hi] = model.kernel.support(x);
  const double a = dg > 0.0 ? std::max(lo, 0.0) : lo;
  const double b = dg > 0.0 ? hi : std::min(hi, 0.0);
  if (!(b > a)) {
    return 0.0;
  }
  const double second_moment = default_rule().integrate(
      [&](double h) { return h * h * model.kernel.density(x, h); }, a, b);
  if (!std::isfinite(second_moment)) {
    std::ostringstream os;
    os << "canonical drift quadrature failed at x=" << x << " on [" << a << ", " << b << "]";
    throw NumericalError(os.str());
  }
  return dg * second_moment;
}

CanonicalSolution solve_canonical(const ModelSpec& model, Trait x0, double t_end, double tol,
                                  int samples) {
  if (!model.space.contains(x0)) {
    throw DomainError("canonical start outside the trait space");
  }
  CanonicalSolution sol;
  sol.drift = [&model](Trait x) { return canonical_drift(model, x); };
  const Trait lo = model.space.lower;
  const Trait hi = model.space.upper;
  OdeRhs rhs = [&](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    dy.resize(1);
    dy[0] = canonical_drift(model, std::clamp(y[0], lo, hi));
  };
  OdeTolerances ot;
  ot.abs = tol;
  ot.rel = tol;
  ot.initial_step = 1e-2;
  DormandPrince solver(rhs, Eigen::VectorXd::Constant(1, x0), 0.0, ot);
  const int n = std::max(samples, 1);
  sol.times.push_back(0.0);
  sol.traits.push_back(x0);
  for (int k = 1; k <= n; ++k) {
    const double tk = t_end * k / n;
    solver.advance_to(tk);
    sol.times.push_back(tk);
    sol.traits.push_back(std::clamp(solver.y()[0], lo, hi));
  }
  sol.error_estimate = solver.accumulated_error();
  return sol;
}

void write_path_csv(std::ostream& out, const ModelSpec& model, const std::vector<double>& grid,
                    const std::function<Trait(double)>& path) {
  out << "time,trait,density\n";
  const auto old = out.precision(12);
  for (double t : grid) {
    const Trait x = path(t);
    out << t << ',' << x << ',' << monomorphic_equilibrium(model, x) << '\n';
  }
  out.precision(old);
}

}  // namespace addyn
