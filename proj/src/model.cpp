#include "addyn/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "addyn/errors.hpp"

namespace addyn {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double h, double sigma) {
  const double u = h / sigma;
  return std::exp(-0.5 * u * u) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace

TraitSpace::TraitSpace(double lo, double hi) : lower(lo), upper(hi) {
  if (!(lo < hi)) {
    throw DomainError("trait space needs lower < upper");
  }
}

MutationKernel conditioned_gaussian_kernel(const TraitSpace& space, double sigma,
                                           int max_retries) {
  if (!(sigma > 0.0)) {
    throw DomainError("mutation standard deviation must be positive");
  }
  const double lo = space.lower;
  const double hi = space.upper;
  auto mass_inside = [=](double x) {
    return normal_cdf((hi - x) / sigma) - normal_cdf((lo - x) / sigma);
  };
  // Z(x) is smallest at the endpoints.
  const double min_mass = std::min(mass_inside(lo), mass_inside(hi));

  MutationKernel k;
  k.scale = sigma;
  k.dominating_mass = 1.0 / min_mass;
  k.sample = [=](double x, Rng& rng) {
    std::normal_distribution<double> normal(0.0, sigma);
    for (int i = 0; i < max_retries; ++i) {
      const double h = normal(rng);
      if (x + h >= lo && x + h <= hi) {
        return h;
      }
    }
    throw NumericalError("conditioned Gaussian mutation: retry cap reached");
  };
  k.density = [=](double x, double h) {
    if (x + h < lo || x + h > hi) {
      return 0.0;
    }
    return normal_pdf(h, sigma) / mass_inside(x);
  };
  k.dominating_density = [=](double h) { return normal_pdf(h, sigma) / min_mass; };
  k.sample_dominating = [=](Rng& rng) {
    return std::normal_distribution<double>(0.0, sigma)(rng);
  };
  k.support = [=](double x) {
    return std::pair<double, double>{std::max(lo - x, -8.0 * sigma),
                                     std::min(hi - x, 8.0 * sigma)};
  };
  return k;
}

ModelSpec make_gaussian_example(const GaussianExampleParams& gp) {
  if (!(gp.sigma_b > 0.0) || !(gp.sigma_alpha > 0.0)) {
    throw DomainError("sigma_b and sigma_alpha must be positive");
  }
  if (!(gp.p > 0.0 && gp.p <= 1.0)) {
    throw DomainError("p must lie in (0, 1]");
  }
  if (gp.K < 1 || !(gp.u_K > 0.0 && gp.u_K <= 1.0) ||
      !(gp.epsilon > 0.0 && gp.epsilon <= 1.0)) {
    throw DomainError("need K >= 1, u_K in (0,1], epsilon in (0,1]");
  }
  const double sb2 = gp.sigma_b * gp.sigma_b;
  const double sa2 = gp.sigma_alpha * gp.sigma_alpha;

  ModelSpec m;
  m.family = "gaussian_example";
  m.space = TraitSpace(-2.0, 2.0);
  m.birth = [sb2](double x) { return std::exp(-x * x / (2.0 * sb2)); };
  m.death = [](double) { return 0.0; };
  m.competition = [sa2](double x, double y) {
    const double d = x - y;
    return std::exp(-d * d / (2.0 * sa2));
  };
  const double p = gp.p;
  m.mut_prob = [p](double) { return p; };
  m.kernel = conditioned_gaussian_kernel(m.space, gp.sigma);
  m.carrying_scale = gp.K;
  m.mut_rate_scale = gp.u_K;
  m.jump_scale = gp.epsilon;

  // With mu = 0 and alpha(x,x) = 1, f(y;x) = lambda(y) - A(y-x) lambda(x).
  AnalyticDerivatives ad;
  auto lam = m.birth;
  ad.d1 = [lam, sb2](double x) { return -x / sb2 * lam(x); };
  auto lam2 = [lam, sb2](double x) { return (x * x / (sb2 * sb2) - 1.0 / sb2) * lam(x); };
  ad.d11 = [lam, lam2, sa2](double x) { return lam2(x) + lam(x) / sa2; };
  ad.d12 = [lam, sa2](double x) { return -lam(x) / sa2; };
  ad.d22 = [lam, lam2, sa2](double x) { return lam(x) / sa2 - lam2(x); };
  m.analytic = ad;
  return m;
}

std::vector<std::string> audit_assumptions(const ModelSpec& model,
                                           const AuditOptions& options) {
  std::vector<std::string> warnings;
  const auto& sp = model.space;
  const int n = std::max(options.grid_points, 2);
  auto grid = [&](int i, int count) {
    return sp.lower + sp.diameter() * static_cast<double>(i) / (count - 1);
  };

  double max_birth = 0.0, max_death = 0.0, min_r = std::numeric_limits<double>::infinity();
  double min_r_at = sp.lower;
  bool bad_prob = false;
  for (int i = 0; i < n; ++i) {
    const double x = grid(i, n);
    const double b = model.birth(x);
    const double d = model.death(x);
    if (!std::isfinite(b) || !std::isfinite(d) || b < 0.0 || d < 0.0) {
      std::ostringstream os;
      os << "A1: birth/death not finite and nonnegative at x=" << x;
      warnings.push_back(os.str());
      break;
    }
    max_birth = std::max(max_birth, b);
    max_death = std::max(max_death, d);
    if (b - d < min_r) {
      min_r = b - d;
      min_r_at = x;
    }
    const double p = model.mut_prob(x);
    if (!(p > 0.0 && p <= 1.0)) {
      bad_prob = true;
    }
  }
  if (!(min_r > 0.0)) {
    std::ostringstream os;
    os << "A2: r(x) = lambda - mu is not positive (min " << min_r << " at x=" << min_r_at
       << ")";
    warnings.push_back(os.str());
  }
  if (bad_prob) {
    warnings.emplace_back("p(x) leaves (0, 1] on the audit grid");
  }

  const int side = std::max(2, static_cast<int>(std::sqrt(static_cast<double>(n))));
  double amin = std::numeric_limits<double>::infinity();
  double amax = 0.0;
  for (int i = 0; i < side; ++i) {
    for (int j = 0; j < side; ++j) {
      const double a = model.competition(grid(i, side), grid(j, side));
      amin = std::min(amin, a);
      amax = std::max(amax, a);
    }
  }
  if (!(amin > 0.0) || !std::isfinite(amax)) {
    std::ostringstream os;
    os << "A1/A2: competition not bounded between positive constants (min " << amin
       << ", max " << amax << ")";
    warnings.push_back(os.str());
  }

  Rng rng = make_stream(options.seed, 0);
  std::uniform_real_distribution<double> pick(sp.lower, sp.upper);
  int support_failures = 0;
  int domination_failures = 0;
  for (int i = 0; i < options.kernel_draws; ++i) {
    const double x = pick(rng);
    const double h = model.kernel.sample(x, rng);
    if (!sp.contains(x + h)) {
      ++support_failures;
    }
    const double dens = model.kernel.density(x, h);
    const double dom = model.kernel.dominating_density(h);
    if (dens > dom * (1.0 + 1e-12) + 1e-300) {
      ++domination_failures;
    }
  }
  if (support_failures > 0) {
    warnings.push_back("kernel: " + std::to_string(support_failures) +
                       " sampled mutants left the trait space");
  }
  if (domination_failures > 0) {
    warnings.push_back("A3: kernel density exceeded the dominating density in " +
                       std::to_string(domination_failures) + " draws");
  }

  for (int i = 1; i + 1 < side; ++i) {
    const double x = grid(i, side);
    const auto [lo, hi] = model.kernel.support(x);
    const double probe = 1e-3 * model.kernel.scale;
    if (!(lo < 0.0 && hi > 0.0) || !(model.kernel.density(x, -probe) > 0.0) ||
        !(model.kernel.density(x, probe) > 0.0)) {
      std::ostringstream os;
      os << "A''': kernel lacks mass on one half-line at interior x=" << x;
      warnings.push_back(os.str());
      break;
    }
  }
  return warnings;
}

}  // namespace addyn
