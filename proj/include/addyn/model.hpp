#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "addyn/rng.hpp"

namespace addyn {

/// One-dimensional trait. Every analysis in the toolkit works on a compact
/// interval of the real line.
using Trait = double;

/// Compact, convex trait space [lower, upper].
struct TraitSpace {
  double lower = -2.0;
  double upper = 2.0;

  TraitSpace() = default;
  TraitSpace(double lo, double hi);

  bool contains(Trait x) const { return x >= lower && x <= upper; }
  bool interior(Trait x) const { return x > lower && x < upper; }
  double diameter() const { return upper - lower; }
};

/// Law m(x, h) dh of the jump h = mutant - parent.
///
/// `sample` must return h with x + h inside the space. `dominating_density`
/// bounds `density` uniformly in x and has total mass `dominating_mass`;
/// `sample_dominating` draws from the normalised dominating law.
/// `support(x)` returns the (possibly truncated) interval of h values that
/// carry mass; quadratures integrate over it.
struct MutationKernel {
  std::function<double(Trait x, Rng& rng)> sample;
  std::function<double(Trait x, double h)> density;
  std::function<double(double h)> dominating_density;
  std::function<double(Rng& rng)> sample_dominating;
  std::function<std::pair<double, double>(Trait x)> support;
  double dominating_mass = 1.0;
  double scale = 1.0;  ///< typical jump size, used for quadrature truncation
};

/// Closed-form derivatives of f(y; x) on the diagonal, when a model family
/// knows them. Used as ground truth against finite differences.
struct AnalyticDerivatives {
  std::function<double(Trait)> d1;   ///< d/dy f(y; x) at y = x
  std::function<double(Trait)> d11;  ///< d2/dy2 f(y; x) at y = x
  std::function<double(Trait)> d12;
  std::function<double(Trait)> d22;
};

/// Full parameter set of one model instance.
struct ModelSpec {
  TraitSpace space;
  std::function<double(Trait)> birth;                  ///< lambda(x)
  std::function<double(Trait)> death;                  ///< mu(x)
  std::function<double(Trait, Trait)> competition;     ///< alpha(x, y)
  std::function<double(Trait)> mut_prob;               ///< p(x)
  MutationKernel kernel;
  int carrying_scale = 1000;     ///< K
  double mut_rate_scale = 1.0;   ///< u_K
  double jump_scale = 1.0;       ///< epsilon
  std::optional<AnalyticDerivatives> analytic;
  std::string family = "custom";

  double growth(Trait x) const { return birth(x) - death(x); }
};

/// Centered Gaussian N(0, sigma^2) conditioned on x + h staying in `space`.
/// Rejection sampling gives up after `max_retries` draws.
MutationKernel conditioned_gaussian_kernel(const TraitSpace& space, double sigma,
                                           int max_retries = 10000);

struct GaussianExampleParams {
  double sigma_b = 0.9;
  double sigma_alpha = 1.0;
  double sigma = 0.01;
  double p = 0.1;
  int K = 1000;
  double u_K = 1.0;
  double epsilon = 1.0;
};

/// Gaussian birth/competition model on [-2, 2] with mu = 0 and a single
/// optimal trait at 0.
ModelSpec make_gaussian_example(const GaussianExampleParams& params);

struct AuditOptions {
  int grid_points = 1000;
  int kernel_draws = 1000;
  std::uint64_t seed = 1;
};

/// Grid and sampling checks of boundedness, positivity of r, competition
/// bounds, kernel support/domination and two-sided kernel mass. Returns one
/// warning per failed check; an empty vector means every audit passed.
std::vector<std::string> audit_assumptions(const ModelSpec& model,
                                           const AuditOptions& options = {});

}  // namespace addyn
