#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

#include "addyn/model.hpp"
#include "addyn/rng.hpp"

namespace addyn {

/// g(y; x) = p(x) lambda(x) n(x) f(y; x) / lambda(y).
double g_function(const ModelSpec& model, Trait y, Trait x);

/// Grid maximum of [g]_+ over the square of the trait space, times `safety`.
double compute_gamma(const ModelSpec& model, int grid = 201, double safety = 1.2);

struct TSSPath {
  std::vector<double> times;  ///< jump times, starting with 0
  std::vector<Trait> traits;  ///< trait after each jump
  double epsilon = 1.0;
  std::uint64_t proposals = 0;

  /// Piecewise-constant value at time t.
  Trait at(double t) const;
};

struct TssParams {
  double gamma = 0.0;  ///< 0 means compute_gamma(model)
};

/// Poisson thinning: proposals at rate gamma * mass(m_bar) / eps^2 on the
/// rescaled clock, jump h from the normalised dominating law, acceptance
/// ([g(x + eps h; x)]_+ / gamma) * m(x, h) / m_bar(h).
TSSPath simulate_tss(const ModelSpec& model, Trait x0, double epsilon, double t_end,
                     Rng& rng, const TssParams& params = {});

/// (1/eps^2) * integral of [g(x + eps h; x)]_+ m(x, h) dh.
double tss_jump_rate(const ModelSpec& model, Trait x, double epsilon);

/// d/dy g(y; x) at y = x by central differences.
double g_gradient(const ModelSpec& model, Trait x);

/// Drift of the canonical equation, integral of h [h dg]_+ m(x, h) dh, by
/// Gauss-Legendre quadrature over the half of the kernel support where
/// h dg > 0.
double canonical_drift(const ModelSpec& model, Trait x);

struct CanonicalSolution {
  std::vector<double> times;
  std::vector<Trait> traits;
  double error_estimate = 0.0;
  std::function<double(Trait)> drift;
};

/// Adaptive integration of dx/dt = canonical_drift(x), sampled at
/// `samples` + 1 evenly spaced times.
CanonicalSolution solve_canonical(const ModelSpec& model, Trait x0, double t_end,
                                  double tol = 1e-10, int samples = 500);

/// Long-format "time,trait,density" rows for a single-trait path, sampled on
/// `grid`; density is n(x).
void write_path_csv(std::ostream& out, const ModelSpec& model, const std::vector<double>& grid,
                    const std::function<Trait(double)>& path);

}  // namespace addyn
