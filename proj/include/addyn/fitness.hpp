#pragma once

#include <span>
#include <utility>

#include "addyn/model.hpp"

namespace addyn {

/// n(x) = r(x) / alpha(x, x), the stable equilibrium of the logistic equation.
double monomorphic_equilibrium(const ModelSpec& model, Trait x);

/// Invasion fitness f(y; x) = r(y) - alpha(y, x) n(x).
double fitness1(const ModelSpec& model, Trait y, Trait x);

struct DimorphicEquilibrium {
  double n1 = 0.0;
  double n2 = 0.0;
};

/// Closed-form two-trait equilibrium. Requires f(x;y) f(y;x) > 0.
DimorphicEquilibrium dimorphic_equilibrium(const ModelSpec& model, Trait x, Trait y);

/// Same closed form, defined whenever the interaction determinant is
/// non-degenerate. Coordinates may be negative outside the coexistence region.
DimorphicEquilibrium dimorphic_equilibrium_extended(const ModelSpec& model, Trait x,
                                                    Trait y);

/// f(z; x, y) with the strict definition (requires f(x;y) f(y;x) > 0).
double fitness2(const ModelSpec& model, Trait z, Trait x, Trait y);

/// f(z; x, y) through the extended closed form.
double fitness2_extended(const ModelSpec& model, Trait z, Trait x, Trait y);

/// r(y) - sum_j alpha(y, x_j) n_j.
double fitness_d(const ModelSpec& model, Trait y, std::span<const Trait> residents,
                 std::span<const double> equilibrium);

/// Central-difference steps, scaled by (1 + |x|).
struct FdSteps {
  double first = 1e-5;
  double second = 1e-4;
};

/// Partial derivatives of f(y; x) at the diagonal point (x; x).
struct DiagonalDerivatives {
  double d1 = 0.0;
  double d2 = 0.0;
  double d11 = 0.0;
  double d12 = 0.0;
  double d22 = 0.0;
};

DiagonalDerivatives fitness_derivatives_fd(const ModelSpec& model, Trait x,
                                           const FdSteps& steps = {});

/// Selection gradient d/dy f(y; x) at y = x; analytic if the model ships it.
double selection_gradient(const ModelSpec& model, Trait x, const FdSteps& steps = {});

}  // namespace addyn
