#include "addyn/fitness.hpp"

#include <cmath>
#include <sstream>

#include "addyn/errors.hpp"

namespace addyn {

namespace {

void require_in_space(const ModelSpec& model, Trait x) {
  if (!model.space.contains(x)) {
    std::ostringstream os;
    os << "trait " << x << " outside [" << model.space.lower << ", " << model.space.upper
       << "]";
    throw DomainError(os.str());
  }
}

double equilibrium_unchecked(const ModelSpec& model, Trait x) {
  const double r = model.growth(x);
  if (!(r > 0.0)) {
    std::ostringstream os;
    os << "r(" << x << ") = " << r << " is not positive";
    throw AssumptionViolation(os.str());
  }
  return r / model.competition(x, x);
}

// Evaluates f(y; x) without the trait-space check so that finite-difference
// stencils may straddle the boundary.
double fitness_unchecked(const ModelSpec& model, Trait y, Trait x) {
  return model.growth(y) - model.competition(y, x) * equilibrium_unchecked(model, x);
}

}  // namespace

double monomorphic_equilibrium(const ModelSpec& model, Trait x) {
  require_in_space(model, x);
  return equilibrium_unchecked(model, x);
}

double fitness1(const ModelSpec& model, Trait y, Trait x) {
  require_in_space(model, x);
  require_in_space(model, y);
  return fitness_unchecked(model, y, x);
}

DimorphicEquilibrium dimorphic_equilibrium_extended(const ModelSpec& model, Trait x,
                                                    Trait y) {
  require_in_space(model, x);
  require_in_space(model, y);
  const double axx = model.competition(x, x);
  const double ayy = model.competition(y, y);
  const double axy = model.competition(x, y);
  const double ayx = model.competition(y, x);
  const double det = axx * ayy - axy * ayx;
  if (std::abs(det) < 1e-12 * std::abs(axx * ayy)) {
    std::ostringstream os;
    os << "degenerate interaction determinant " << det << " for traits (" << x << ", "
       << y << ")";
    throw DegenerateError(os.str());
  }
  const double rx = model.growth(x);
  const double ry = model.growth(y);
  return {(rx * ayy - ry * axy) / det, (ry * axx - rx * ayx) / det};
}

DimorphicEquilibrium dimorphic_equilibrium(const ModelSpec& model, Trait x, Trait y) {
  const double fxy = fitness1(model, x, y);
  const double fyx = fitness1(model, y, x);
  if (!(fxy * fyx > 0.0)) {
    std::ostringstream os;
    os << "dimorphic equilibrium needs f(x;y) f(y;x) > 0, got " << fxy << " * " << fyx;
    throw DomainError(os.str());
  }
  return dimorphic_equilibrium_extended(model, x, y);
}

double fitness2(const ModelSpec& model, Trait z, Trait x, Trait y) {
  require_in_space(model, z);
  const auto eq = dimorphic_equilibrium(model, x, y);
  return model.growth(z) - model.competition(z, x) * eq.n1 -
         model.competition(z, y) * eq.n2;
}

double fitness2_extended(const ModelSpec& model, Trait z, Trait x, Trait y) {
  require_in_space(model, z);
  const auto eq = dimorphic_equilibrium_extended(model, x, y);
  return model.growth(z) - model.competition(z, x) * eq.n1 -
         model.competition(z, y) * eq.n2;
}

double fitness_d(const ModelSpec& model, Trait y, std::span<const Trait> residents,
                 std::span<const double> equilibrium) {
  if (residents.size() != equilibrium.size()) {
    throw ContractError("fitness_d: residents and equilibrium differ in length");
  }
  require_in_space(model, y);
  double f = model.growth(y);
  for (std::size_t j = 0; j < residents.size(); ++j) {
    f -= model.competition(y, residents[j]) * equilibrium[j];
  }
  return f;
}

DiagonalDerivatives fitness_derivatives_fd(const ModelSpec& model, Trait x,
                                           const FdSteps& steps) {
  require_in_space(model, x);
  auto f = [&](double y, double xx) { return fitness_unchecked(model, y, xx); };
  const double h1 = steps.first * (1.0 + std::abs(x));
  const double h2 = steps.second * (1.0 + std::abs(x));

  DiagonalDerivatives d;
  d.d1 = (f(x + h1, x) - f(x - h1, x)) / (2.0 * h1);
  d.d2 = (f(x, x + h1) - f(x, x - h1)) / (2.0 * h1);
  const double f0 = f(x, x);
  d.d11 = (f(x + h2, x) - 2.0 * f0 + f(x - h2, x)) / (h2 * h2);
  d.d22 = (f(x, x + h2) - 2.0 * f0 + f(x, x - h2)) / (h2 * h2);
  d.d12 = (f(x + h2, x + h2) - f(x + h2, x - h2) - f(x - h2, x + h2) + f(x - h2, x - h2)) /
          (4.0 * h2 * h2);
  return d;
}

double selection_gradient(const ModelSpec& model, Trait x, const FdSteps& steps) {
  require_in_space(model, x);
  if (model.analytic && model.analytic->d1) {
    return model.analytic->d1(x);
  }
  const double h = steps.first * (1.0 + std::abs(x));
  return (fitness_unchecked(model, x + h, x) - fitness_unchecked(model, x - h, x)) /
         (2.0 * h);
}

}  // namespace addyn
