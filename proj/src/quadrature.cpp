#include "addyn/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "addyn/errors.hpp"

namespace addyn {

GaussLegendre::GaussLegendre(int n) : nodes_(static_cast<std::size_t>(n)),
                                      weights_(static_cast<std::size_t>(n)) {
  if (n < 1) {
    throw DomainError("Gauss-Legendre rule needs at least one node");
  }
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) {
        break;
      }
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    nodes_[static_cast<std::size_t>(i)] = -z;
    nodes_[static_cast<std::size_t>(n - 1 - i)] = z;
    weights_[static_cast<std::size_t>(i)] = w;
    weights_[static_cast<std::size_t>(n - 1 - i)] = w;
  }
}

double GaussLegendre::integrate(const std::function<double(double)>& f, double a,
                                double b) const {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    sum += weights_[i] * f(mid + half * nodes_[i]);
  }
  return sum * half;
}

const GaussLegendre& default_rule() {
  static const GaussLegendre rule(256);
  return rule;
}

}  // namespace addyn
