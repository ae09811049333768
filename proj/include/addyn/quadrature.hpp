#pragma once

#include <functional>
#include <vector>

namespace addyn {

/// n-point Gauss-Legendre rule on [-1, 1]; nodes found by Newton iteration on
/// the Legendre recurrence.
class GaussLegendre {
 public:
  explicit GaussLegendre(int n);

  double integrate(const std::function<double(double)>& f, double a, double b) const;
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Shared 256-node rule.
const GaussLegendre& default_rule();

}  // namespace addyn
