#pragma once

#include <string>
#include <vector>

#include "addyn/model.hpp"

namespace addyn {

/// Uniform-grid cubic convolution interpolant (order 3) on [lower, upper].
class TabulatedCurve {
 public:
  TabulatedCurve(std::vector<double> grid, std::vector<double> values);

  double operator()(double x) const;
  double lower() const { return grid_.front(); }
  double upper() const { return grid_.back(); }

 private:
  std::vector<double> grid_;
  std::vector<double> values_;
  double step_ = 1.0;
};

/// Tensor-product cubic convolution on a uniform square grid.
class TabulatedSurface {
 public:
  TabulatedSurface(std::vector<double> grid, std::vector<double> values_row_major);

  double operator()(double x, double y) const;

 private:
  std::vector<double> grid_;
  std::vector<double> values_;
  double step_ = 1.0;
};

/// Reads "x,value" rows (a leading '#' line or a non-numeric header is skipped).
TabulatedCurve load_curve_csv(const std::string& path);

/// Reads "x,y,value" rows on a square tensor grid.
TabulatedSurface load_surface_csv(const std::string& path);

struct CustomModelTables {
  TabulatedCurve birth;
  TabulatedCurve death;
  TabulatedSurface competition;
};

/// Model built from tabulated lambda/mu/alpha with constant p and a
/// conditioned Gaussian kernel of standard deviation `sigma`.
ModelSpec make_tabulated_model(const CustomModelTables& tables, const TraitSpace& space,
                               double p, double sigma, int K, double u_K, double epsilon);

}  // namespace addyn
