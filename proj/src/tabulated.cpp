#include "addyn/tabulated.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "addyn/errors.hpp"

namespace addyn {

namespace {

// Keys cubic convolution weights (a = -1/2) for offsets -1, 0, 1, 2.
void keys_weights(double t, double w[4]) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  w[0] = -0.5 * t3 + t2 - 0.5 * t;
  w[1] = 1.5 * t3 - 2.5 * t2 + 1.0;
  w[2] = -1.5 * t3 + 2.0 * t2 + 0.5 * t;
  w[3] = 0.5 * t3 - 0.5 * t2;
}

// Value at integer index i, extended past both ends with Keys' boundary rule.
double extended_value(const std::vector<double>& v, long i, long stride, long offset,
                      long n) {
  if (i < 0) {
    return 3.0 * v[offset] - 3.0 * v[offset + stride] + v[offset + 2 * stride];
  }
  if (i >= n) {
    const long last = offset + (n - 1) * stride;
    return 3.0 * v[last] - 3.0 * v[last - stride] + v[last - 2 * stride];
  }
  return v[offset + i * stride];
}

double check_uniform(const std::vector<double>& grid) {
  if (grid.size() < 4) {
    throw ConfigError("tabulated grids need at least 4 points");
  }
  const double h = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
  if (!(h > 0.0)) {
    throw ConfigError("tabulated grid must be increasing");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double expected = grid.front() + h * static_cast<double>(i);
    if (std::abs(grid[i] - expected) > 1e-9 * (1.0 + std::abs(expected))) {
      throw ConfigError("tabulated grid must be uniform");
    }
  }
  return h;
}

std::vector<std::vector<double>> read_numeric_rows(const std::string& path,
                                                   std::size_t columns) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open table " + path);
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') {
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream is(line);
    std::vector<double> row;
    double v = 0.0;
    while (is >> v) {
      row.push_back(v);
    }
    if (row.empty()) {
      continue;  // header
    }
    if (row.size() != columns) {
      throw ConfigError("table " + path + ": expected " + std::to_string(columns) +
                        " columns per row");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

TabulatedCurve::TabulatedCurve(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (grid_.size() != values_.size()) {
    throw ConfigError("tabulated curve: grid/value length mismatch");
  }
  step_ = check_uniform(grid_);
}

double TabulatedCurve::operator()(double x) const {
  const long n = static_cast<long>(grid_.size());
  const double s = (x - grid_.front()) / step_;
  long i = static_cast<long>(std::floor(s));
  i = std::clamp(i, 0L, n - 2);
  const double t = s - static_cast<double>(i);
  double w[4];
  keys_weights(t, w);
  double out = 0.0;
  for (int k = 0; k < 4; ++k) {
    out += w[k] * extended_value(values_, i - 1 + k, 1, 0, n);
  }
  return out;
}

TabulatedSurface::TabulatedSurface(std::vector<double> grid,
                                   std::vector<double> values_row_major)
    : grid_(std::move(grid)), values_(std::move(values_row_major)) {
  if (values_.size() != grid_.size() * grid_.size()) {
    throw ConfigError("tabulated surface: expected a square grid of values");
  }
  step_ = check_uniform(grid_);
}

double TabulatedSurface::operator()(double x, double y) const {
  const long n = static_cast<long>(grid_.size());
  auto locate = [&](double v, long& i, double& t) {
    const double s = (v - grid_.front()) / step_;
    i = std::clamp(static_cast<long>(std::floor(s)), 0L, n - 2);
    t = s - static_cast<double>(i);
  };
  long ix = 0, iy = 0;
  double tx = 0.0, ty = 0.0;
  locate(x, ix, tx);
  locate(y, iy, ty);
  double wx[4], wy[4];
  keys_weights(tx, wx);
  keys_weights(ty, wy);

  // Interpolate along y for the four x rows, extending rows past the edges.
  double row_vals[4];
  for (int a = 0; a < 4; ++a) {
    const long r = ix - 1 + a;
    auto row_at = [&](long rr) {
      double acc = 0.0;
      for (int b = 0; b < 4; ++b) {
        acc += wy[b] * extended_value(values_, iy - 1 + b, 1, rr * n, n);
      }
      return acc;
    };
    if (r < 0) {
      row_vals[a] = 3.0 * row_at(0) - 3.0 * row_at(1) + row_at(2);
    } else if (r >= n) {
      row_vals[a] = 3.0 * row_at(n - 1) - 3.0 * row_at(n - 2) + row_at(n - 3);
    } else {
      row_vals[a] = row_at(r);
    }
  }
  double out = 0.0;
  for (int a = 0; a < 4; ++a) {
    out += wx[a] * row_vals[a];
  }
  return out;
}

TabulatedCurve load_curve_csv(const std::string& path) {
  auto rows = read_numeric_rows(path, 2);
  std::vector<double> grid, values;
  for (const auto& r : rows) {
    grid.push_back(r[0]);
    values.push_back(r[1]);
  }
  return TabulatedCurve(std::move(grid), std::move(values));
}

TabulatedSurface load_surface_csv(const std::string& path) {
  auto rows = read_numeric_rows(path, 3);
  std::map<double, std::map<double, double>> table;
  for (const auto& r : rows) {
    table[r[0]][r[1]] = r[2];
  }
  std::vector<double> grid;
  for (const auto& [x, _] : table) {
    grid.push_back(x);
  }
  std::vector<double> values;
  values.reserve(grid.size() * grid.size());
  for (const auto& [x, row] : table) {
    if (row.size() != grid.size()) {
      throw ConfigError("table " + path + ": competition grid is not square");
    }
    for (const auto& [y, v] : row) {
      values.push_back(v);
    }
  }
  return TabulatedSurface(std::move(grid), std::move(values));
}

ModelSpec make_tabulated_model(const CustomModelTables& tables, const TraitSpace& space,
                               double p, double sigma, int K, double u_K, double epsilon) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw DomainError("p must lie in (0, 1]");
  }
  ModelSpec m;
  m.family = "custom";
  m.space = space;
  m.birth = [c = tables.birth](double x) { return c(x); };
  m.death = [c = tables.death](double x) { return c(x); };
  m.competition = [s = tables.competition](double x, double y) { return s(x, y); };
  m.mut_prob = [p](double) { return p; };
  m.kernel = conditioned_gaussian_kernel(space, sigma);
  m.carrying_scale = K;
  m.mut_rate_scale = u_K;
  m.jump_scale = epsilon;
  return m;
}

}  // namespace addyn
