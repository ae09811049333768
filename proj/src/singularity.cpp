#include "addyn/singularity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "addyn/errors.hpp"

namespace addyn {

const char* to_string(EsClass c) {
  switch (c) {
    case EsClass::branching:
      return "branching";
    case EsClass::attracting_no_branching:
      return "attracting_no_branching";
    case EsClass::repulsive:
      return "repulsive";
    case EsClass::degenerate:
      return "degenerate";
  }
  return "unknown";
}

EsClass classify_singularity(double a, double c, double tol) {
  if (std::abs(a - c) < tol || std::abs(a) < tol || std::abs(a + c) < tol) {
    return EsClass::degenerate;
  }
  if (a > c) {
    return EsClass::repulsive;
  }
  return a > 0.0 ? EsClass::branching : EsClass::attracting_no_branching;
}

std::optional<bool> coexistence_near_es(const SingularityReport& report, double tol) {
  const double s = report.a + report.c;
  if (std::abs(s) < tol) {
    return std::nullopt;
  }
  return s > 0.0;
}

SingularityReport analyze_singularity(const ModelSpec& model, Trait x_star,
                                      const SingularityOptions& options) {
  SingularityReport rep;
  rep.x_star = x_star;
  const auto fd = fitness_derivatives_fd(model, x_star, options.steps);
  rep.a_fd = fd.d11;
  rep.c_fd = fd.d22;
  rep.d12_fd = fd.d12;
  rep.gradient = selection_gradient(model, x_star, options.steps);
  if (model.analytic && model.analytic->d11 && model.analytic->d22) {
    rep.analytic = true;
    rep.a = model.analytic->d11(x_star);
    rep.c = model.analytic->d22(x_star);
  } else {
    rep.a = rep.a_fd;
    rep.c = rep.c_fd;
  }
  rep.classification = classify_singularity(rep.a, rep.c, options.degeneracy_tol);
  rep.coexistence_nearby = coexistence_near_es(rep, options.degeneracy_tol);
  return rep;
}

std::vector<SingularityReport> find_singularities(const ModelSpec& model,
                                                  const SingularityOptions& options) {
  const auto& sp = model.space;
  const int n = std::max(options.grid, 3);
  auto grad = [&](double x) { return selection_gradient(model, x, options.steps); };
  std::vector<double> xs(static_cast<std::size_t>(n));
  std::vector<double> gs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    xs[static_cast<std::size_t>(i)] = sp.lower + sp.diameter() * i / (n - 1);
    gs[static_cast<std::size_t>(i)] = grad(xs[static_cast<std::size_t>(i)]);
  }
  std::vector<Trait> roots;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (gs[i] == 0.0) {
      roots.push_back(xs[i]);
      continue;
    }
    if (i + 1 < xs.size() && gs[i + 1] != 0.0 && (gs[i] > 0.0) != (gs[i + 1] > 0.0)) {
      double lo = xs[i], hi = xs[i + 1];
      double glo = gs[i];
      while (hi - lo > options.root_tol) {
        const double mid = 0.5 * (lo + hi);
        const double gm = grad(mid);
        if (gm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((gm > 0.0) == (glo > 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
  }
  std::vector<SingularityReport> out;
  for (Trait r : roots) {
    out.push_back(analyze_singularity(model, r, options));
  }
  return out;
}

ExpansionDiagnostics verify_expansions(const ModelSpec& model, const SingularityReport& report,
                                       const std::vector<double>& scales) {
  if (!coexistence_near_es(report)) {
    throw DegenerateError("expansions need a + c != 0");
  }
  const double xs = report.x_star;
  const double a = report.a;
  const double c = report.c;
  // Offsets (in units of the scale) for x, y and z.
  static const double pairs[][2] = {{-1.0, 1.0},  {-1.0, 0.5},  {0.5, -1.0}, {1.0, 0.25},
                                    {-0.5, -1.0}, {0.75, -0.25}, {-0.3, 0.9}, {1.0, 0.6}};
  static const double zs[] = {-1.2, -0.4, 0.2, 0.7, 1.3};

  ExpansionDiagnostics diag;
  diag.scales = scales;
  const double nbar_star = monomorphic_equilibrium(model, xs);
  for (double s : scales) {
    double r2 = 0.0, r3 = 0.0, sum_err = 0.0;
    for (const auto& p : pairs) {
      const double x = xs + p[0] * s;
      const double y = xs + p[1] * s;
      const double f = fitness1(model, y, x);
      const double approx = 0.5 * (x - y) * (c * (x - xs) - a * (y - xs));
      const double den2 = std::abs(x - y) * (std::abs(x - xs) + std::abs(y - xs));
      r2 = std::max(r2, std::abs(f - approx) / den2);

      const auto eq = dimorphic_equilibrium_extended(model, x, y);
      sum_err = std::max(sum_err, std::abs(eq.n1 + eq.n2 - nbar_star) / nbar_star);
      for (double w : zs) {
        const double z = xs + w * s;
        const double den3 = std::abs(z - x) * std::abs(z - y);
        if (den3 == 0.0) {
          continue;
        }
        const double f3 = fitness2_extended(model, z, x, y);
        r3 = std::max(r3, std::abs(f3 - 0.5 * a * (z - x) * (z - y)) / den3);
      }
    }
    diag.r2.push_back(r2);
    diag.r3.push_back(r3);
    diag.sum_rel_error.push_back(sum_err);
  }
  auto strictly_decreasing = [](const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (!(v[i] < v[i - 1])) {
        return false;
      }
    }
    return true;
  };
  diag.r2_decreasing = strictly_decreasing(diag.r2);
  diag.r3_decreasing = strictly_decreasing(diag.r3);

  const double h = FdSteps{}.first * (1.0 + std::abs(xs));
  diag.es_identity_lhs = (model.growth(xs + h) - model.growth(xs - h)) / (2.0 * h);
  const double d1alpha =
      (model.competition(xs + h, xs) - model.competition(xs - h, xs)) / (2.0 * h);
  diag.es_identity_rhs = model.growth(xs) * d1alpha / model.competition(xs, xs);
  return diag;
}

PIPGrid pip(const ModelSpec& model, double lo, double hi, int resolution, double zero_tol) {
  lo = std::max(lo, model.space.lower);
  hi = std::min(hi, model.space.upper);
  if (!(hi > lo) || resolution < 2) {
    throw DomainError("pip: empty window or resolution < 2");
  }
  PIPGrid g;
  g.resolution = resolution;
  for (int i = 0; i < resolution; ++i) {
    g.axis.push_back(lo + (hi - lo) * i / (resolution - 1));
  }
  auto sgn = [zero_tol](double v) { return std::abs(v) <= zero_tol ? 0 : (v > 0.0 ? 1 : -1); };
  g.cells.reserve(static_cast<std::size_t>(resolution) * resolution);
  for (double x : g.axis) {
    for (double y : g.axis) {
      PipCell cell{x, y, 0, 0, false};
      if (x != y) {
        cell.sign_fyx = sgn(fitness1(model, y, x));
        cell.sign_fxy = sgn(fitness1(model, x, y));
      }
      cell.coexist = cell.sign_fyx > 0 && cell.sign_fxy > 0;
      g.cells.push_back(cell);
    }
  }
  return g;
}

BoundarySlopes coexistence_boundary_slopes(const ModelSpec& model, Trait x_star,
                                           double radius) {
  // q(theta) = f(y;x)/(x - y) removes the diagonal zero and keeps the other
  // branch of the contour. With `swap` it is f(x;y)/(y - x) at the same point.
  auto q = [&](double theta, bool swap) {
    double x = x_star + radius * std::cos(theta);
    double y = x_star + radius * std::sin(theta);
    if (swap) {
      std::swap(x, y);
    }
    return fitness1(model, y, x) / (x - y);
  };
  auto root_slope = [&](bool swap) {
    constexpr int kSteps = 3600;
    const double pi = std::numbers::pi;
    const double diag = pi / 4.0;
    double prev_t = 0.0;
    double prev_v = q(prev_t, swap);
    for (int i = 1; i <= kSteps; ++i) {
      double t = pi * i / kSteps;
      if (std::abs(t - diag) < 1e-9) {
        t += 1e-6;
      }
      const double v = q(t, swap);
      if ((v > 0.0) != (prev_v > 0.0)) {
        double lo = prev_t, hi = t, vlo = prev_v;
        for (int it = 0; it < 100 && hi - lo > 1e-14; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double vm = q(mid, swap);
          if ((vm > 0.0) == (vlo > 0.0)) {
            lo = mid;
            vlo = vm;
          } else {
            hi = mid;
          }
        }
        return std::tan(0.5 * (lo + hi));
      }
      prev_t = t;
      prev_v = v;
    }
    throw NumericalError("no non-diagonal zero contour found around the singularity");
  };
  BoundarySlopes out;
  out.fyx_zero = root_slope(false);
  out.fxy_zero = root_slope(true);
  return out;
}

void write_pip_csv(std::ostream& out, const PIPGrid& grid) {
  out << "x,y,sign_fyx,sign_fxy,coexist\n";
  const auto old = out.precision(12);
  for (const auto& c : grid.cells) {
    out << c.x << ',' << c.y << ',' << c.sign_fyx << ',' << c.sign_fxy << ','
        << (c.coexist ? 1 : 0) << '\n';
  }
  out.precision(old);
}

std::string report_to_json(const SingularityReport& r, int indent) {
  nlohmann::json j{{"x_star", r.x_star},
                   {"a", r.a},
                   {"c", r.c},
                   {"analytic", r.analytic},
                   {"a_fd", r.a_fd},
                   {"c_fd", r.c_fd},
                   {"d12_fd", r.d12_fd},
                   {"gradient", r.gradient},
                   {"classification", to_string(r.classification)}};
  if (r.coexistence_nearby) {
    j["coexistence_nearby"] = *r.coexistence_nearby;
  } else {
    j["coexistence_nearby"] = nullptr;
  }
  return j.dump(indent);
}

}  // namespace addyn
