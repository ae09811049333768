#include "addyn/lotka_volterra.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "addyn/errors.hpp"
#include "addyn/fitness.hpp"

namespace addyn {

Eigen::VectorXd LVSystem::per_capita(const Eigen::VectorXd& n) const {
  return growth - interaction * n;
}

Eigen::VectorXd LVSystem::rhs(const Eigen::VectorXd& n) const {
  return n.cwiseProduct(per_capita(n));
}

Eigen::MatrixXd LVSystem::jacobian(const Eigen::VectorXd& n) const {
  Eigen::MatrixXd j = -(n.asDiagonal() * interaction);
  j.diagonal() += per_capita(n);
  return j;
}

LVSystem build_lv(const ModelSpec& model, std::span<const Trait> traits) {
  const auto d = static_cast<Eigen::Index>(traits.size());
  if (d == 0) {
    throw ContractError("build_lv: empty trait list");
  }
  LVSystem s;
  s.traits.assign(traits.begin(), traits.end());
  s.growth.resize(d);
  s.interaction.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!model.space.contains(traits[i])) {
      throw DomainError("build_lv: trait outside the trait space");
    }
    for (Eigen::Index j = 0; j < i; ++j) {
      if (traits[i] == traits[j]) {
        throw ContractError("build_lv: duplicate traits");
      }
    }
    s.growth[i] = model.growth(traits[i]);
    for (Eigen::Index j = 0; j < d; ++j) {
      s.interaction(i, j) = model.competition(traits[i], traits[j]);
    }
  }
  return s;
}

namespace {

void require_nonnegative(const LVSystem& system, const Eigen::VectorXd& n0) {
  if (n0.size() != system.d()) {
    throw ContractError("initial state has the wrong dimension");
  }
  for (Eigen::Index i = 0; i < n0.size(); ++i) {
    if (!(n0[i] >= 0.0)) {
      throw DomainError("initial densities must be nonnegative");
    }
  }
}

OdeRhs make_rhs(const LVSystem& system) {
  return [&system](double, const Eigen::VectorXd& n, Eigen::VectorXd& out) {
    out = system.rhs(n);
  };
}

void clamp_negative(Eigen::VectorXd& n) { n = n.cwiseMax(0.0); }

double lyapunov(const LVSystem& s, const Eigen::VectorXd& n) {
  return 0.5 * n.dot(s.interaction * n) - s.growth.dot(n);
}

Eigen::MatrixXd sub_matrix(const Eigen::MatrixXd& a, const std::vector<int>& idx) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd out(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      out(i, j) = a(idx[i], idx[j]);
    }
  }
  return out;
}

Eigen::VectorXd sub_vector(const Eigen::VectorXd& v, const std::vector<int>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = v[idx[i]];
  }
  return out;
}

// Solves A_II n_I = r_I; throws DegenerateError when ill-conditioned.
Eigen::VectorXd solve_support(const LVSystem& s, const std::vector<int>& support,
                              double max_condition) {
  const Eigen::MatrixXd a = sub_matrix(s.interaction, support);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  const double cond = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1]
                                              : std::numeric_limits<double>::infinity();
  if (!(cond <= max_condition)) {
    std::ostringstream os;
    os << "interaction matrix on the support has condition number " << cond;
    throw DegenerateError(os.str());
  }
  return a.fullPivLu().solve(sub_vector(s.growth, support));
}

}  // namespace

LVTrajectory integrate(const LVSystem& system, const Eigen::VectorXd& n0, double t_end,
                       const OdeTolerances& tol, int samples) {
  require_nonnegative(system, n0);
  DormandPrince solver(make_rhs(system), n0, 0.0, tol);
  solver.post_step = clamp_negative;
  LVTrajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(n0);
  if (samples > 0) {
    for (int k = 1; k <= samples; ++k) {
      const double tk = t_end * static_cast<double>(k) / samples;
      solver.advance_to(tk);
      traj.times.push_back(solver.t());
      traj.states.push_back(solver.y());
    }
  } else {
    while (solver.t() < t_end) {
      solver.step(t_end);
      traj.times.push_back(solver.t());
      traj.states.push_back(solver.y());
    }
  }
  traj.error_estimate = solver.accumulated_error();
  return traj;
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::strongly_stable:
      return "strongly_stable";
    case Stability::unstable:
      return "unstable";
    case Stability::non_hyperbolic:
      return "non_hyperbolic";
  }
  return "unknown";
}

EquilibriumReport classify_equilibrium(const LVSystem& system, const Eigen::VectorXd& point,
                                       double tol) {
  EquilibriumReport rep;
  rep.point = point;
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    if (point[i] > 0.0) {
      rep.support.push_back(static_cast<int>(i));
    }
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(system.jacobian(point), false);
  rep.eigen_real_parts = es.eigenvalues().real();
  bool any_zero = false;
  bool any_positive = false;
  for (Eigen::Index i = 0; i < rep.eigen_real_parts.size(); ++i) {
    const double re = rep.eigen_real_parts[i];
    if (std::abs(re) <= tol) {
      any_zero = true;
    } else if (re > 0.0) {
      any_positive = true;
    }
  }
  rep.stability = any_zero       ? Stability::non_hyperbolic
                  : any_positive ? Stability::unstable
                                 : Stability::strongly_stable;
  return rep;
}

std::optional<Eigen::VectorXd> saturated_equilibrium(const LVSystem& system,
                                                     const std::vector<int>& active) {
  const auto k = static_cast<int>(active.size());
  if (k == 0 || k > 12) {
    return std::nullopt;
  }
  const Eigen::MatrixXd a = sub_matrix(system.interaction, active);
  const double scale = a.cwiseAbs().maxCoeff();
  if (!((a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale)) {
    return std::nullopt;
  }
  if (a.llt().info() != Eigen::Success) {
    return std::nullopt;
  }
  // Minimiser of 1/2 n'An - r'n over the orthant: feasible on its support and
  // with non-positive growth of every absent type.
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    std::vector<int> sub;
    for (int i = 0; i < k; ++i) {
      if (mask & (1u << i)) {
        sub.push_back(active[i]);
      }
    }
    const Eigen::VectorXd nsub =
        sub_matrix(system.interaction, sub).llt().solve(sub_vector(system.growth, sub));
    if ((nsub.array() <= 0.0).any()) {
      continue;
    }
    Eigen::VectorXd n = Eigen::VectorXd::Zero(system.d());
    for (std::size_t i = 0; i < sub.size(); ++i) {
      n[sub[i]] = nsub[static_cast<Eigen::Index>(i)];
    }
    const Eigen::VectorXd g = system.per_capita(n);
    bool saturated = true;
    for (int i = 0; i < k; ++i) {
      if (!(mask & (1u << i)) && g[active[i]] > 1e-12) {
        saturated = false;
        break;
      }
    }
    if (saturated) {
      return n;
    }
  }
  return std::nullopt;
}

LongRunOutcome long_run_limit(const LVSystem& system, const Eigen::VectorXd& n0,
                              const LongRunParams& params) {
  require_nonnegative(system, n0);
  const int d = system.d();

  std::vector<int> active;
  for (int i = 0; i < d; ++i) {
    if (n0[i] > 0.0) {
      active.push_back(i);
    }
  }
  if (active.empty()) {
    return classify_equilibrium(system, n0, params.stability_tol);
  }
  std::optional<Eigen::VectorXd> certified;
  if (params.use_lyapunov) {
    certified = saturated_equilibrium(system, active);
  }

  DormandPrince solver(make_rhs(system), n0, 0.0, params.ode);
  solver.post_step = clamp_negative;

  constexpr int kSamplesPerWindow = 10;
  const double dt = params.window / kSamplesPerWindow;
  std::deque<Eigen::VectorXd> recent{n0};
  double last_v = lyapunov(system, n0);
  bool v_monotone = true;
  std::vector<double> cycle_amplitudes;

  for (long k = 1;; ++k) {
    const double tk = dt * static_cast<double>(k);
    solver.advance_to(tk);
    const Eigen::VectorXd& n = solver.y();
    recent.push_back(n);
    if (static_cast<int>(recent.size()) > kSamplesPerWindow + 1) {
      recent.pop_front();
    }

    if (certified) {
      const double v = lyapunov(system, n);
      if (v > last_v + 1e-12 * (1.0 + std::abs(last_v))) {
        v_monotone = false;
      }
      last_v = v;
      if (v_monotone && tk >= params.certificate_time) {
        auto rep = classify_equilibrium(system, *certified, params.stability_tol);
        rep.lyapunov_certified = true;
        return rep;
      }
    }

    if (static_cast<int>(recent.size()) == kSamplesPerWindow + 1) {
      double motion = 0.0;
      for (int i = 0; i < d; ++i) {
        double lo = recent.front()[i], hi = lo;
        for (const auto& s : recent) {
          lo = std::min(lo, s[i]);
          hi = std::max(hi, s[i]);
        }
        motion = std::max(motion, hi - lo);
      }

      if (motion < params.eps_conv) {
        std::vector<int> support;
        for (int i = 0; i < d; ++i) {
          if (n[i] >= params.eps_extinct) {
            support.push_back(i);
          }
        }
        Eigen::VectorXd point = Eigen::VectorXd::Zero(d);
        bool ok = !support.empty();
        if (ok) {
          const Eigen::VectorXd ns = solve_support(system, support, params.max_condition);
          ok = (ns.array() > 0.0).all();
          for (std::size_t i = 0; i < support.size(); ++i) {
            point[support[i]] = ns[static_cast<Eigen::Index>(i)];
          }
        }
        if (ok) {
          return classify_equilibrium(system, point, params.stability_tol);
        }
      }

      // Oscillation bookkeeping once per window.
      if (tk > params.cycle_after && k % kSamplesPerWindow == 0) {
        double amplitude = 0.0;
        for (int i = 0; i < d; ++i) {
          bool up = false, down = false;
          double lo = recent.front()[i], hi = lo;
          for (std::size_t s = 1; s < recent.size(); ++s) {
            const double delta = recent[s][i] - recent[s - 1][i];
            up |= delta > 0.0;
            down |= delta < 0.0;
            lo = std::min(lo, recent[s][i]);
            hi = std::max(hi, recent[s][i]);
          }
          if (up && down) {
            amplitude = std::max(amplitude, hi - lo);
          }
        }
        if (amplitude > 10.0 * params.eps_conv) {
          cycle_amplitudes.push_back(amplitude);
        } else {
          cycle_amplitudes.clear();
        }
        const auto m = cycle_amplitudes.size();
        const auto w = static_cast<std::size_t>(params.cycle_windows);
        if (m > w && cycle_amplitudes[m - 1] > 0.5 * cycle_amplitudes[m - 1 - w]) {
          return NonConvergent{"cycle", tk, n};
        }
      }
    }

    if (tk >= params.t_max) {
      return NonConvergent{"t_max", tk, n};
    }
  }
}

CoexistenceResult check_coexistence(const ModelSpec& model, std::span<const Trait> traits) {
  const LVSystem sys = build_lv(model, traits);
  CoexistenceResult res;
  if (sys.d() == 1) {
    Eigen::VectorXd p(1);
    p[0] = monomorphic_equilibrium(model, traits[0]);
    res.coexist = true;
    res.equilibrium = classify_equilibrium(sys, p);
    return res;
  }
  if (sys.d() == 2) {
    const double fxy = fitness1(model, traits[0], traits[1]);
    const double fyx = fitness1(model, traits[1], traits[0]);
    res.coexist = fxy > 0.0 && fyx > 0.0;
    if (res.coexist) {
      const auto eq = dimorphic_equilibrium(model, traits[0], traits[1]);
      Eigen::VectorXd p(2);
      p << eq.n1, eq.n2;
      res.equilibrium = classify_equilibrium(sys, p);
    }
    return res;
  }
  std::vector<int> all(static_cast<std::size_t>(sys.d()));
  for (int i = 0; i < sys.d(); ++i) {
    all[static_cast<std::size_t>(i)] = i;
  }
  const Eigen::VectorXd p = solve_support(sys, all, 1e12);
  if ((p.array() > 0.0).all()) {
    res.equilibrium = classify_equilibrium(sys, p);
    res.coexist = res.equilibrium->stability == Stability::strongly_stable;
  }
  return res;
}

InvasionResult invasion_outcome(const ModelSpec& model, std::span<const Trait> residents,
                                std::span<const double> resident_eq, Trait mutant,
                                const LongRunParams& params) {
  if (residents.size() != resident_eq.size()) {
    throw ContractError("invasion_outcome: residents and equilibrium differ in length");
  }
  InvasionResult res;
  res.traits.assign(residents.begin(), residents.end());
  res.traits.push_back(mutant);
  const LVSystem sys = build_lv(model, res.traits);
  Eigen::VectorXd n0(sys.d());
  for (std::size_t i = 0; i < resident_eq.size(); ++i) {
    n0[static_cast<Eigen::Index>(i)] = resident_eq[i];
  }
  n0[sys.d() - 1] = params.eps_init;
  res.outcome = long_run_limit(sys, n0, params);

  if (const auto* rep = std::get_if<EquilibriumReport>(&res.outcome)) {
    std::vector<Trait> survivors;
    std::vector<double> densities;
    for (int i : rep->support) {
      survivors.push_back(res.traits[static_cast<std::size_t>(i)]);
      densities.push_back(rep->point[i]);
    }
    std::ostringstream note;
    if (rep->stability != Stability::strongly_stable) {
      res.b2_ok = false;
      note << "limit is " << to_string(rep->stability) << "; ";
    }
    for (int i = 0; i < sys.d(); ++i) {
      if (rep->point[i] > 0.0) {
        continue;
      }
      const double f = fitness_d(model, res.traits[static_cast<std::size_t>(i)], survivors,
                                 densities);
      if (!(f < 0.0)) {
        res.b2_ok = false;
        note << "dropped trait " << res.traits[static_cast<std::size_t>(i)]
             << " has fitness " << f << " against survivors; ";
      }
    }
    res.audit_note = note.str();
  } else {
    res.b2_ok = false;
    res.audit_note = "long-run limit did not converge";
  }
  return res;
}

namespace {

double checked(double v, double tol, const char* what) {
  if (std::abs(v) <= tol) {
    std::ostringstream os;
    os << "ambiguous sign of " << what << " (" << v << ")";
    throw AmbiguousSignError(os.str());
  }
  return v;
}

std::optional<double> extended3(const ModelSpec& model, Trait z, Trait x, Trait y) {
  try {
    return fitness2_extended(model, z, x, y);
  } catch (const DegenerateError&) {
    return std::nullopt;
  }
}

int sgn(double v) { return v > 0.0 ? 1 : -1; }

}  // namespace

ZeemanVerdict zeeman_verdict(const ModelSpec& model, Trait x, Trait y, Trait z,
                             double sign_tol) {
  ZeemanVerdict v;
  v.f_xy = checked(fitness1(model, x, y), sign_tol, "f(x;y)");
  v.f_yx = checked(fitness1(model, y, x), sign_tol, "f(y;x)");
  v.f_xz = checked(fitness1(model, x, z), sign_tol, "f(x;z)");
  v.f_zx = checked(fitness1(model, z, x), sign_tol, "f(z;x)");
  v.f_yz = checked(fitness1(model, y, z), sign_tol, "f(y;z)");
  v.f_zy = checked(fitness1(model, z, y), sign_tol, "f(z;y)");

  if (v.f_xy > 0.0 && v.f_yx > 0.0) {
    v.f_z_xy = checked(fitness2(model, z, x, y), sign_tol, "f(z;x,y)");
  }
  v.f_x_yz = extended3(model, x, y, z);
  v.f_y_xz = extended3(model, y, x, z);
  if (v.f_x_yz) {
    checked(*v.f_x_yz, sign_tol, "f(x;y,z)");
  }
  if (v.f_y_xz) {
    checked(*v.f_y_xz, sign_tol, "f(y;x,z)");
  }

  v.precondition = v.f_z_xy && *v.f_z_xy > 0.0;
  v.p1 = !v.f_y_xz || (sgn(v.f_xz) == sgn(v.f_zx) && sgn(v.f_zx) == sgn(*v.f_y_xz));
  v.p2 = !v.f_x_yz || (sgn(v.f_yz) == sgn(v.f_zy) && sgn(v.f_zy) == sgn(*v.f_x_yz));
  v.in_c_coex = v.precondition && v.p1 && v.p2;

  if (v.precondition && !v.in_c_coex) {
    const bool z_beats_x = v.f_zx > 0.0 && v.f_xz < 0.0;
    const bool z_beats_y = v.f_zy > 0.0 && v.f_yz < 0.0;
    const bool xz_coexist = v.f_zx > 0.0 && v.f_xz > 0.0;
    const bool yz_coexist = v.f_zy > 0.0 && v.f_yz > 0.0;
    if (z_beats_x && z_beats_y) {
      v.class_hint = 7;
    } else if ((xz_coexist && v.f_y_xz && *v.f_y_xz < 0.0 && z_beats_y) ||
               (yz_coexist && v.f_x_yz && *v.f_x_yz < 0.0 && z_beats_x)) {
      v.class_hint = 9;
    }
  }
  return v;
}

}  // namespace addyn
