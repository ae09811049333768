#include "addyn/pes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "addyn/errors.hpp"
#include "addyn/fitness.hpp"

namespace addyn {

const char* to_string(PesVariant v) {
  switch (v) {
    case PesVariant::full:
      return "full";
    case PesVariant::killed1:
      return "killed1";
    case PesVariant::killed2:
      return "killed2";
  }
  return "unknown";
}

const char* to_string(KillReason r) {
  switch (r) {
    case KillReason::none:
      return "none";
    case KillReason::coexist_pair:
      return "coexist_pair";
    case KillReason::triple_c_coex:
      return "triple_C_coex";
    case KillReason::lv_nonconvergent:
      return "lv_nonconvergent";
  }
  return "unknown";
}

PesVariant parse_variant(const std::string& s) {
  if (s == "full") {
    return PesVariant::full;
  }
  if (s == "killed1") {
    return PesVariant::killed1;
  }
  if (s == "killed2") {
    return PesVariant::killed2;
  }
  throw ConfigError("unknown PES variant '" + s + "'");
}

double PESState::diameter() const {
  if (support.empty()) {
    return 0.0;
  }
  const auto [lo, hi] = std::minmax_element(support.begin(), support.end());
  return *hi - *lo;
}

PESState monomorphic_state(const ModelSpec& model, Trait x) {
  return PESState{{x}, {monomorphic_equilibrium(model, x)}, KillReason::none};
}

JumpRates pes_jump_rates(const PESState& state, const ModelSpec& model) {
  JumpRates jr;
  if (!state.alive()) {
    return jr;
  }
  for (std::size_t j = 0; j < state.support.size(); ++j) {
    const Trait x = state.support[j];
    const double r = model.mut_prob(x) * model.birth(x) * state.densities[j];
    jr.per_parent.push_back(r);
    jr.total += r;
  }
  return jr;
}

double acceptance_probability(const ModelSpec& model, const PESState& state, Trait y) {
  const double lam = model.birth(y);
  if (!(lam > 0.0)) {
    return 0.0;
  }
  const double f = fitness_d(model, y, state.support, state.densities);
  return std::max(f, 0.0) / lam;
}

PesStepResult pes_step(const ModelSpec& model, const PESState& state, Rng& rng,
                       PesVariant variant, const PesParams& params) {
  PesStepResult res;
  res.state = state;
  const JumpRates rates = pes_jump_rates(state, model);
  if (!(rates.total > 0.0)) {
    res.waiting_time = std::numeric_limits<double>::infinity();
    return res;
  }
  const double eps = model.jump_scale;
  res.waiting_time = exponential(rng, rates.total);
  if (params.rescale_time) {
    res.waiting_time *= eps * eps;
  }

  double u = uniform01(rng) * rates.total;
  std::size_t j = rates.per_parent.size() - 1;
  for (std::size_t i = 0; i < rates.per_parent.size(); ++i) {
    if (u < rates.per_parent[i]) {
      j = i;
      break;
    }
    u -= rates.per_parent[i];
  }
  const Trait parent = state.support[j];
  const double h = model.kernel.sample(parent, rng);
  const Trait y = std::clamp(parent + eps * h, model.space.lower, model.space.upper);

  JumpAnnotation ann;
  ann.parent = parent;
  ann.mutant = y;
  const double accept_u = uniform01(rng);

  const bool is_resident =
      std::find(state.support.begin(), state.support.end(), y) != state.support.end();

  if (!is_resident && variant == PesVariant::killed1 && state.support.size() == 1) {
    const Trait x = state.support[0];
    if (fitness1(model, y, x) > 0.0 && fitness1(model, x, y) > 0.0) {
      ann.killed_reason = KillReason::coexist_pair;
    }
  }
  if (!is_resident && variant == PesVariant::killed2 && state.support.size() == 2) {
    try {
      const auto zv = zeeman_verdict(model, state.support[0], state.support[1], y);
      if (zv.in_c_coex) {
        ann.killed_reason = KillReason::triple_c_coex;
      }
    } catch (const AmbiguousSignError&) {
      // Null set of the (C2) exclusions; treated as outside C_coex.
    }
  }
  if (ann.killed_reason != KillReason::none) {
    res.state = PESState{};
    res.state.killed = ann.killed_reason;
    res.annotation = ann;
    return res;
  }

  if (!is_resident && accept_u < acceptance_probability(model, state, y)) {
    ann.accepted = true;
    const auto inv = invasion_outcome(model, state.support, state.densities, y, params.lv);
    if (const auto* rep = std::get_if<EquilibriumReport>(&inv.outcome)) {
      PESState next;
      for (int i : rep->support) {
        next.support.push_back(inv.traits[static_cast<std::size_t>(i)]);
        next.densities.push_back(rep->point[i]);
      }
      res.state = std::move(next);
    } else {
      ann.killed_reason = KillReason::lv_nonconvergent;
      res.state = PESState{};
      res.state.killed = KillReason::lv_nonconvergent;
    }
  }
  res.annotation = ann;
  return res;
}

JumpTrajectory simulate_pes(const ModelSpec& model, const PESState& initial, double t_end,
                            Rng& rng, PesVariant variant, const PesParams& params) {
  JumpTrajectory traj;
  traj.initial = initial;
  traj.t_end = t_end;
  PESState state = initial;
  double t = 0.0;
  while (state.alive()) {
    auto step = pes_step(model, state, rng, variant, params);
    if (!std::isfinite(step.waiting_time) || t + step.waiting_time > t_end) {
      break;
    }
    t += step.waiting_time;
    state = step.state;
    traj.jumps.push_back(JumpRecord{t, state, *step.annotation});
  }
  return traj;
}

BranchingReport detect_branching(const JumpTrajectory& trajectory, Trait x_star, double eta) {
  BranchingReport rep;
  rep.eta = eta;

  struct Visit {
    double t;
    const PESState* state;
  };
  std::vector<Visit> visits{{0.0, &trajectory.initial}};
  for (const auto& j : trajectory.jumps) {
    if (j.state.support != visits.back().state->support || !j.state.alive()) {
      visits.push_back({j.t, &j.state});
    }
  }

  auto inside_closed = [&](const PESState& s) {
    return std::all_of(s.support.begin(), s.support.end(),
                       [&](Trait x) { return std::abs(x - x_star) <= eta; });
  };
  auto inside_open = [&](const PESState& s) {
    return std::all_of(s.support.begin(), s.support.end(),
                       [&](Trait x) { return std::abs(x - x_star) < eta; });
  };

  std::optional<double> t1;
  double prev_diam = 0.0;
  for (const auto& v : visits) {
    const PESState& s = *v.state;
    if (!s.alive()) {
      break;
    }
    const double diam = s.diameter();
    rep.max_support_diameter = std::max(rep.max_support_diameter, diam);
    if (!rep.theta_eta && !s.support.empty() && inside_open(s)) {
      rep.theta_eta = v.t;
      rep.confined_after_theta = true;
    }
    if (rep.theta_eta && (!inside_open(s) || s.support.size() > 2)) {
      rep.confined_after_theta = false;
    }
    if (rep.occurred) {
      continue;
    }
    if (s.support.size() == 1 && inside_closed(s)) {
      t1 = v.t;
      prev_diam = 0.0;
      continue;
    }
    if (t1) {
      // The state reached at t2 only needs two traits more than eta/2 apart;
      // the window constraint applies strictly between t1 and t2.
      if (s.support.size() == 2 && diam > eta / 2.0 && diam > prev_diam) {
        rep.occurred = true;
        rep.t1 = t1;
        rep.t2 = v.t;
      } else if (inside_closed(s) && s.support.size() <= 2 && diam > prev_diam) {
        prev_diam = diam;
      } else {
        t1.reset();
      }
    }
  }
  return rep;
}

void write_pes_ndjson(std::ostream& out, const JumpTrajectory& trajectory) {
  for (const auto& j : trajectory.jumps) {
    nlohmann::json rec{{"t", j.t},
                       {"support", j.state.support},
                       {"densities", j.state.densities},
                       {"event",
                        {{"parent", j.event.parent},
                         {"mutant", j.event.mutant},
                         {"accepted", j.event.accepted},
                         {"killed_reason", to_string(j.event.killed_reason)}}}};
    out << rec.dump() << '\n';
  }
}

}  // namespace addyn
