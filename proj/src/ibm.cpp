#include "addyn/ibm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "addyn/errors.hpp"
#include "addyn/lotka_volterra.hpp"

namespace addyn {

long PopulationState::individuals() const {
  long n = 0;
  for (const auto& [x, c] : atoms) {
    n += c;
  }
  return n;
}

void PopulationState::add(Trait x, long count) {
  if (count < 0) {
    throw ContractError("negative individual count");
  }
  if (count > 0) {
    atoms[x] += count;
  }
}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::birth_clonal:
      return "birth_clonal";
    case EventKind::birth_mutant:
      return "birth_mutant";
    case EventKind::death:
      return "death";
  }
  return "unknown";
}

IbmProcess::IbmProcess(const ModelSpec& model, const PopulationState& initial, double t0)
    : model_(model), time_(t0) {
  for (const auto& [x, c] : initial.atoms) {
    if (!model.space.contains(x)) {
      throw DomainError("initial population has a trait outside the space");
    }
    if (c > 0) {
      change_count(find_or_add(x), c);
    }
  }
}

double IbmProcess::class_birth(const TraitClass& c) const {
  return static_cast<double>(c.count) * c.birth;
}

double IbmProcess::class_death(const TraitClass& c) const {
  return static_cast<double>(c.count) * (c.death + c.comp / model_.carrying_scale);
}

std::size_t IbmProcess::find_or_add(Trait x) {
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (classes_[i].x == x) {
      return i;
    }
  }
  TraitClass c{x, 0, model_.birth(x), model_.death(x),
               model_.mut_rate_scale * model_.mut_prob(x), 0.0};
  std::vector<double> row(classes_.size() + 1);
  for (std::size_t j = 0; j < classes_.size(); ++j) {
    row[j] = model_.competition(x, classes_[j].x);
    alpha_[j].push_back(model_.competition(classes_[j].x, x));
    c.comp += row[j] * static_cast<double>(classes_[j].count);
  }
  row.back() = model_.competition(x, x);
  alpha_.push_back(std::move(row));
  classes_.push_back(c);
  return classes_.size() - 1;
}

void IbmProcess::change_count(std::size_t i, long delta) {
  classes_[i].count += delta;
  const double dd = static_cast<double>(delta);
  for (std::size_t j = 0; j < classes_.size(); ++j) {
    classes_[j].comp += alpha_[j][i] * dd;
  }
  if (classes_[i].count == 0) {
    const std::size_t last = classes_.size() - 1;
    if (i != last) {
      std::swap(classes_[i], classes_[last]);
      std::swap(alpha_[i], alpha_[last]);
      for (auto& row : alpha_) {
        std::swap(row[i], row[last]);
      }
    }
    classes_.pop_back();
    alpha_.pop_back();
    for (auto& row : alpha_) {
      row.pop_back();
    }
  }
}

double IbmProcess::total_rate() const {
  double total = 0.0;
  for (const auto& c : classes_) {
    total += class_birth(c) + class_death(c);
  }
  return total;
}

double IbmProcess::birth_rate(Trait x) const {
  for (const auto& c : classes_) {
    if (c.x == x) {
      return class_birth(c);
    }
  }
  return 0.0;
}

double IbmProcess::death_rate(Trait x) const {
  for (const auto& c : classes_) {
    if (c.x == x) {
      return class_death(c);
    }
  }
  return 0.0;
}

double IbmProcess::rebuild() {
  double drift = 0.0;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    double fresh = 0.0;
    for (std::size_t j = 0; j < classes_.size(); ++j) {
      fresh += model_.competition(classes_[i].x, classes_[j].x) *
               static_cast<double>(classes_[j].count);
    }
    drift = std::max(drift, std::abs(classes_[i].comp - fresh) / std::max(fresh, 1e-300));
    classes_[i].comp = fresh;
  }
  max_drift_ = std::max(max_drift_, drift);
  return drift;
}

StepResult IbmProcess::step(Rng& rng, double horizon) {
  const double total = total_rate();
  StepResult res;
  if (!(total > 0.0)) {
    res.waiting_time = std::numeric_limits<double>::infinity();
    if (std::isfinite(horizon)) {
      time_ = std::max(time_, horizon);
    }
    return res;
  }
  res.waiting_time = exponential(rng, total);
  if (time_ + res.waiting_time > horizon) {
    time_ = horizon;
    return res;
  }
  time_ += res.waiting_time;

  double u = uniform01(rng) * total;
  std::size_t chosen = classes_.size() - 1;
  bool is_birth = false;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    const double b = class_birth(classes_[i]);
    if (u < b) {
      chosen = i;
      is_birth = true;
      break;
    }
    u -= b;
    const double d = class_death(classes_[i]);
    if (u < d) {
      chosen = i;
      break;
    }
    u -= d;
  }

  Event ev;
  ev.time = time_;
  ev.trait = classes_[chosen].x;
  if (is_birth) {
    if (uniform01(rng) < classes_[chosen].mut) {
      const Trait parent = classes_[chosen].x;
      const double h = model_.kernel.sample(parent, rng);
      const Trait y = std::clamp(parent + model_.jump_scale * h, model_.space.lower,
                                 model_.space.upper);
      ev.kind = EventKind::birth_mutant;
      ev.mutant = y;
      change_count(find_or_add(y), 1);
    } else {
      ev.kind = EventKind::birth_clonal;
      change_count(chosen, 1);
    }
  } else {
    ev.kind = EventKind::death;
    change_count(chosen, -1);
  }
  res.event = ev;
  if (++events_ % rebuild_every == 0) {
    rebuild();
  }
  return res;
}

PopulationState IbmProcess::state() const {
  PopulationState s;
  s.K = model_.carrying_scale;
  for (const auto& c : classes_) {
    s.atoms[c.x] = c.count;
  }
  return s;
}

IbmResult simulate_ibm(const ModelSpec& model, const PopulationState& initial, double t_end,
                       Rng& rng, const IbmOptions& options) {
  if (!(t_end > 0.0)) {
    throw DomainError("t_end must be positive");
  }
  IbmProcess proc(model, initial);
  IbmResult res;
  const int count = std::max(options.snapshots, 1);
  auto record = [&](double t) {
    Snapshot s{t, proc.state()};
    if (options.recorder) {
      options.recorder(t, s.state);
    }
    res.snapshots.push_back(std::move(s));
  };
  record(0.0);

  for (int k = 1; k <= count; ++k) {
    const double grid_t = t_end * static_cast<double>(k) / count;
    while (proc.time() < grid_t) {
      const auto step = proc.step(rng, grid_t);
      if (!step.event) {
        break;
      }
      if (options.log_events) {
        res.log.push_back(*step.event);
      }
    }
    record(grid_t);
  }
  res.events = proc.events();
  res.extinct = proc.extinct();
  res.max_drift = proc.max_drift();
  return res;
}

FirstMutation first_mutation_time(const ModelSpec& model, std::span<const Trait> residents,
                                  Rng& rng) {
  const auto coex = check_coexistence(model, residents);
  if (!coex.coexist || !coex.equilibrium) {
    throw ContractError("first_mutation_time: residents do not coexist");
  }
  PopulationState init;
  init.K = model.carrying_scale;
  for (std::size_t i = 0; i < residents.size(); ++i) {
    init.add(residents[i],
             std::lround(model.carrying_scale * coex.equilibrium->point[static_cast<long>(i)]));
  }
  IbmProcess proc(model, init);
  FirstMutation out;
  for (;;) {
    const auto step = proc.step(rng);
    if (!step.event) {
      return out;
    }
    if (step.event->kind == EventKind::birth_mutant) {
      out.tau = step.event->time;
      out.parent = step.event->trait;
      return out;
    }
  }
}

void write_trajectory_csv(std::ostream& out, const std::vector<Snapshot>& snapshots) {
  out << "time,trait,density\n";
  const auto old = out.precision(12);
  for (const auto& s : snapshots) {
    for (const auto& [x, c] : s.state.atoms) {
      out << s.time << ',' << x << ',' << static_cast<double>(c) / s.state.K << '\n';
    }
  }
  out.precision(old);
}

void write_event_log(std::ostream& out, const std::vector<Event>& log) {
  for (const auto& e : log) {
    nlohmann::json j{{"t", e.time}, {"kind", to_string(e.kind)}, {"trait", e.trait}};
    if (e.mutant) {
      j["mutant"] = *e.mutant;
    }
    out << j.dump() << '\n';
  }
}

}  // namespace addyn
