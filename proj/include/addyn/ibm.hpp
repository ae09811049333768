#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "addyn/model.hpp"
#include "addyn/rng.hpp"

namespace addyn {

/// Finite population nu = (1/K) sum count * delta_trait.
struct PopulationState {
  std::map<Trait, long> atoms;  ///< zero-count atoms are never stored
  int K = 1000;

  long individuals() const;
  double total_mass() const { return static_cast<double>(individuals()) / K; }
  void add(Trait x, long count);
};

enum class EventKind { birth_clonal, birth_mutant, death };

const char* to_string(EventKind k);

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::death;
  Trait trait = 0.0;
  std::optional<Trait> mutant;
};

struct StepResult {
  double waiting_time = 0.0;  ///< infinity when the population is extinct
  std::optional<Event> event;
};

/// Exact Gillespie simulation with rates aggregated per trait class.
///
/// Each class keeps sum_y alpha(x, y) count(y), updated in O(#classes) per
/// event; every `rebuild_every` events the sums are recomputed from scratch and
/// the relative drift is recorded.
class IbmProcess {
 public:
  IbmProcess(const ModelSpec& model, const PopulationState& initial, double t0 = 0.0);

  /// One Gillespie event. If the event would fall after `horizon`, the
  /// clock moves to `horizon` and no event is returned (exact by
  /// memorylessness of the waiting time).
  StepResult step(Rng& rng, double horizon = std::numeric_limits<double>::infinity());

  double time() const { return time_; }
  PopulationState state() const;
  bool extinct() const { return classes_.empty(); }
  std::size_t class_count() const { return classes_.size(); }
  std::uint64_t events() const { return events_; }

  double total_rate() const;
  double birth_rate(Trait x) const;
  double death_rate(Trait x) const;
  /// Rebuilds competition sums and returns the largest relative drift.
  double rebuild();
  double max_drift() const { return max_drift_; }

  std::uint64_t rebuild_every = 10000;

 private:
  struct TraitClass {
    Trait x;
    long count;
    double birth;  // lambda(x)
    double death;  // mu(x)
    double mut;    // u_K p(x)
    double comp;   // sum_y alpha(x, y) count(y)
  };

  std::size_t find_or_add(Trait x);
  void change_count(std::size_t i, long delta);
  double class_birth(const TraitClass& c) const;
  double class_death(const TraitClass& c) const;

  const ModelSpec& model_;
  std::vector<TraitClass> classes_;
  std::vector<std::vector<double>> alpha_;  // alpha_[i][j] = alpha(x_i, x_j)
  double time_ = 0.0;
  std::uint64_t events_ = 0;
  double max_drift_ = 0.0;
};

struct Snapshot {
  double time = 0.0;
  PopulationState state;
};

struct IbmOptions {
  int snapshots = 500;
  bool log_events = false;
  std::function<void(double, const PopulationState&)> recorder;
};

struct IbmResult {
  std::vector<Snapshot> snapshots;
  std::vector<Event> log;
  std::uint64_t events = 0;
  bool extinct = false;
  double max_drift = 0.0;
};

/// Runs the process until `t_end`, recording the state on an even grid of
/// `options.snapshots` + 1 times (state in force at each grid time).
IbmResult simulate_ibm(const ModelSpec& model, const PopulationState& initial, double t_end,
                       Rng& rng, const IbmOptions& options = {});

struct FirstMutation {
  std::optional<double> tau;  ///< absent when the population died out first
  std::optional<Trait> parent;
};

/// Starts from round(K n_j) individuals at the coexistence equilibrium of
/// `residents` and runs until the first mutant birth.
FirstMutation first_mutation_time(const ModelSpec& model, std::span<const Trait> residents,
                                  Rng& rng);

/// "time,trait,density" rows, one per atom per snapshot.
void write_trajectory_csv(std::ostream& out, const std::vector<Snapshot>& snapshots);

/// One JSON object per line: {"t", "kind", "trait"[, "mutant"]}.
void write_event_log(std::ostream& out, const std::vector<Event>& log);

}  // namespace addyn
