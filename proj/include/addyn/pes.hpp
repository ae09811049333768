#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "addyn/lotka_volterra.hpp"
#include "addyn/model.hpp"
#include "addyn/rng.hpp"

namespace addyn {

enum class PesVariant { full, killed1, killed2 };
enum class KillReason { none, coexist_pair, triple_c_coex, lv_nonconvergent };

const char* to_string(PesVariant v);
const char* to_string(KillReason r);
PesVariant parse_variant(const std::string& s);

/// Support traits with their LV equilibrium densities, or the cemetery state.
struct PESState {
  std::vector<Trait> support;
  std::vector<double> densities;
  KillReason killed = KillReason::none;

  bool alive() const { return killed == KillReason::none; }
  double diameter() const;
};

/// n(x) delta_x.
PESState monomorphic_state(const ModelSpec& model, Trait x);

struct JumpRates {
  std::vector<double> per_parent;  ///< p(x_j) lambda(x_j) n_j
  double total = 0.0;
};

JumpRates pes_jump_rates(const PESState& state, const ModelSpec& model);

/// [f(y; support)]_+ / lambda(y).
double acceptance_probability(const ModelSpec& model, const PESState& state, Trait y);

struct JumpAnnotation {
  Trait parent = 0.0;
  Trait mutant = 0.0;
  bool accepted = false;
  KillReason killed_reason = KillReason::none;
};

struct PesStepResult {
  double waiting_time = 0.0;  ///< infinity when no mutation can occur
  PESState state;
  std::optional<JumpAnnotation> annotation;
};

struct PesParams {
  LongRunParams lv;
  /// Divide waiting times by 1/epsilon^2 (time of the rescaled process).
  bool rescale_time = true;
};

PesStepResult pes_step(const ModelSpec& model, const PESState& state, Rng& rng,
                       PesVariant variant, const PesParams& params = {});

struct JumpRecord {
  double t = 0.0;
  PESState state;  ///< state after the proposal
  JumpAnnotation event;
};

struct JumpTrajectory {
  PESState initial;
  std::vector<JumpRecord> jumps;
  double t_end = 0.0;
};

JumpTrajectory simulate_pes(const ModelSpec& model, const PESState& initial, double t_end,
                            Rng& rng, PesVariant variant, const PesParams& params = {});

struct BranchingReport {
  double eta = 0.0;
  bool occurred = false;
  std::optional<double> t1;
  std::optional<double> t2;
  double max_support_diameter = 0.0;
  /// First time the whole support lies in (x* - eta, x* + eta).
  std::optional<double> theta_eta;
  /// After theta_eta: support stayed in the open window with at most two traits.
  bool confined_after_theta = false;
};

BranchingReport detect_branching(const JumpTrajectory& trajectory, Trait x_star, double eta);

/// One JSON record per proposal:
/// {t, support, densities, event:{parent, mutant, accepted, killed_reason}}.
void write_pes_ndjson(std::ostream& out, const JumpTrajectory& trajectory);

}  // namespace addyn
