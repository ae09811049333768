#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "addyn/model.hpp"
#include "addyn/ode.hpp"

namespace addyn {

/// Competitive Lotka-Volterra system dn_i/dt = n_i (r_i - sum_j A_ij n_j).
struct LVSystem {
  std::vector<Trait> traits;
  Eigen::VectorXd growth;       ///< r(x_i)
  Eigen::MatrixXd interaction;  ///< alpha(x_i, x_j)

  int d() const { return static_cast<int>(traits.size()); }
  /// G_i(n) = r_i - (A n)_i
  Eigen::VectorXd per_capita(const Eigen::VectorXd& n) const;
  Eigen::VectorXd rhs(const Eigen::VectorXd& n) const;
  /// J = diag(G(n)) - diag(n) A
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& n) const;
};

LVSystem build_lv(const ModelSpec& model, std::span<const Trait> traits);

struct LVTrajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  double error_estimate = 0.0;  ///< accumulated local error (max norm)
};

/// Adaptive Dormand-Prince integration. `samples` > 0 records that many
/// evenly spaced states after the initial one; 0 records every accepted step.
LVTrajectory integrate(const LVSystem& system, const Eigen::VectorXd& n0, double t_end,
                       const OdeTolerances& tol = {}, int samples = 0);

enum class Stability { strongly_stable, unstable, non_hyperbolic };

const char* to_string(Stability s);

struct EquilibriumReport {
  Eigen::VectorXd point;
  std::vector<int> support;
  Eigen::VectorXd eigen_real_parts;
  Stability stability = Stability::non_hyperbolic;
  /// True when convergence was certified by the Lyapunov function of a
  /// symmetric positive definite interaction matrix.
  bool lyapunov_certified = false;
};

/// Jacobian eigen-analysis of `point` (support = strictly positive entries).
EquilibriumReport classify_equilibrium(const LVSystem& system, const Eigen::VectorXd& point,
                                       double tol = 1e-10);

struct NonConvergent {
  std::string reason;  ///< "t_max" or "cycle"
  double t = 0.0;
  Eigen::VectorXd last_state;
};

using LongRunOutcome = std::variant<EquilibriumReport, NonConvergent>;

struct LongRunParams {
  double window = 10.0;
  double eps_conv = 1e-9;
  double eps_extinct = 1e-8;
  double t_max = 1e5;
  double eps_init = 1e-4;
  double cycle_after = 1e3;
  int cycle_windows = 10;
  double stability_tol = 1e-10;
  double max_condition = 1e12;
  /// Allow early exit through the Lyapunov certificate (symmetric A only).
  bool use_lyapunov = true;
  /// Minimum integration time before a certificate is accepted.
  double certificate_time = 100.0;
  OdeTolerances ode;
};

/// Integrates to the long-run limit, projects extinct coordinates to 0,
/// refines the surviving equilibrium by a linear solve and classifies it.
LongRunOutcome long_run_limit(const LVSystem& system, const Eigen::VectorXd& n0,
                              const LongRunParams& params = {});

/// Unique saturated equilibrium of a system whose interaction matrix is
/// symmetric positive definite, restricted to the coordinates in `active`.
/// Returns nullopt when the matrix does not qualify.
std::optional<Eigen::VectorXd> saturated_equilibrium(const LVSystem& system,
                                                     const std::vector<int>& active);

struct CoexistenceResult {
  bool coexist = false;
  std::optional<EquilibriumReport> equilibrium;  ///< present when interior and feasible
};

CoexistenceResult check_coexistence(const ModelSpec& model, std::span<const Trait> traits);

struct InvasionResult {
  std::vector<Trait> traits;  ///< residents followed by the mutant
  LongRunOutcome outcome;
  bool b2_ok = true;
  std::string audit_note;
};

/// Long-run limit of LV(d+1) started from (resident_eq, eps_init), with an
/// audit that survivors coexist and every dropped trait has negative fitness.
InvasionResult invasion_outcome(const ModelSpec& model, std::span<const Trait> residents,
                                std::span<const double> resident_eq, Trait mutant,
                                const LongRunParams& params = {});

struct ZeemanVerdict {
  bool precondition = false;  ///< x, y coexist and f(z; x, y) > 0
  double f_xy = 0.0, f_yx = 0.0, f_xz = 0.0, f_zx = 0.0, f_yz = 0.0, f_zy = 0.0;
  std::optional<double> f_x_yz;  ///< f(x; y, z)
  std::optional<double> f_y_xz;  ///< f(y; x, z)
  std::optional<double> f_z_xy;  ///< f(z; x, y)
  bool p1 = false;
  bool p2 = false;
  bool in_c_coex = false;
  std::optional<int> class_hint;
};

/// Sign-based classification of LV(3, (x, y, z)). Three-trait fitnesses are
/// taken from the closed form wherever the interaction determinant is
/// non-degenerate. Throws AmbiguousSignError when a computed fitness is
/// within `sign_tol` of zero.
ZeemanVerdict zeeman_verdict(const ModelSpec& model, Trait x, Trait y, Trait z,
                             double sign_tol = 1e-12);

}  // namespace addyn
