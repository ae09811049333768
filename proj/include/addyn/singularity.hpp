#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "addyn/fitness.hpp"
#include "addyn/model.hpp"

namespace addyn {

enum class EsClass { branching, attracting_no_branching, repulsive, degenerate };

const char* to_string(EsClass c);

struct SingularityReport {
  Trait x_star = 0.0;
  double a = 0.0;  ///< d11 f(x*; x*)
  double c = 0.0;  ///< d22 f(x*; x*)
  bool analytic = false;  ///< a and c taken from closed forms
  double a_fd = 0.0;
  double c_fd = 0.0;
  double d12_fd = 0.0;
  double gradient = 0.0;  ///< d1 f(x*; x*) at the refined root
  EsClass classification = EsClass::degenerate;
  std::optional<bool> coexistence_nearby;  ///< empty when a + c is degenerate
};

struct SingularityOptions {
  int grid = 401;
  double root_tol = 1e-10;
  double degeneracy_tol = 1e-8;
  FdSteps steps;
};

EsClass classify_singularity(double a, double c, double tol = 1e-8);

/// Curvatures and classification at a given singular point.
SingularityReport analyze_singularity(const ModelSpec& model, Trait x_star,
                                      const SingularityOptions& options = {});

/// Grid scan of the selection gradient plus bisection of every sign change.
std::vector<SingularityReport> find_singularities(const ModelSpec& model,
                                                  const SingularityOptions& options = {});

/// Sign of a + c; empty when |a + c| is below `tol` (undetermined case).
std::optional<bool> coexistence_near_es(const SingularityReport& report, double tol = 1e-8);

struct ExpansionDiagnostics {
  std::vector<double> scales;
  std::vector<double> r2;  ///< max normalised remainder of the f(y;x) expansion
  std::vector<double> r3;  ///< same for f(z;x,y)
  std::vector<double> sum_rel_error;  ///< |n1 + n2 - n(x*)| / n(x*)
  bool r2_decreasing = false;
  bool r3_decreasing = false;
  double es_identity_lhs = 0.0;  ///< r'(x*)
  double es_identity_rhs = 0.0;  ///< r(x*) d1 alpha(x*,x*) / alpha(x*,x*)
};

/// Local expansion checks on fixed offset patterns at each scale. Throws
/// DegenerateError when a + c is degenerate.
ExpansionDiagnostics verify_expansions(const ModelSpec& model, const SingularityReport& report,
                                       const std::vector<double>& scales = {0.1, 0.05, 0.025,
                                                                            0.0125});

struct PipCell {
  double x = 0.0;
  double y = 0.0;
  int sign_fyx = 0;
  int sign_fxy = 0;
  bool coexist = false;
};

struct PIPGrid {
  std::vector<double> axis;
  std::vector<PipCell> cells;  ///< row-major in x, then y
  int resolution = 0;
};

/// Signs of f(y;x) and f(x;y) on a resolution x resolution grid over
/// [lo, hi]^2 (clipped to the trait space). Values within `zero_tol` of 0 get
/// sign 0.
PIPGrid pip(const ModelSpec& model, double lo, double hi, int resolution = 400,
            double zero_tol = 1e-12);

struct BoundarySlopes {
  double fyx_zero = 0.0;  ///< slope (y - x*)/(x - x*) of the non-diagonal f(y;x) = 0 branch
  double fxy_zero = 0.0;  ///< slope of the non-diagonal f(x;y) = 0 branch
};

/// Angular root search for the zero contours of f(y;x) and f(x;y) on a small
/// circle of radius `radius` around (x*, x*).
BoundarySlopes coexistence_boundary_slopes(const ModelSpec& model, Trait x_star,
                                           double radius = 1e-3);

void write_pip_csv(std::ostream& out, const PIPGrid& grid);
std::string report_to_json(const SingularityReport& report, int indent = 2);

}  // namespace addyn
