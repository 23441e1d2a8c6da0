#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "patchflow/driver.hpp"

namespace patchflow {

enum class CheckKind { upper, equality, info };

struct InvariantEntry {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;
  CheckKind kind = CheckKind::upper;
  bool pass = true;
  std::string anchor;
};

struct InvariantReport {
  std::vector<InvariantEntry> entries;

  /// pass is measured <= bound + tolerance for upper checks,
  /// |measured - bound| <= tolerance for equality checks, always true for info.
  void add(std::string name, double measured, double bound, double tolerance, CheckKind kind, std::string anchor);
  bool all_pass() const;
  const InvariantEntry* find(const std::string& name) const;
  /// Header name,measured,bound,tolerance,pass,anchor; pass is pass|fail|info.
  void write_csv(std::ostream& out) const;
};

/// Growth, support, regularity and sign checks over a stored trajectory.
InvariantReport check_run(const Trajectory& traj, const RunConfig& cfg);

/// Projection of a 1-D density on cells [i h, (i+1) h) onto {0 <= rho <= 1}
/// in W2, through isotonic regression of its quantile function. Mass that
/// leaves [0, N h) wraps periodically.
std::vector<double> oracle_project_1d(const std::vector<double>& mu, double h);

/// Pool-adjacent-violators: the weighted L2 projection of y onto
/// nondecreasing sequences.
std::vector<double> isotonic_regression(const std::vector<double>& y, const std::vector<double>& w);

/// Brute-force c_tau-transform, O(N^2) over all grid nodes with periodic wrap.
ScalarField brute_force_c_transform(const ScalarField& p, double tau);

struct OracleSuiteResult {
  int instances = 0;
  double worst_projection_l1 = 0.0;  // 2-D project vs oracle_project_1d
  double worst_mass_error = 0.0;     // relative, oracle output
  double worst_c_transform = 0.0;    // max abs vs brute force
  bool pass = true;
};

inline constexpr double kOracleProjectionTol = 1e-3;
inline constexpr double kOracleCTransformTol = 1e-12;

/// `count` seeded random instances of both oracle comparisons. ct_scale
/// multiplies the c-transform under test (mutation hook; 1 in normal use).
OracleSuiteResult run_oracle_suite(std::uint64_t seed, int count, double ct_scale = 1.0);

/// Random y-constant density for the oracle comparisons: piecewise-constant
/// segments in [0, 2] over the middle of an nx-cell line.
std::vector<double> random_profile(std::uint64_t seed, int nx);

/// Extrudes a 1-D profile along y on an nx-by-8 grid of spacing h.
ScalarField extrude_profile(const std::vector<double>& mu, double h);

struct ConvergenceRow {
  double D = 0.0;
  double t = 0.0;
  double grad_p_sq = 0.0;    // int int |grad p_D|^2
  double grad_diff_sq = 0.0; // int int |grad (p_D - p)|^2
  double p_diff_sq = 0.0;    // int int |p_D - p|^2
  double cross = 0.0;        // int int grad p_D . grad p
  double grad_ref_sq = 0.0;  // int int |grad p|^2
};

struct SweepRun {
  double D = 0.0;
  const Trajectory* traj = nullptr;
};

/// Space-time integrals against the D = 0 run over (0, T), using the
/// right-continuous pairing (the pressure of step k+1 on [k tau, (k+1) tau)).
/// `reference` is the D = 0 trajectory; one row per entry of runs.
std::vector<ConvergenceRow> h1_convergence_report(const std::vector<SweepRun>& runs, const Trajectory& reference);
void write_h1_csv(const std::vector<ConvergenceRow>& rows, std::ostream& out);

struct HausdorffRow {
  double D = 0.0;
  double t = 0.0;
  double value = 0.0;
};

/// d_H between the pressure-positivity boundaries of each run and of the
/// D = 0 reference at each requested time.
std::vector<HausdorffRow> hausdorff_convergence_report(const std::vector<SweepRun>& runs, const Trajectory& reference,
                                                       const std::vector<double>& times, double tol_orth);
void write_hausdorff_csv(const std::vector<HausdorffRow>& rows, std::ostream& out);

/// psi(x, y, t) = phi(x) phi(y) theta(t), phi(s) = cos^4(pi (s - c) / (2 a)) on
/// |s - c| < a and 0 elsewhere, theta(t) = cos(pi t / (2 T)).
struct TestFunction {
  Point2 center;
  double half_width = 0.6;
  double T = 0.5;

  double phi(double s, double c) const;
  ScalarField spatial(const Grid2D& g) const;
  double theta(double t) const;
  /// Integral of theta over [a, b].
  double theta_integral(double a, double b) const;
};

struct WeakFormResidual {
  double r_rho = 0.0;
  double r_n = 0.0;
};

/// Residuals of the weak density and nutrient equations for psi, by
/// quadrature on a trajectory stored at every step. The density equation
/// pairs p^{k+1}, rho^{k+1} with the growth n^k rho^k on [k tau, (k+1) tau).
WeakFormResidual weak_form_residual(const Trajectory& traj, const RunConfig& cfg, const TestFunction& psi);

}  // namespace patchflow
