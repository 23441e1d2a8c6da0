#pragma once

#include <iosfwd>
#include <vector>

#include "patchflow/grid.hpp"

namespace patchflow {

struct ProjectionConfig {
  double tau = 1.0 / 256.0;
  double tol_mass = 1e-8;
  double tol_constraint = 1e-6;
  double tol_orth = 1e-6;
  int max_iterations = 500;

  void validate() const;
};

struct ProjectionTraceRow {
  int iteration = 0;
  double dual_objective = 0.0;
  double residual = 0.0;
};

struct ProjectionResult {
  ScalarField rho_next;     // in [0, 1]
  ScalarField pressure;     // >= 0
  ScalarField pressure_ct;  // c_tau-transform of pressure
  int iterations = 0;
  double residual = 0.0;
  double duality_gap_estimate = 0.0;
  std::vector<ProjectionTraceRow> trace;
};

enum class ProjectionErrorKind { infeasible_mass, not_converged, invalid_input };

class ProjectionError : public Error {
 public:
  ProjectionError(ProjectionErrorKind kind, double residual, const std::string& what)
      : Error(what), kind_(kind), residual_(residual) {}
  ProjectionErrorKind kind() const { return kind_; }
  double residual() const { return residual_; }

 private:
  ProjectionErrorKind kind_;
  double residual_;
};

/// Exact discrete c_tau-transform over grid nodes with periodic wrap:
/// p^c(x) = min_y p(y) + |x - y|^2 / (2 tau), computed as two separable
/// linear-time lower-envelope passes.
ScalarField c_transform(const ScalarField& p, double tau);

/// Moves each cell's mass along S(x) = x - tau * grad(pressure_ct)(x) and
/// deposits it bilinearly on the four surrounding cells.
ScalarField pushforward_density(const ScalarField& mu, const ScalarField& pressure_ct, double tau);

/// int p^{c_tau} mu dx - int p dx, with the exact discrete c-transform.
double dual_objective(const ScalarField& p, const ScalarField& mu, double tau);

/// Small-tau expansion of the dual, int p (mu - 1) - (tau/2) int |grad p|^2,
/// with the face-difference gradient. This is the functional project()
/// maximises.
double quadratic_dual_objective(const ScalarField& p, const ScalarField& mu, double tau);

/// First-order pushforward used by the solver: mu + tau * Lap_h p.
ScalarField linearized_pushforward(const ScalarField& mu, const ScalarField& p, double tau);

/// Congested JKO step: the density in [0, 1] with the mass of mu closest to
/// mu, together with its pressure. Solves
///   p >= 0,  rho = mu + tau Lap_h p <= 1,  p (1 - rho) = 0
/// by a primal-dual active-set iteration on the dual. `warm_start`, when
/// given, seeds the first active set.
ProjectionResult project(const ScalarField& mu, const ProjectionConfig& cfg, const ScalarField* warm_start = nullptr);

struct VariationalCheck {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// lhs = int grad xi . grad p (face differences), rhs = int xi n_prev rho_prev mu.
/// Throws if xi is not admissible for rho_next (xi >= 0, |xi (1 - rho)| <= tol_orth).
VariationalCheck check_variational_inequality(const ProjectionResult& result, const ScalarField& mu,
                                              const ScalarField& rho_prev, const ScalarField& n_prev,
                                              double tau, const ScalarField& xi, double tol_orth = 1e-6);

void write_projection_trace(const ProjectionResult& result, std::ostream& out);

}  // namespace patchflow
