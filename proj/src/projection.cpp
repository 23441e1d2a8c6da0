#include "patchflow/projection.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "patchflow/csv.hpp"
#include "patchflow/field_ops.hpp"
#include "lower_envelope.hpp"

namespace patchflow {

void ProjectionConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error("projection: tau must be positive");
  for (double t : {tol_mass, tol_constraint, tol_orth})
    if (!(t > 0.0) || t > 1e-2) throw Error("projection: tolerances must lie in (0, 1e-2]");
  if (max_iterations < 1) throw Error("projection: max_iterations must be >= 1");
}

ScalarField c_transform(const ScalarField& p, double tau) {
  if (!(tau > 0.0)) throw Error("c_transform: tau must be positive");
  if (!p.all_finite()) throw Error("c_transform: non-finite input");
  const Grid2D& g = p.grid;
  const double a = g.h * g.h / (2.0 * tau);
  ScalarField tmp(g), out(g);
  detail::EnvelopeScratch scratch;
  for (int j = 0; j < g.ny; ++j)
    detail::lower_envelope_periodic(p.values.data() + g.index(0, j), 1, g.nx, a, tmp.values.data() + g.index(0, j),
                                    1, scratch);
  for (int i = 0; i < g.nx; ++i)
    detail::lower_envelope_periodic(tmp.values.data() + i, g.nx, g.ny, a, out.values.data() + i, g.nx, scratch);
  return out;
}

ScalarField pushforward_density(const ScalarField& mu, const ScalarField& pressure_ct, double tau) {
  require_same_grid(mu, pressure_ct, "pushforward_density");
  if (!pressure_ct.all_finite()) throw Error("pushforward_density: non-finite potential");
  const Grid2D& g = mu.grid;
  auto [gx, gy] = gradient(pressure_ct);
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t c = g.index(i, j);
      const double m = mu.values[c];
      if (m == 0.0) continue;
      const double dx = -tau * gx.values[c];
      const double dy = -tau * gy.values[c];
      if (std::fabs(dx) > 0.5 * g.length_x() || std::fabs(dy) > 0.5 * g.length_y())
        throw Error("pushforward_density: displacement exceeds half the domain");
      const double u = i + dx / g.h;
      const double w = j + dy / g.h;
      const double iu = std::floor(u), jw = std::floor(w);
      const double fx = u - iu, fy = w - jw;
      const int i0 = g.wrap_x(static_cast<int>(iu)), i1 = g.wrap_x(static_cast<int>(iu) + 1);
      const int j0 = g.wrap_y(static_cast<int>(jw)), j1 = g.wrap_y(static_cast<int>(jw) + 1);
      out.at(i0, j0) += m * ((1.0 - fx) * (1.0 - fy));
      out.at(i1, j0) += m * (fx * (1.0 - fy));
      out.at(i0, j1) += m * ((1.0 - fx) * fy);
      out.at(i1, j1) += m * (fx * fy);
    }
  }
  return out;
}

double dual_objective(const ScalarField& p, const ScalarField& mu, double tau) {
  require_same_grid(p, mu, "dual_objective");
  return inner(c_transform(p, tau), mu) - integrate(p);
}

double quadratic_dual_objective(const ScalarField& p, const ScalarField& mu, double tau) {
  require_same_grid(p, mu, "quadratic_dual_objective");
  ScalarField excess = mu;
  for (double& v : excess.values) v -= 1.0;
  return inner(p, excess) - 0.5 * tau * dirichlet_form(p, p);
}

ScalarField linearized_pushforward(const ScalarField& mu, const ScalarField& p, double tau) {
  ScalarField lap = laplacian(p);
  ScalarField out(mu.grid);
  for (std::size_t k = 0; k < out.size(); ++k) out.values[k] = mu.values[k] + tau * lap.values[k];
  return out;
}

namespace {

double relative_mass_error(const ScalarField& rho, double mass_mu) {
  const double m = integrate(rho);
  return mass_mu > 0.0 ? std::fabs(m - mass_mu) / mass_mu : std::fabs(m);
}

// max(rho - 1)_+ + max(-p)_+ + relative mass error.
double kkt_residual(const ScalarField& rho, const ScalarField& p, double mass_mu) {
  double over = 0.0, neg = 0.0;
  for (std::size_t k = 0; k < rho.size(); ++k) {
    over = std::max(over, rho.values[k] - 1.0);
    neg = std::max(neg, -p.values[k]);
  }
  return over + neg + relative_mass_error(rho, mass_mu);
}

ScalarField positive_part(const ScalarField& f) {
  ScalarField out = f;
  for (double& v : out.values) v = std::max(v, 0.0);
  return out;
}

// Solves tau * (-Lap_h) p = mu - 1 on the active cells with p = 0 elsewhere.
ScalarField solve_on_active_set(const ScalarField& mu, const std::vector<char>& active, double tau) {
  const Grid2D& g = mu.grid;
  std::vector<int> slot(g.size(), -1);
  int n = 0;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (active[k]) slot[k] = n++;

  const double diag = 4.0 * tau / (g.h * g.h);
  const double off = -tau / (g.h * g.h);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n) * 5);
  Eigen::VectorXd rhs(n);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t c = g.index(i, j);
      const int r = slot[c];
      if (r < 0) continue;
      triplets.emplace_back(r, r, diag);
      const std::size_t nb[4] = {g.index(g.wrap_x(i - 1), j), g.index(g.wrap_x(i + 1), j),
                                 g.index(i, g.wrap_y(j - 1)), g.index(i, g.wrap_y(j + 1))};
      for (std::size_t q : nb)
        if (slot[q] >= 0) triplets.emplace_back(r, slot[q], off);
      rhs[r] = mu.values[c] - 1.0;
    }
  }
  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
  if (ldlt.info() != Eigen::Success)
    throw ProjectionError(ProjectionErrorKind::infeasible_mass, 0.0, "projection: active-set system is singular");
  const Eigen::VectorXd sol = ldlt.solve(rhs);

  ScalarField p(g);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (slot[k] >= 0) p.values[k] = sol[slot[k]];
  return p;
}

}  // namespace

ProjectionResult project(const ScalarField& mu, const ProjectionConfig& cfg, const ScalarField* warm_start) {
  cfg.validate();
  const Grid2D& g = mu.grid;
  if (!mu.all_finite()) throw ProjectionError(ProjectionErrorKind::invalid_input, 0.0, "projection: non-finite mu");
  for (double v : mu.values)
    if (v < 0.0) throw ProjectionError(ProjectionErrorKind::invalid_input, 0.0, "projection: negative mu");
  const double mass_mu = integrate(mu);
  const double area = g.length_x() * g.length_y();
  if (mass_mu >= area * (1.0 - 1e-12))
    throw ProjectionError(ProjectionErrorKind::infeasible_mass, 0.0,
                          "projection: mass of mu exceeds the domain area; no density <= 1 carries it");

  ProjectionResult result;
  if (max_value(mu) <= 1.0) {
    result.rho_next = mu;
    result.pressure = ScalarField(g);
    result.pressure_ct = ScalarField(g);
    return result;
  }

  const double tau = cfg.tau;
  // Newton-consistent scaling of the active-set test: p_i + (rho_i - 1) / K_ii.
  const double c = g.h * g.h / (4.0 * tau);
  ScalarField p(g);
  if (warm_start != nullptr) {
    require_same_grid(mu, *warm_start, "project warm start");
    p = positive_part(*warm_start);
  }

  std::vector<char> active(g.size(), 0), previous;
  ScalarField rho = linearized_pushforward(mu, p, tau);
  double residual = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    std::size_t count = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      active[k] = (p.values[k] + c * (rho.values[k] - 1.0)) > 0.0;
      count += active[k];
    }
    if (count == g.size())
      throw ProjectionError(ProjectionErrorKind::infeasible_mass, residual, "projection: active set covers the torus");
    if (active == previous) {
      converged = true;
      break;
    }
    previous = active;
    p = solve_on_active_set(mu, active, tau);
    rho = linearized_pushforward(mu, p, tau);
    residual = kkt_residual(rho, p, mass_mu);
    result.iterations = it;
    result.trace.push_back({it, quadratic_dual_objective(positive_part(p), mu, tau), residual});
  }

  const double tol = cfg.tol_constraint + cfg.tol_mass;
  if (!converged && residual > tol)
    throw ProjectionError(ProjectionErrorKind::not_converged, residual,
                          "projection: no convergence within max_iterations (residual " + csv::format(residual) + ")");

  // Round-off cleanup; the KKT point is exact up to the linear solve.
  for (std::size_t k = 0; k < g.size(); ++k) {
    p.values[k] = std::max(p.values[k], 0.0);
    rho.values[k] = std::clamp(rho.values[k], 0.0, 1.0);
  }
  result.residual = kkt_residual(rho, p, mass_mu);
  if (result.residual > tol)
    throw ProjectionError(ProjectionErrorKind::not_converged, result.residual,
                          "projection: final residual " + csv::format(result.residual) + " above tolerance");

  ScalarField excess = mu;
  for (double& v : excess.values) v -= 1.0;
  result.duality_gap_estimate = std::fabs(inner(p, excess) - tau * dirichlet_form(p, p));
  result.pressure_ct = c_transform(p, tau);
  result.pressure = std::move(p);
  result.rho_next = std::move(rho);
  return result;
}

VariationalCheck check_variational_inequality(const ProjectionResult& result, const ScalarField& mu,
                                              const ScalarField& rho_prev, const ScalarField& n_prev,
                                              double tau, const ScalarField& xi, double tol_orth) {
  (void)tau;
  require_same_grid(xi, result.rho_next, "check_variational_inequality");
  for (std::size_t k = 0; k < xi.size(); ++k) {
    if (xi.values[k] < 0.0) throw Error("check_variational_inequality: xi must be non-negative");
    if (std::fabs(xi.values[k] * (1.0 - result.rho_next.values[k])) > tol_orth)
      throw Error("check_variational_inequality: xi is not supported on the saturated set");
  }
  VariationalCheck out;
  out.lhs = dirichlet_form(xi, result.pressure);
  out.rhs = inner(xi, n_prev * rho_prev * mu);
  return out;
}

void write_projection_trace(const ProjectionResult& result, std::ostream& out) {
  out << "iteration,dual_objective,residual\n";
  for (const auto& r : result.trace)
    out << csv::row({csv::format(r.iteration), csv::format(r.dual_objective), csv::format(r.residual)});
}

}  // namespace patchflow
