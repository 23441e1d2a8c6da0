#include "patchflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "patchflow/csv.hpp"
#include "patchflow/field_ops.hpp"
#include "patchflow/geometry.hpp"

namespace patchflow {

void InvariantReport::add(std::string name, double measured, double bound, double tolerance, CheckKind kind,
                          std::string anchor) {
  InvariantEntry e;
  e.name = std::move(name);
  e.measured = measured;
  e.bound = bound;
  e.tolerance = tolerance;
  e.kind = kind;
  e.anchor = std::move(anchor);
  switch (kind) {
    case CheckKind::upper:
      e.pass = measured <= bound + tolerance;
      break;
    case CheckKind::equality:
      e.pass = std::fabs(measured - bound) <= tolerance;
      break;
    case CheckKind::info:
      e.pass = true;
      break;
  }
  entries.push_back(std::move(e));
}

bool InvariantReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const InvariantEntry& e) { return e.pass; });
}

const InvariantEntry* InvariantReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

void InvariantReport::write_csv(std::ostream& out) const {
  out << "name,measured,bound,tolerance,pass,anchor\n";
  for (const auto& e : entries) {
    const char* verdict = e.kind == CheckKind::info ? "info" : (e.pass ? "pass" : "fail");
    out << csv::row({e.name, csv::format(e.measured), csv::format(e.bound), csv::format(e.tolerance), verdict,
                     e.anchor});
  }
}

namespace {

double l1_distance(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::fabs(a.values[k] - b.values[k]);
  return s * a.grid.cell_area();
}

double ring_minimum(const ScalarField& n) {
  const Grid2D& g = n.grid;
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.nx; ++i) m = std::min({m, n.at(i, 0), n.at(i, g.ny - 1)});
  for (int j = 0; j < g.ny; ++j) m = std::min({m, n.at(0, j), n.at(g.nx - 1, j)});
  return m;
}

// Anisotropic TV restricted to faces with both cells inside the ball.
double total_variation_in_ball(const ScalarField& f, double radius) {
  const Grid2D& g = f.grid;
  auto in = [&](int i, int j) { return g.x(i) * g.x(i) + g.y(j) * g.y(j) <= radius * radius; };
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!in(i, j)) continue;
      const int ip = g.wrap_x(i + 1), jp = g.wrap_y(j + 1);
      if (in(ip, j)) s += std::fabs(f.at(ip, j) - f.at(i, j));
      if (in(i, jp)) s += std::fabs(f.at(i, jp) - f.at(i, j));
    }
  return s * g.h;
}

// min |grad p| over pressure-patch cells that touch the patch boundary.
double boundary_gradient_minimum(const ScalarField& p, double tol_orth) {
  const PatchMask mask = extract_patch(p, pressure_threshold(p, tol_orth), PatchMode::greater);
  const Grid2D& g = p.grid;
  auto [gx, gy] = gradient(p);
  double m = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!mask.at(i, j)) continue;
      const bool edge = !mask.at(g.wrap_x(i - 1), j) || !mask.at(g.wrap_x(i + 1), j) ||
                        !mask.at(i, g.wrap_y(j - 1)) || !mask.at(i, g.wrap_y(j + 1));
      if (edge) m = std::min(m, std::hypot(gx.at(i, j), gy.at(i, j)));
    }
  return std::isfinite(m) ? m : 0.0;
}

}  // namespace

InvariantReport check_run(const Trajectory& traj, const RunConfig& cfg) {
  InvariantReport rep;
  if (traj.states.empty()) return rep;
  const auto& S = traj.states;
  const SimState& s0 = S.front();
  const Grid2D& g = s0.rho.grid;
  const double n0 = max_value(s0.n);
  const double lambda = std::max(0.0, min_value(s0.n));
  const double mass0 = integrate(s0.rho);
  const double r0 = support_radius(s0.rho);
  const double tau = cfg.tau;
  const double d = 2.0;
  const double tol_orth = cfg.projection.tol_orth;

  std::vector<double> mass(S.size());
  for (std::size_t k = 0; k < S.size(); ++k) mass[k] = integrate(S[k].rho);
  const double sup_mass = *std::max_element(mass.begin(), mass.end());

  double mass_ratio = 0.0, support_excess = -std::numeric_limits<double>::infinity();
  double nutrient_deficit = 0.0, box = 0.0, neg_p = 0.0, compl_ = 0.0, ring = 0.0, tv_ratio = 0.0;
  const double r_T = r0 * std::exp(cfg.T * n0 / d);
  const double tv0 = total_variation(s0.rho) + total_variation_in_ball(s0.n, r_T);
  for (std::size_t k = 0; k < S.size(); ++k) {
    const SimState& s = S[k];
    const double B = std::exp(s.t * n0) * mass0;
    if (B > 0.0) mass_ratio = std::max(mass_ratio, mass[k] / B);
    support_excess = std::max(support_excess, support_radius(s.rho) - r0 * std::exp(s.t * n0 / d));
    if (lambda > 0.0) {
      const double floor_t = lambda * std::exp(-s.t);
      nutrient_deficit = std::max(nutrient_deficit, (floor_t - min_value(s.n)) / floor_t);
    }
    box = std::max({box, max_value(s.rho) - 1.0, -min_value(s.rho)});
    neg_p = std::max(neg_p, -min_value(s.p));
    for (std::size_t c = 0; c < s.p.size(); ++c)
      compl_ = std::max(compl_, s.p.values[c] * (1.0 - s.rho.values[c]));
    ring = std::max(ring, 1.0 - ring_minimum(s.n) / cfg.nutrient.far_field);
    const double tv = total_variation(s.rho) + total_variation_in_ball(s.n, r_T);
    const double tv_bound = std::exp((2.0 * n0 + 1.0) * s.t) * tv0;
    if (tv_bound > 0.0) tv_ratio = std::max(tv_ratio, tv / tv_bound);
  }

  double equicontinuity = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < S.size(); ++a)
    for (std::size_t b = a + 1; b < S.size(); ++b) {
      const double s = S[b].t - S[a].t;
      const double allowed = (s + 4.0 * tau) * n0 * sup_mass;
      equicontinuity = std::max(equicontinuity, l1_distance(S[b].rho, S[a].rho) - allowed);
    }
  if (S.size() < 2) equicontinuity = 0.0;

  const double sat = 1.0 - 1e-6;
  double expansion = 0.0;
  for (std::size_t k = 0; k + 1 < S.size(); ++k) {
    double defect = 0.0;
    for (std::size_t c = 0; c < S[k].rho.size(); ++c)
      if (S[k].rho.values[c] >= sat && S[k + 1].rho.values[c] < sat) defect += 1.0 - S[k + 1].rho.values[c];
    defect *= g.cell_area();
    if (mass[k] > 0.0) expansion = std::max(expansion, defect / mass[k]);
  }

  rep.add("mass_bound", mass_ratio, 1.0, 0.02, CheckKind::upper, "mass <= B(t) = exp(t |n0|) mass0");
  rep.add("support_radius", support_excess, 2.0 * g.h, 0.0, CheckKind::upper,
          "supp radius - R0 exp(t |n0| / d) <= 2h");
  rep.add("equicontinuity", equicontinuity, 0.0, 1e-12 * std::max(1.0, sup_mass), CheckKind::upper,
          "|rho(t+s) - rho(t)|_1 - (s + 4 tau) |n0| sup mass");
  rep.add("monotone_expansion", expansion, 1e-6, 0.0, CheckKind::upper, "saturated set expands in time");
  rep.add("nutrient_lower_bound", nutrient_deficit, 1e-3, 0.0, CheckKind::upper,
          "relative deficit of min n below lambda exp(-t)");
  rep.add("density_box", box, 0.0, cfg.projection.tol_constraint, CheckKind::upper, "0 <= rho <= 1");
  rep.add("pressure_nonneg", neg_p, 0.0, 0.0, CheckKind::upper, "p >= 0");
  rep.add("complementarity", compl_, 0.0, tol_orth, CheckKind::upper, "p (1 - rho) = 0");
  rep.add("far_field", ring, cfg.nutrient.boundary_guard_tol, 0.0, CheckKind::upper,
          "relative drop of n on the boundary ring");
  rep.add("tv_bound", tv_ratio, 1.0, 1e-12, CheckKind::upper,
          "TV(rho) + TV_B(n) <= exp((2|n0| + 1) t) (TV(rho0) + TV_B(n0))");

  // Trend ratios for the pressure estimates with unknown constants.
  double p_int = 0.0, gp_int = 0.0, p_trend = 0.0, gp_trend = 0.0;
  for (std::size_t k = 1; k < S.size(); ++k) {
    const double dt = S[k].t - S[k - 1].t;
    const double pl2 = lp_norm(S[k].p, Norm::l2);
    p_int += dt * pl2 * pl2;
    gp_int += dt * dirichlet_form(S[k].p, S[k].p);
    const double B = std::exp(S[k].t * n0) * mass0;
    if (B > 0.0 && n0 > 0.0) {
      p_trend = std::max(p_trend, std::sqrt(p_int) / (std::pow(B, (d + 4.0) / (2.0 * d)) * std::sqrt(n0)));
      gp_trend = std::max(gp_trend, std::sqrt(gp_int) / (std::pow(B, (d + 2.0) / (2.0 * d)) * std::sqrt(n0)));
    }
  }
  rep.add("pressure_l2_trend", p_trend, 0.0, 0.0, CheckKind::info, "|p|_L2 / (B^((d+4)/2d) |n0|^(1/2))");
  rep.add("pressure_gradient_trend", gp_trend, 0.0, 0.0, CheckKind::info,
          "|grad p|_L2 / (B^((d+2)/2d) |n0|^(1/2))");
  rep.add("kappa_surrogate", boundary_gradient_minimum(S.back().p, tol_orth), 0.0, 0.0, CheckKind::info,
          "min |grad p| on boundary cells of the pressure patch");
  return rep;
}

namespace {

void require_every_step(const Trajectory& traj, const char* what) {
  for (std::size_t k = 0; k < traj.states.size(); ++k)
    if (traj.states[k].step_index != static_cast<int>(k))
      throw Error(std::string(what) + ": trajectory must store every step (snapshot_every = 1)");
}

void require_compatible(const Trajectory& a, const Trajectory& b, const char* what) {
  if (a.states.size() != b.states.size()) throw Error(std::string(what) + ": trajectories differ in length");
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    if (a.states[k].rho.grid != b.states[k].rho.grid) throw Error(std::string(what) + ": grids differ");
    if (a.states[k].t != b.states[k].t) throw Error(std::string(what) + ": time levels differ");
  }
}

}  // namespace

std::vector<ConvergenceRow> h1_convergence_report(const std::vector<SweepRun>& runs, const Trajectory& reference) {
  std::vector<ConvergenceRow> rows;
  for (const SweepRun& r : runs) {
    require_compatible(*r.traj, reference, "h1_convergence_report");
    const auto& A = r.traj->states;
    const auto& R = reference.states;
    ConvergenceRow row;
    row.D = r.D;
    row.t = A.back().t;
    for (std::size_t k = 1; k < A.size(); ++k) {
      const double dt = A[k].t - A[k - 1].t;
      const ScalarField diff = A[k].p - R[k].p;
      row.grad_p_sq += dt * dirichlet_form(A[k].p, A[k].p);
      row.grad_diff_sq += dt * dirichlet_form(diff, diff);
      row.p_diff_sq += dt * inner(diff, diff);
      row.cross += dt * dirichlet_form(A[k].p, R[k].p);
      row.grad_ref_sq += dt * dirichlet_form(R[k].p, R[k].p);
    }
    rows.push_back(row);
  }
  return rows;
}

void write_h1_csv(const std::vector<ConvergenceRow>& rows, std::ostream& out) {
  out << "D,t,grad_p_sq,grad_diff_sq,p_diff_sq\n";
  for (const auto& r : rows)
    out << csv::row({csv::format(r.D), csv::format(r.t), csv::format(r.grad_p_sq), csv::format(r.grad_diff_sq),
                     csv::format(r.p_diff_sq)});
}

std::vector<HausdorffRow> hausdorff_convergence_report(const std::vector<SweepRun>& runs, const Trajectory& reference,
                                                       const std::vector<double>& times, double tol_orth) {
  auto boundary_at = [&](const Trajectory& traj, double t, double D) {
    const ScalarField& p = interpolant(traj, t).p;
    PatchBoundary b = extract_boundary(extract_patch(p, pressure_threshold(p, tol_orth), PatchMode::greater));
    if (b.empty())
      throw Error("hausdorff_convergence_report: empty boundary at t = " + csv::format(t) + " for D = " +
                  csv::format(D));
    return b;
  };
  std::vector<HausdorffRow> rows;
  for (const SweepRun& r : runs) {
    for (double t : times) {
      const PatchBoundary a = boundary_at(*r.traj, t, r.D);
      const PatchBoundary b = boundary_at(reference, t, 0.0);
      rows.push_back({r.D, t, hausdorff_distance(a, b)});
    }
  }
  return rows;
}

void write_hausdorff_csv(const std::vector<HausdorffRow>& rows, std::ostream& out) {
  out << "D,t,value\n";
  for (const auto& r : rows) out << csv::row({csv::format(r.D), csv::format(r.t), csv::format(r.value)});
}

double TestFunction::phi(double s, double c) const {
  const double u = (s - c) / half_width;
  if (std::fabs(u) >= 1.0) return 0.0;
  const double v = std::cos(0.5 * M_PI * u);
  return v * v * v * v;
}

ScalarField TestFunction::spatial(const Grid2D& g) const {
  return ScalarField::from_function(g, [&](double x, double y) { return phi(x, center.x) * phi(y, center.y); });
}

double TestFunction::theta(double t) const { return std::cos(0.5 * M_PI * t / T); }

double TestFunction::theta_integral(double a, double b) const {
  const double w = 0.5 * M_PI / T;
  return (std::sin(w * b) - std::sin(w * a)) / w;
}

WeakFormResidual weak_form_residual(const Trajectory& traj, const RunConfig& cfg, const TestFunction& psi) {
  require_every_step(traj, "weak_form_residual");
  const auto& S = traj.states;
  const Grid2D& g = S.front().rho.grid;
  const double lo_x = g.origin_x - 0.5 * g.h, hi_x = lo_x + g.length_x();
  const double lo_y = g.origin_y - 0.5 * g.h, hi_y = lo_y + g.length_y();
  if (psi.center.x - psi.half_width <= lo_x + g.h || psi.center.x + psi.half_width >= hi_x - g.h ||
      psi.center.y - psi.half_width <= lo_y + g.h || psi.center.y + psi.half_width >= hi_y - g.h)
    throw Error("weak_form_residual: test function support touches the domain boundary");

  const ScalarField phi = psi.spatial(g);
  const double D = cfg.nutrient.D;
  WeakFormResidual r;
  r.r_rho = -psi.theta(0.0) * inner(phi, S[0].rho);
  r.r_n = -psi.theta(0.0) * inner(phi, S[0].n);
  for (std::size_t k = 0; k + 1 < S.size(); ++k) {
    const SimState& now = S[k];
    const SimState& next = S[k + 1];
    const double th = psi.theta_integral(now.t, next.t);
    const double dth = psi.theta(next.t) - psi.theta(now.t);
    const ScalarField& absorbing =
        cfg.scheme == Scheme::I ? next.rho : S[k == 0 ? 0 : k - 1].rho;
    r.r_rho += th * (dirichlet_form(phi, next.p) - inner(phi, now.n * now.rho)) - dth * inner(phi, next.rho);
    r.r_n += th * (D * dirichlet_form(phi, next.n) + inner(phi, now.n * absorbing)) - dth * inner(phi, next.n);
  }
  return r;
}

}  // namespace patchflow
