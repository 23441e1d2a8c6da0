#include "patchflow/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "patchflow/csv.hpp"
#include "patchflow/field_ops.hpp"
#include "patchflow/geometry.hpp"
#include "patchflow/snapshot.hpp"

namespace patchflow {

namespace {

ScalarField load_on_grid(const std::string& path, const Grid2D& g, const char* what) {
  Snapshot s = read_snapshot_file(path);
  if (s.field.grid.nx != g.nx || s.field.grid.ny != g.ny || s.field.grid.h != g.h)
    throw ConfigError(std::string(what) + ": snapshot " + path + " does not match the configured grid");
  return ScalarField(g, std::move(s.field.values));
}

bool inside(Point2 c, double r, double x, double y) {
  const double dx = x - c.x, dy = y - c.y;
  return dx * dx + dy * dy <= r * r;
}

}  // namespace

ScalarField DensityShape::rasterize(const Grid2D& g) const {
  switch (kind) {
    case Kind::disk:
      return ScalarField::from_function(g, [&](double x, double y) { return inside(center, radius, x, y) ? 1.0 : 0.0; });
    case Kind::annulus:
      return ScalarField::from_function(g, [&](double x, double y) {
        return inside(center, outer_radius, x, y) && !inside(center, inner_radius, x, y) ? 1.0 : 0.0;
      });
    case Kind::union_of_disks:
      return ScalarField::from_function(g, [&](double x, double y) {
        for (const Disk& d : disks)
          if (inside(d.center, d.radius, x, y)) return 1.0;
        return 0.0;
      });
    case Kind::file:
      return load_on_grid(path, g, "initial density");
  }
  throw Error("unknown density shape");
}

ScalarField NutrientInit::build(const Grid2D& g) const {
  if (from_file) return load_on_grid(path, g, "initial nutrient");
  return ScalarField(g, value);
}

int RunConfig::steps() const { return static_cast<int>(std::ceil(T / tau - 1e-9)); }

ProjectionConfig RunConfig::projection_config() const {
  ProjectionConfig p = projection;
  p.tau = tau;
  return p;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (!(tau > 0.0) || !std::isfinite(tau)) fail("run.tau must be positive");
  if (!(T >= tau) || !std::isfinite(T)) fail("run.T must be >= run.tau");
  if (b != 0.0) fail("run.b must be 0: the death term is not supported");
  if (snapshot_every < 1) fail("run.snapshot_every must be >= 1");
  if (name.empty() || name.find('/') != std::string::npos) fail("run.name must be a non-empty plain name");
  try {
    projection_config().validate();
    nutrient.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(e.what());
  }
  if (initial_density.kind == DensityShape::Kind::annulus &&
      !(initial_density.inner_radius >= 0.0 && initial_density.outer_radius > initial_density.inner_radius))
    fail("annulus radii must satisfy 0 <= inner < outer");
  if (initial_density.kind == DensityShape::Kind::union_of_disks && initial_density.disks.empty())
    fail("union_of_disks needs at least one disk");

  ScalarField rho0, n0;
  try {
    rho0 = initial_density.rasterize(grid);
    n0 = initial_nutrient.build(grid);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(e.what());
  }
  for (double v : rho0.values)
    if (!(v >= 0.0 && v <= 1.0 + kClipEpsilon)) fail("initial density must take values in [0, 1]");
  for (double v : n0.values)
    if (!(v >= 0.0)) fail("initial nutrient must be non-negative");

  const double r0 = support_radius(rho0);
  const double r_T = r0 * std::exp(T * max_value(n0) / 2.0);
  const double half_width = 0.5 * std::min(grid.length_x(), grid.length_y());
  if (!(half_width > r_T))
    fail("box half-width " + csv::format(half_width) + " is not larger than the support-radius bound R(T) = " +
         csv::format(r_T) + " (R0 exp(T |n0|_inf / 2)); enlarge grid.half_width or shorten run.T");
}

SimState initial_state(const RunConfig& cfg) {
  SimState s;
  s.rho = cfg.initial_density.rasterize(cfg.grid);
  s.n = cfg.initial_nutrient.build(cfg.grid);
  s.p = ScalarField(cfg.grid);
  s.rho_lag = s.rho;
  return s;
}

SeriesRow series_row(const SimState& s) {
  SeriesRow r;
  r.t = s.t;
  r.mass = integrate(s.rho);
  r.max_rho = max_value(s.rho);
  r.p_l2 = lp_norm(s.p, Norm::l2);
  r.grad_p_l2 = gradient_l2(s.p);
  r.support_radius = support_radius(s.rho);
  r.n_min = min_value(s.n);
  return r;
}

SimState step(const SimState& state, const RunConfig& cfg) {
  const double tau = cfg.tau;
  ScalarField mu(state.rho.grid);
  for (std::size_t k = 0; k < mu.size(); ++k) mu.values[k] = state.rho.values[k] * (1.0 + tau * state.n.values[k]);
  const ScalarField* warm = state.p.size() == mu.size() ? &state.p : nullptr;
  ProjectionResult pr = project(mu, cfg.projection_config(), warm);

  SimState next;
  next.t = state.t + tau;
  next.step_index = state.step_index + 1;
  if (cfg.scheme == Scheme::I) {
    next.n = scheme1_nutrient_step(state.n, pr.rho_next, tau, cfg.nutrient);
  } else {
    const ScalarField& lag = state.rho_lag.size() == mu.size() ? state.rho_lag : state.rho;
    next.n = scheme2_interval_solve(state.n, lag, tau, cfg.nutrient);
  }
  const FarFieldCheck guard = far_field_guard(next.n, cfg.nutrient);
  if (!guard.pass)
    throw FarFieldError(guard.minimum, "far-field guard failed at step " + std::to_string(next.step_index) +
                                           ": boundary minimum " + csv::format(guard.minimum));
  next.rho_lag = state.rho;
  next.rho = std::move(pr.rho_next);
  next.p = std::move(pr.pressure);
  return next;
}

std::vector<int> snapshot_steps(const RunConfig& cfg) {
  std::vector<int> out;
  const int n = cfg.steps();
  for (int k = 0; k <= n; k += cfg.snapshot_every) out.push_back(k);
  if (out.back() != n) out.push_back(n);
  return out;
}

Trajectory run(const RunConfig& cfg) {
  cfg.validate();
  Trajectory traj;
  SimState s = initial_state(cfg);
  auto store = [&traj](const SimState& st) {
    traj.states.push_back(st);
    traj.states.back().rho_lag = ScalarField();
  };
  store(s);
  traj.series.push_back(series_row(s));
  const int n = cfg.steps();
  for (int k = 1; k <= n; ++k) {
    try {
      s = step(s, cfg);
    } catch (const Error& e) {
      traj.valid = false;
      traj.error = "step " + std::to_string(k) + ": " + e.what();
      return traj;
    }
    traj.series.push_back(series_row(s));
    if (k % cfg.snapshot_every == 0 || k == n) store(s);
  }
  return traj;
}

const SimState& interpolant(const Trajectory& traj, double t) {
  if (traj.states.empty()) throw Error("interpolant: empty trajectory");
  const double t_end = traj.states.back().t;
  const double slack = 1e-12 * std::max(1.0, t_end);
  if (!(t >= -slack) || !(t <= t_end + slack)) throw Error("interpolant: t outside [0, T]");
  std::size_t best = 0;
  for (std::size_t k = 0; k < traj.states.size(); ++k)
    if (traj.states[k].t <= t + slack) best = k;
  return traj.states[best];
}

std::string snapshot_name(int step, const char* field) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snap_%06d_%s.tpf", step, field);
  return buf;
}

void write_series(const std::vector<SeriesRow>& rows, std::ostream& out) {
  out << "t,mass,max_rho,p_l2,grad_p_l2,support_radius,n_min\n";
  for (const SeriesRow& r : rows)
    out << csv::row({csv::format(r.t), csv::format(r.mass), csv::format(r.max_rho), csv::format(r.p_l2),
                     csv::format(r.grad_p_l2), csv::format(r.support_radius), csv::format(r.n_min)});
}

void write_trajectory(const Trajectory& traj, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const SimState& s : traj.states) {
    write_snapshot_file(s.rho, FieldRole::density, s.t, dir / snapshot_name(s.step_index, "rho"));
    write_snapshot_file(s.n, FieldRole::nutrient, s.t, dir / snapshot_name(s.step_index, "n"));
    write_snapshot_file(s.p, FieldRole::pressure, s.t, dir / snapshot_name(s.step_index, "p"));
  }
  std::ofstream out(dir / "series.csv", std::ios::binary);
  if (!out) throw Error("cannot write " + (dir / "series.csv").string());
  write_series(traj.series, out);
}

Trajectory read_trajectory(const std::filesystem::path& dir, const RunConfig& cfg) {
  if (!std::filesystem::is_directory(dir)) throw Error("trajectory directory not found: " + dir.string());
  Trajectory traj;
  for (int k : snapshot_steps(cfg)) {
    SimState s;
    s.step_index = k;
    const std::pair<const char*, ScalarField*> fields[] = {{"rho", &s.rho}, {"n", &s.n}, {"p", &s.p}};
    for (const auto& [name, dst] : fields) {
      const std::filesystem::path path = dir / snapshot_name(k, name);
      if (!std::filesystem::exists(path))
        throw Error("missing snapshot for step " + std::to_string(k) + ": " + path.filename().string());
      Snapshot snap = read_snapshot_file(path);
      if (snap.field.grid.nx != cfg.grid.nx || snap.field.grid.ny != cfg.grid.ny || snap.field.grid.h != cfg.grid.h)
        throw Error("snapshot " + path.filename().string() + " does not match the configured grid");
      *dst = ScalarField(cfg.grid, std::move(snap.field.values));
      s.t = snap.t;
    }
    traj.states.push_back(std::move(s));
  }
  for (std::size_t k = 0; k < traj.states.size(); ++k) traj.series.push_back(series_row(traj.states[k]));
  return traj;
}

}  // namespace patchflow
