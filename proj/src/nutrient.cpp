#include "patchflow/nutrient.hpp"

#include <algorithm>
#include <cmath>

#include "patchflow/field_ops.hpp"
#include "patchflow/spectral.hpp"

namespace patchflow {

void NutrientConfig::validate() const {
  if (!(D >= 0.0) || !std::isfinite(D)) throw Error("nutrient: D must be >= 0");
  if (substeps < 1) throw Error("nutrient: substeps must be >= 1");
  if (!(far_field > 0.0)) throw Error("nutrient: far_field must be > 0");
  if (!(boundary_guard_tol >= 0.0) || boundary_guard_tol > 1.0)
    throw Error("nutrient: boundary_guard_tol must lie in [0, 1]");
}

namespace {

void require_finite(const ScalarField& f, const char* what) {
  if (!f.all_finite()) throw Error(std::string(what) + ": non-finite input");
}

void clamp_to(ScalarField& f, double lo, double hi) {
  for (double& v : f.values) v = std::clamp(v, lo, hi);
}

}  // namespace

ScalarField heat_semigroup(const ScalarField& f, double s) {
  if (!(s >= 0.0)) throw Error("heat_semigroup: s must be >= 0");
  require_finite(f, "heat_semigroup");
  if (s == 0.0) return f;
  return spectral::apply_multiplier(f, [s](double kx, double ky) { return std::exp(-s * (kx * kx + ky * ky)); });
}

ScalarField scheme1_nutrient_step(const ScalarField& n, const ScalarField& rho_next, double tau,
                                  const NutrientConfig& cfg) {
  require_same_grid(n, rho_next, "scheme1_nutrient_step");
  require_finite(n, "scheme1_nutrient_step");
  if (!(tau > 0.0) || tau >= 1.0) throw Error("scheme1_nutrient_step: tau must lie in (0, 1)");
  ScalarField f(n.grid);
  for (std::size_t k = 0; k < f.size(); ++k) f.values[k] = n.values[k] * (1.0 - tau * rho_next.values[k]);
  const double lo = min_value(f), hi = max_value(f);
  ScalarField out = heat_semigroup(f, tau * cfg.D);
  clamp_to(out, lo, hi);
  return out;
}

ScalarField scheme2_interval_solve(const ScalarField& n_start, const ScalarField& rho_frozen, double tau,
                                   const NutrientConfig& cfg) {
  require_same_grid(n_start, rho_frozen, "scheme2_interval_solve");
  require_finite(n_start, "scheme2_interval_solve");
  require_finite(rho_frozen, "scheme2_interval_solve");
  if (!(tau > 0.0)) throw Error("scheme2_interval_solve: tau must be positive");
  cfg.validate();
  const double delta = tau / cfg.substeps;
  ScalarField decay(n_start.grid);
  for (std::size_t k = 0; k < decay.size(); ++k) decay.values[k] = std::exp(-delta * rho_frozen.values[k]);

  ScalarField n = n_start;
  const double dd = delta * cfg.D;
  for (int s = 0; s < cfg.substeps; ++s) {
    for (std::size_t k = 0; k < n.size(); ++k) n.values[k] *= decay.values[k];
    if (dd == 0.0) continue;
    const double lo = min_value(n), hi = max_value(n);
    n = spectral::apply_multiplier(n, [dd](double kx, double ky) { return 1.0 / (1.0 + dd * (kx * kx + ky * ky)); });
    clamp_to(n, lo, hi);
  }
  return n;
}

ScalarField nutrient_exact_D0(const ScalarField& n0, const std::vector<std::pair<ScalarField, double>>& rho_history) {
  ScalarField exponent(n0.grid);
  for (const auto& [rho, duration] : rho_history) {
    require_same_grid(n0, rho, "nutrient_exact_D0");
    if (!(duration >= 0.0)) throw Error("nutrient_exact_D0: durations must be >= 0");
    for (std::size_t k = 0; k < exponent.size(); ++k) exponent.values[k] += duration * rho.values[k];
  }
  ScalarField out(n0.grid);
  for (std::size_t k = 0; k < out.size(); ++k) out.values[k] = n0.values[k] * std::exp(-exponent.values[k]);
  return out;
}

FarFieldCheck far_field_guard(const ScalarField& n, const NutrientConfig& cfg) {
  const Grid2D& g = n.grid;
  double m = n.at(0, 0);
  for (int i = 0; i < g.nx; ++i) m = std::min({m, n.at(i, 0), n.at(i, g.ny - 1)});
  for (int j = 0; j < g.ny; ++j) m = std::min({m, n.at(0, j), n.at(g.nx - 1, j)});
  FarFieldCheck out;
  out.minimum = m;
  out.pass = m >= (1.0 - cfg.boundary_guard_tol) * cfg.far_field;
  return out;
}

}  // namespace patchflow
