#pragma once

#include <utility>
#include <vector>

#include "patchflow/grid.hpp"

namespace patchflow {

struct NutrientConfig {
  double D = 1e-3;
  int substeps = 4;
  double far_field = 1.0;
  double boundary_guard_tol = 0.01;  // 1 disables the guard

  void validate() const;
};

/// e^{s Lap} f on the periodic grid: spectral multiplication by exp(-s |k|^2).
ScalarField heat_semigroup(const ScalarField& f, double s);

/// heat_semigroup(n (1 - tau rho_next), tau D), clamped to the range of
/// n (1 - tau rho_next).
ScalarField scheme1_nutrient_step(const ScalarField& n, const ScalarField& rho_next, double tau,
                                  const NutrientConfig& cfg);

/// One interval of dn/dt = D Lap n - rho_frozen n of length tau, by Lie
/// splitting: exact reaction, then an implicit spectral diffusion sub-step.
ScalarField scheme2_interval_solve(const ScalarField& n_start, const ScalarField& rho_frozen, double tau,
                                   const NutrientConfig& cfg);

/// n0 exp(-sum duration_i rho_i). Entry i is the density that drives
/// absorption over its duration.
ScalarField nutrient_exact_D0(const ScalarField& n0, const std::vector<std::pair<ScalarField, double>>& rho_history);

struct FarFieldCheck {
  bool pass = true;
  double minimum = 0.0;
};

/// Passes iff the boundary ring of cells stays above (1 - tol) * far_field.
FarFieldCheck far_field_guard(const ScalarField& n, const NutrientConfig& cfg);

class FarFieldError : public Error {
 public:
  FarFieldError(double minimum, const std::string& what) : Error(what), minimum_(minimum) {}
  double minimum() const { return minimum_; }

 private:
  double minimum_;
};

}  // namespace patchflow
