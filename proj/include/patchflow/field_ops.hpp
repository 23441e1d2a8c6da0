#pragma once

#include <utility>

#include "patchflow/grid.hpp"

namespace patchflow {

enum class Norm { l1, l2, linf };

/// Midpoint-rule integral h^2 * sum(values).
double integrate(const ScalarField& f);

/// Discrete L^p norm with cell weight h^2 (max for L^inf).
double lp_norm(const ScalarField& f, Norm p);

/// Centered differences with periodic wrap.
std::pair<ScalarField, ScalarField> gradient(const ScalarField& f);

/// Anisotropic discrete total variation h * sum |forward differences|.
double total_variation(const ScalarField& f);

/// Periodic 5-point Laplacian.
ScalarField laplacian(const ScalarField& f);

/// Face-difference Dirichlet form sum_faces h^2 (D+f)(D+g); equals
/// integrate(f * -laplacian(g)) exactly up to round-off.
double dirichlet_form(const ScalarField& f, const ScalarField& g);

/// L2 norm of the centered gradient, sqrt(int |grad f|^2).
double gradient_l2(const ScalarField& f);

double inner(const ScalarField& f, const ScalarField& g);  // h^2 sum f g
double max_value(const ScalarField& f);
double min_value(const ScalarField& f);

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* what);

}  // namespace patchflow
