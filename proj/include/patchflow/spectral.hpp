#pragma once

#include <functional>

#include "patchflow/grid.hpp"

namespace patchflow::spectral {

/// Multiplies the periodic DFT of f by symbol(kx, ky) and transforms back.
/// Wavenumbers are the continuous ones, k = 2*pi*m/L. The symbol must be
/// real and even in (kx, ky) for the result to be real.
ScalarField apply_multiplier(const ScalarField& f, const std::function<double(double, double)>& symbol);

}  // namespace patchflow::spectral
