#include "patchflow/field_ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "patchflow/simd/kernels.hpp"

namespace patchflow {

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* what) {
  if (a.grid != b.grid) throw Error(std::string(what) + ": fields live on different grids");
}

double integrate(const ScalarField& f) {
  return f.grid.cell_area() * simd::kernels().sum(f.values.data(), f.size());
}

double lp_norm(const ScalarField& f, Norm p) {
  const auto& k = simd::kernels();
  switch (p) {
    case Norm::l1:
      return f.grid.cell_area() * k.sum_abs(f.values.data(), f.size());
    case Norm::l2:
      return std::sqrt(f.grid.cell_area() * k.sum_sq(f.values.data(), f.size()));
    case Norm::linf:
      return k.max_abs(f.values.data(), f.size());
  }
  return 0.0;
}

std::pair<ScalarField, ScalarField> gradient(const ScalarField& f) {
  const Grid2D& g = f.grid;
  ScalarField gx(g), gy(g);
  const double inv = 1.0 / (2.0 * g.h);
  for (int j = 0; j < g.ny; ++j) {
    const int jd = j == 0 ? g.ny - 1 : j - 1;
    const int ju = j == g.ny - 1 ? 0 : j + 1;
    for (int i = 0; i < g.nx; ++i) {
      const int il = i == 0 ? g.nx - 1 : i - 1;
      const int ir = i == g.nx - 1 ? 0 : i + 1;
      gx.at(i, j) = (f.at(ir, j) - f.at(il, j)) * inv;
      gy.at(i, j) = (f.at(i, ju) - f.at(i, jd)) * inv;
    }
  }
  return {std::move(gx), std::move(gy)};
}

double total_variation(const ScalarField& f) {
  return f.grid.h * simd::kernels().forward_abs_sum(f.values.data(), f.grid.nx, f.grid.ny);
}

ScalarField laplacian(const ScalarField& f) {
  ScalarField out(f.grid);
  simd::kernels().laplacian(f.values.data(), out.values.data(), f.grid.nx, f.grid.ny,
                            1.0 / (f.grid.h * f.grid.h));
  return out;
}

double dirichlet_form(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f, g, "dirichlet_form");
  // h^2 * (1/h^2) * sum of products of unscaled differences.
  return simd::kernels().forward_dot_sum(f.values.data(), g.values.data(), f.grid.nx, f.grid.ny);
}

double gradient_l2(const ScalarField& f) {
  auto [gx, gy] = gradient(f);
  const auto& k = simd::kernels();
  const double s = k.sum_sq(gx.values.data(), gx.size()) + k.sum_sq(gy.values.data(), gy.size());
  return std::sqrt(f.grid.cell_area() * s);
}

double inner(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f, g, "inner");
  return f.grid.cell_area() * simd::kernels().dot(f.values.data(), g.values.data(), f.size());
}

double max_value(const ScalarField& f) { return *std::max_element(f.values.begin(), f.values.end()); }
double min_value(const ScalarField& f) { return *std::min_element(f.values.begin(), f.values.end()); }

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b, "operator+");
  ScalarField out(a.grid);
  simd::kernels().axpby(1.0, a.values.data(), 1.0, b.values.data(), out.values.data(), a.size());
  return out;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b, "operator-");
  ScalarField out(a.grid);
  simd::kernels().axpby(1.0, a.values.data(), -1.0, b.values.data(), out.values.data(), a.size());
  return out;
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b, "operator*");
  ScalarField out(a.grid);
  simd::kernels().mul(a.values.data(), b.values.data(), out.values.data(), a.size());
  return out;
}

ScalarField operator*(double s, const ScalarField& a) {
  ScalarField out(a.grid);
  for (std::size_t k = 0; k < a.size(); ++k) out.values[k] = s * a.values[k];
  return out;
}

}  // namespace patchflow
