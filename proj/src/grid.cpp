#include "patchflow/grid.hpp"

#include <cmath>

namespace patchflow {

Grid2D::Grid2D(int nx_, int ny_, double h_, double ox, double oy)
    : nx(nx_), ny(ny_), h(h_), origin_x(ox), origin_y(oy) {
  if (nx < 8 || ny < 8) throw Error("grid needs at least 8 cells per axis");
  if (!(h > 0.0) || !std::isfinite(h)) throw Error("grid spacing must be positive");
}

Grid2D Grid2D::centered_box(int n, double half_width) {
  const double h = 2.0 * half_width / n;
  return Grid2D(n, n, h, -half_width, -half_width);
}

double Grid2D::wrap_dx(double dx) const {
  const double L = length_x();
  dx = std::fmod(dx, L);
  if (dx > 0.5 * L) dx -= L;
  if (dx < -0.5 * L) dx += L;
  return dx;
}

double Grid2D::wrap_dy(double dy) const {
  const double L = length_y();
  dy = std::fmod(dy, L);
  if (dy > 0.5 * L) dy -= L;
  if (dy < -0.5 * L) dy += L;
  return dy;
}

double Grid2D::wrapped_distance(Point2 a, Point2 b) const {
  return std::hypot(wrap_dx(a.x - b.x), wrap_dy(a.y - b.y));
}

ScalarField::ScalarField(const Grid2D& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) throw Error("field size does not match grid");
}

bool ScalarField::all_finite() const {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace patchflow
