#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace patchflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Uniform periodic 2-D grid with square cells.
///
/// Cell (i, j) has its center at origin + (i*h, j*h); storage is row-major
/// with i (the x index) running fastest.
struct Grid2D {
  int nx = 0;
  int ny = 0;
  double h = 0.0;
  double origin_x = 0.0;
  double origin_y = 0.0;

  Grid2D() = default;
  Grid2D(int nx_, int ny_, double h_, double ox = 0.0, double oy = 0.0);

  /// Square box [-half_width, half_width)^2 with n cells per side; the
  /// origin (0,0) is a cell center.
  static Grid2D centered_box(int n, double half_width);

  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  double x(int i) const { return origin_x + i * h; }
  double y(int j) const { return origin_y + j * h; }
  double length_x() const { return nx * h; }
  double length_y() const { return ny * h; }
  double cell_area() const { return h * h; }
  int wrap_x(int i) const { return ((i % nx) + nx) % nx; }
  int wrap_y(int j) const { return ((j % ny) + ny) % ny; }

  /// Shortest periodic displacement between two coordinates along x / y.
  double wrap_dx(double dx) const;
  double wrap_dy(double dy) const;
  double wrapped_distance(Point2 a, Point2 b) const;

  bool operator==(const Grid2D& o) const {
    return nx == o.nx && ny == o.ny && h == o.h && origin_x == o.origin_x && origin_y == o.origin_y;
  }
  bool operator!=(const Grid2D& o) const { return !(*this == o); }
};

enum class FieldRole : std::uint8_t { density = 0, nutrient = 1, pressure = 2 };

/// Real-valued function sampled at the cell centers of a Grid2D.
struct ScalarField {
  Grid2D grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const Grid2D& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  ScalarField(const Grid2D& g, std::vector<double> v);

  template <class F>
  static ScalarField from_function(const Grid2D& g, F&& f) {
    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) out.values[g.index(i, j)] = f(g.x(i), g.y(j));
    return out;
  }

  double& at(int i, int j) { return values[grid.index(i, j)]; }
  double at(int i, int j) const { return values[grid.index(i, j)]; }
  std::size_t size() const { return values.size(); }
  bool all_finite() const;
};

inline constexpr double kClipEpsilon = 1e-9;

}  // namespace patchflow
