#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "patchflow/grid.hpp"

namespace patchflow {

enum class PatchMode {
  greater,        // f > threshold
  geq_one_minus,  // f >= 1 - threshold
};

struct PatchMask {
  Grid2D grid;
  std::vector<std::uint8_t> bits;
  double threshold = 0.0;
  PatchMode mode = PatchMode::greater;

  bool at(int i, int j) const { return bits[grid.index(i, j)] != 0; }
  std::size_t count() const;
  bool operator==(const PatchMask& o) const { return grid == o.grid && bits == o.bits; }
};

/// Boundary points live on the doubled lattice: (a, b) is the point
/// origin + (a h / 2, b h / 2). Cell centers have even coordinates, edge
/// midpoints one odd coordinate.
struct LatticePoint {
  int a = 0;
  int b = 0;
  bool operator==(const LatticePoint& o) const { return a == o.a && b == o.b; }
};

struct PatchBoundary {
  Grid2D grid;
  std::vector<LatticePoint> lattice;
  double threshold = 0.0;

  std::size_t size() const { return lattice.size(); }
  bool empty() const { return lattice.empty(); }
  Point2 point(std::size_t k) const;
  std::vector<Point2> points() const;
};

struct DistanceField {
  Grid2D grid;
  std::vector<double> values;

  double at(int i, int j) const { return values[grid.index(i, j)]; }
  ScalarField as_field() const { return ScalarField(grid, values); }
};

/// Pressure-positivity threshold max(1e-7, 10 tol_orth |p|_inf).
double pressure_threshold(const ScalarField& p, double tol_orth);

PatchMask extract_patch(const ScalarField& f, double threshold, PatchMode mode);

/// Midpoints of all in/out edges under 4-connectivity, periodic wrap edges
/// included, in row-major scan order (the +x edge of each cell, then its +y edge).
PatchBoundary extract_boundary(const PatchMask& mask);

/// Exact periodic Euclidean distance from every cell center to the nearest
/// seed. Throws on empty seeds.
DistanceField distance_transform(const PatchBoundary& seeds);
DistanceField distance_transform(const PatchMask& seeds);

/// Exact periodic Euclidean distance from each point of `at` to the nearest
/// point of `seeds`, both on the doubled lattice.
std::vector<double> distance_to_boundary(const PatchBoundary& seeds, const PatchBoundary& at);

/// Symmetric Hausdorff distance between two boundaries on the same grid.
double hausdorff_distance(const PatchBoundary& a, const PatchBoundary& b);

/// Max wrapped distance from center to any cell with rho > theta; 0 if none.
double support_radius(const ScalarField& rho, Point2 center = {}, double theta = 1e-6);

/// Cells of mask at distance >= s from the mask's boundary.
PatchMask inner_offset(const PatchMask& mask, double s);

/// True iff every mask cell closer than r2 to x0 lies at distance >= r1.
bool annulus_containment(const PatchMask& mask, Point2 x0, double r1, double r2);

/// Number of 4-connected components, periodic wrap included.
int component_count(const PatchMask& mask);

/// CSV with header x,y.
void write_boundary_csv(const PatchBoundary& boundary, std::ostream& out);

}  // namespace patchflow
