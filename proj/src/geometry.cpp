#include "patchflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "lower_envelope.hpp"
#include "patchflow/csv.hpp"
#include "patchflow/field_ops.hpp"

namespace patchflow {

std::size_t PatchMask::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

Point2 PatchBoundary::point(std::size_t k) const {
  const double half = 0.5 * grid.h;
  return {grid.origin_x + lattice[k].a * half, grid.origin_y + lattice[k].b * half};
}

std::vector<Point2> PatchBoundary::points() const {
  std::vector<Point2> out(lattice.size());
  for (std::size_t k = 0; k < lattice.size(); ++k) out[k] = point(k);
  return out;
}

double pressure_threshold(const ScalarField& p, double tol_orth) {
  return std::max(1e-7, 10.0 * tol_orth * lp_norm(p, Norm::linf));
}

PatchMask extract_patch(const ScalarField& f, double threshold, PatchMode mode) {
  if (!f.all_finite()) throw Error("extract_patch: non-finite input");
  PatchMask m;
  m.grid = f.grid;
  m.threshold = threshold;
  m.mode = mode;
  m.bits.resize(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double v = f.values[k];
    m.bits[k] = mode == PatchMode::greater ? v > threshold : v >= 1.0 - threshold;
  }
  return m;
}

PatchBoundary extract_boundary(const PatchMask& mask) {
  const Grid2D& g = mask.grid;
  PatchBoundary out;
  out.grid = g;
  out.threshold = mask.threshold;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const bool c = mask.at(i, j);
      if (c != mask.at(g.wrap_x(i + 1), j)) out.lattice.push_back({2 * i + 1, 2 * j});
      if (c != mask.at(i, g.wrap_y(j + 1))) out.lattice.push_back({2 * i, 2 * j + 1});
    }
  }
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Squared periodic EDT on an nx-by-ny lattice with unit spacing; seeds hold 0,
// all other entries +inf.
void squared_edt(std::vector<double>& f, int nx, int ny) {
  std::vector<double> tmp(f.size());
  detail::EnvelopeScratch s;
  for (int j = 0; j < ny; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * nx;
    detail::lower_envelope_periodic(f.data() + row, 1, nx, 1.0, tmp.data() + row, 1, s);
  }
  for (int i = 0; i < nx; ++i) detail::lower_envelope_periodic(tmp.data() + i, nx, ny, 1.0, f.data() + i, nx, s);
}

// Squared distances on the doubled lattice (unit = h/2) to the boundary points.
std::vector<double> lattice_edt(const PatchBoundary& seeds) {
  if (seeds.empty()) throw Error("distance_transform: empty seed set");
  const int nx = 2 * seeds.grid.nx, ny = 2 * seeds.grid.ny;
  std::vector<double> f(static_cast<std::size_t>(nx) * ny, kInf);
  for (const auto& p : seeds.lattice) f[static_cast<std::size_t>(p.b) * nx + p.a] = 0.0;
  squared_edt(f, nx, ny);
  return f;
}

}  // namespace

DistanceField distance_transform(const PatchBoundary& seeds) {
  const Grid2D& g = seeds.grid;
  const std::vector<double> f = lattice_edt(seeds);
  const int nx2 = 2 * g.nx;
  DistanceField out{g, std::vector<double>(g.size())};
  const double half = 0.5 * g.h;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out.values[g.index(i, j)] = std::sqrt(f[static_cast<std::size_t>(2 * j) * nx2 + 2 * i]) * half;
  return out;
}

DistanceField distance_transform(const PatchMask& seeds) {
  const Grid2D& g = seeds.grid;
  std::vector<double> f(g.size(), kInf);
  bool any = false;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (seeds.bits[k]) {
      f[k] = 0.0;
      any = true;
    }
  if (!any) throw Error("distance_transform: empty seed set");
  squared_edt(f, g.nx, g.ny);
  DistanceField out{g, std::move(f)};
  for (double& v : out.values) v = std::sqrt(v) * g.h;
  return out;
}

std::vector<double> distance_to_boundary(const PatchBoundary& seeds, const PatchBoundary& at) {
  if (seeds.grid != at.grid) throw Error("distance_to_boundary: grid mismatch");
  const std::vector<double> f = lattice_edt(seeds);
  const int nx2 = 2 * seeds.grid.nx;
  std::vector<double> out(at.size());
  for (std::size_t k = 0; k < at.size(); ++k)
    out[k] = std::sqrt(f[static_cast<std::size_t>(at.lattice[k].b) * nx2 + at.lattice[k].a]) * 0.5 * seeds.grid.h;
  return out;
}

double hausdorff_distance(const PatchBoundary& a, const PatchBoundary& b) {
  if (a.empty() || b.empty()) throw Error("hausdorff_distance: empty boundary");
  double d = 0.0;
  for (double v : distance_to_boundary(b, a)) d = std::max(d, v);
  for (double v : distance_to_boundary(a, b)) d = std::max(d, v);
  return d;
}

double support_radius(const ScalarField& rho, Point2 center, double theta) {
  const Grid2D& g = rho.grid;
  double r = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (rho.at(i, j) > theta) r = std::max(r, g.wrapped_distance(center, {g.x(i), g.y(j)}));
  return r;
}

PatchMask inner_offset(const PatchMask& mask, double s) {
  if (!(s >= 0.0)) throw Error("inner_offset: s must be >= 0");
  PatchBoundary boundary = extract_boundary(mask);
  if (boundary.empty() || s == 0.0) return mask;
  const DistanceField d = distance_transform(boundary);
  PatchMask out = mask;
  for (std::size_t k = 0; k < out.bits.size(); ++k)
    if (out.bits[k] && d.values[k] < s) out.bits[k] = 0;
  return out;
}

bool annulus_containment(const PatchMask& mask, Point2 x0, double r1, double r2) {
  if (!(r1 > 0.0) || !(r2 > r1)) throw Error("annulus_containment: need 0 < r1 < r2");
  const Grid2D& g = mask.grid;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!mask.at(i, j)) continue;
      if (g.wrapped_distance(x0, {g.x(i), g.y(j)}) < r1) return false;
    }
  return true;
}

int component_count(const PatchMask& mask) {
  const Grid2D& g = mask.grid;
  std::vector<int> label(g.size(), -1);
  std::vector<std::size_t> stack;
  int count = 0;
  for (std::size_t start = 0; start < g.size(); ++start) {
    if (!mask.bits[start] || label[start] >= 0) continue;
    label[start] = count;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t c = stack.back();
      stack.pop_back();
      const int i = static_cast<int>(c % g.nx), j = static_cast<int>(c / g.nx);
      const std::size_t nb[4] = {g.index(g.wrap_x(i - 1), j), g.index(g.wrap_x(i + 1), j),
                                 g.index(i, g.wrap_y(j - 1)), g.index(i, g.wrap_y(j + 1))};
      for (std::size_t q : nb)
        if (mask.bits[q] && label[q] < 0) {
          label[q] = count;
          stack.push_back(q);
        }
    }
    ++count;
  }
  return count;
}

void write_boundary_csv(const PatchBoundary& boundary, std::ostream& out) {
  out << "x,y\n";
  for (std::size_t k = 0; k < boundary.size(); ++k) {
    const Point2 p = boundary.point(k);
    out << csv::row({csv::format(p.x), csv::format(p.y)});
  }
}

}  // namespace patchflow
