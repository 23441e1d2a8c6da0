#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "patchflow/diagnostics.hpp"
#include "patchflow/field_ops.hpp"
#include "patchflow/projection.hpp"

namespace patchflow {

namespace {

struct Block {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
  double weight = 0.0;
  double value = 0.0;
};

std::vector<Block> pava_blocks(const std::vector<double>& y, const std::vector<double>& w) {
  std::vector<Block> st;
  st.reserve(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    st.push_back({k, k + 1, w[k], y[k]});
    while (st.size() > 1 && st[st.size() - 2].value > st.back().value) {
      Block top = st.back();
      st.pop_back();
      Block& prev = st.back();
      const double wsum = prev.weight + top.weight;
      prev.value = (prev.weight * prev.value + top.weight * top.value) / wsum;
      prev.weight = wsum;
      prev.end = top.end;
    }
  }
  return st;
}

// Adds density `rho` on [a, b) to the cell averages of `out`, wrapping periodically.
void deposit(std::vector<double>& out, double h, double a, double b, double rho) {
  const int n = static_cast<int>(out.size());
  long long c = static_cast<long long>(std::floor(a / h));
  while (a < b) {
    const double cell_end = (c + 1) * h;
    const double stop = std::min(b, cell_end);
    const int idx = static_cast<int>(((c % n) + n) % n);
    out[idx] += rho * (stop - a) / h;
    a = stop;
    ++c;
  }
}

}  // namespace

std::vector<double> isotonic_regression(const std::vector<double>& y, const std::vector<double>& w) {
  if (y.size() != w.size()) throw Error("isotonic_regression: size mismatch");
  std::vector<double> out(y.size());
  for (const Block& b : pava_blocks(y, w))
    for (std::size_t k = b.begin; k < b.end; ++k) out[k] = b.value;
  return out;
}

std::vector<double> oracle_project_1d(const std::vector<double>& mu, double h) {
  constexpr int kSubBins = 64;
  if (!(h > 0.0)) throw Error("oracle_project_1d: h must be positive");
  double total = 0.0;
  for (double v : mu) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error("oracle_project_1d: mu must be finite and >= 0");
    total += v;
  }
  if (total == 0.0) throw Error("oracle_project_1d: zero total mass");

  // Equal-mass sub-bins per cell; g = Q - m is linear inside each bin, so its
  // midpoint sample is the bin average.
  struct Bin {
    double x0, x1, density, m0, mass;
  };
  std::vector<Bin> bins;
  std::vector<double> g, w;
  const double dx = h / kSubBins;
  double m = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] == 0.0) continue;
    const double mass = mu[i] * dx;
    for (int s = 0; s < kSubBins; ++s) {
      const double x0 = i * h + s * dx;
      bins.push_back({x0, x0 + dx, mu[i], m, mass});
      g.push_back((x0 + 0.5 * dx) - (m + 0.5 * mass));
      w.push_back(mass);
      m += mass;
    }
  }

  std::vector<double> out(mu.size(), 0.0);
  for (const Block& b : pava_blocks(g, w)) {
    if (b.end - b.begin == 1) {
      const Bin& bin = bins[b.begin];
      deposit(out, h, bin.x0, bin.x1, bin.density);
    } else {
      const double start = bins[b.begin].m0 + b.value;
      deposit(out, h, start, start + b.weight, 1.0);
    }
  }
  return out;
}

ScalarField brute_force_c_transform(const ScalarField& p, double tau) {
  const Grid2D& g = p.grid;
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int q = 0; q < g.ny; ++q) {
        const double dy = g.wrap_dy((j - q) * g.h);
        for (int r = 0; r < g.nx; ++r) {
          const double dx = g.wrap_dx((i - r) * g.h);
          best = std::min(best, p.at(r, q) + (dx * dx + dy * dy) / (2.0 * tau));
        }
      }
      out.at(i, j) = best;
    }
  return out;
}

std::vector<double> random_profile(std::uint64_t seed, int nx) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> nseg(3, 8);
  std::uniform_real_distribution<double> value(0.0, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> mu(nx, 0.0);
  const int segments = nseg(rng);
  const int lo = nx * 3 / 8, hi = nx * 5 / 8;
  std::vector<int> cuts{lo, hi};
  for (int s = 1; s < segments; ++s) cuts.push_back(lo + static_cast<int>(unit(rng) * (hi - lo)));
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double v = unit(rng) < 0.2 ? 0.0 : value(rng);
    for (int i = cuts[s]; i < cuts[s + 1]; ++i) mu[i] = v;
  }
  return mu;
}

ScalarField extrude_profile(const std::vector<double>& mu, double h) {
  const int nx = static_cast<int>(mu.size());
  ScalarField f(Grid2D(nx, 8, h, 0.5 * h, 0.5 * h));
  for (int j = 0; j < 8; ++j)
    for (int i = 0; i < nx; ++i) f.at(i, j) = mu[i];
  return f;
}

OracleSuiteResult run_oracle_suite(std::uint64_t seed, int count, double ct_scale) {
  constexpr int kProfileCells = 512;
  constexpr int kSection = 64;
  OracleSuiteResult res;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < count; ++k) {
    const std::uint64_t instance_seed = rng();
    const double h = 1.0 / kProfileCells;
    const std::vector<double> mu = random_profile(instance_seed, kProfileCells);
    double total = 0.0;
    for (double v : mu) total += v * h;
    if (total > 0.0) {
      const std::vector<double> ref = oracle_project_1d(mu, h);
      double ref_mass = 0.0;
      for (double v : ref) ref_mass += v * h;
      res.worst_mass_error = std::max(res.worst_mass_error, std::fabs(ref_mass - total) / total);

      ProjectionConfig cfg;
      const ProjectionResult pr = project(extrude_profile(mu, h), cfg);
      double l1 = 0.0;
      for (int i = 0; i < kProfileCells; ++i) l1 += std::fabs(pr.rho_next.at(i, 0) - ref[i]) * h;
      res.worst_projection_l1 = std::max(res.worst_projection_l1, l1);
    }

    const Grid2D g = Grid2D::centered_box(kSection, 1.0);
    std::mt19937_64 field_rng(instance_seed ^ 0x9e3779b97f4a7c15ULL);
    ScalarField p(g);
    for (double& v : p.values) v = unit(field_rng);
    const double a = 0.002 * std::pow(250.0, unit(field_rng));  // parabola weight in index units
    const double tau = g.h * g.h / (2.0 * a);
    ScalarField ct = c_transform(p, tau);
    for (double& v : ct.values) v *= ct_scale;
    const ScalarField bf = brute_force_c_transform(p, tau);
    for (std::size_t c = 0; c < ct.size(); ++c)
      res.worst_c_transform = std::max(res.worst_c_transform, std::fabs(ct.values[c] - bf.values[c]));
    ++res.instances;
  }
  res.pass = res.worst_projection_l1 <= kOracleProjectionTol && res.worst_c_transform <= kOracleCTransformTol &&
             res.worst_mass_error <= 1e-10;
  return res;
}

}  // namespace patchflow
