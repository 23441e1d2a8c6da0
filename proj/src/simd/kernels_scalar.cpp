#include <cmath>
#include <cstddef>

#include "patchflow/simd/kernels.hpp"

namespace patchflow::simd {
namespace {

struct Lanes {
  double l[4] = {0.0, 0.0, 0.0, 0.0};
  double combine() const { return (l[0] + l[1]) + (l[2] + l[3]); }
};

template <class Term>
double reduce(std::size_t n, Term term) {
  Lanes acc;
  const std::size_t body = n & ~std::size_t(3);
  for (std::size_t k = 0; k < body; k += 4)
    for (std::size_t q = 0; q < 4; ++q) acc.l[q] += term(k + q);
  for (std::size_t k = body; k < n; ++k) acc.l[k - body] += term(k);
  return acc.combine();
}

// Row-wise variant used by stencil reductions: lanes persist across rows.
template <class Term>
double reduce_rows(int nx, int ny, Term term) {
  Lanes acc;
  const int body = nx & ~3;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < body; i += 4)
      for (int q = 0; q < 4; ++q) acc.l[q] += term(i + q, j);
    for (int i = body; i < nx; ++i) acc.l[i - body] += term(i, j);
  }
  return acc.combine();
}

double sum(const double* x, std::size_t n) {
  return reduce(n, [x](std::size_t k) { return x[k]; });
}
double sum_abs(const double* x, std::size_t n) {
  return reduce(n, [x](std::size_t k) { return std::fabs(x[k]); });
}
double sum_sq(const double* x, std::size_t n) {
  return reduce(n, [x](std::size_t k) { return x[k] * x[k]; });
}
double dot(const double* x, const double* y, std::size_t n) {
  return reduce(n, [x, y](std::size_t k) { return x[k] * y[k]; });
}
double max_abs(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t k = 0; k < n; ++k) m = std::fmax(m, std::fabs(x[k]));
  return m;
}
void mul(const double* x, const double* y, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) out[k] = x[k] * y[k];
}
void axpby(double a, const double* x, double b, const double* y, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) out[k] = a * x[k] + b * y[k];
}

void laplacian(const double* in, double* out, int nx, int ny, double inv_h2) {
  for (int j = 0; j < ny; ++j) {
    const double* row = in + static_cast<std::size_t>(j) * nx;
    const double* dn = in + static_cast<std::size_t>(j == 0 ? ny - 1 : j - 1) * nx;
    const double* up = in + static_cast<std::size_t>(j == ny - 1 ? 0 : j + 1) * nx;
    double* o = out + static_cast<std::size_t>(j) * nx;
    for (int i = 0; i < nx; ++i) {
      const double l = row[i == 0 ? nx - 1 : i - 1];
      const double r = row[i == nx - 1 ? 0 : i + 1];
      o[i] = (((l + r) + (dn[i] + up[i])) - 4.0 * row[i]) * inv_h2;
    }
  }
}

double forward_abs_sum(const double* f, int nx, int ny) {
  return reduce_rows(nx, ny, [=](int i, int j) {
    const double* row = f + static_cast<std::size_t>(j) * nx;
    const double* up = f + static_cast<std::size_t>(j == ny - 1 ? 0 : j + 1) * nx;
    const double c = row[i];
    return std::fabs(row[i == nx - 1 ? 0 : i + 1] - c) + std::fabs(up[i] - c);
  });
}

double forward_dot_sum(const double* f, const double* g, int nx, int ny) {
  return reduce_rows(nx, ny, [=](int i, int j) {
    const std::size_t r0 = static_cast<std::size_t>(j) * nx;
    const std::size_t ru = static_cast<std::size_t>(j == ny - 1 ? 0 : j + 1) * nx;
    const int ir = i == nx - 1 ? 0 : i + 1;
    const double fx = f[r0 + ir] - f[r0 + i];
    const double gx = g[r0 + ir] - g[r0 + i];
    const double fy = f[ru + i] - f[r0 + i];
    const double gy = g[ru + i] - g[r0 + i];
    return fx * gx + fy * gy;
  });
}

const KernelTable kScalar{
    "scalar", sum, sum_abs, sum_sq, dot, max_abs, mul, axpby, laplacian, forward_abs_sum, forward_dot_sum,
};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace patchflow::simd
