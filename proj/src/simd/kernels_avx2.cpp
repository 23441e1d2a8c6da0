#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "patchflow/simd/kernels.hpp"

namespace patchflow::simd {
namespace {

inline __m256d abs_pd(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

inline double combine(__m256d acc) {
  alignas(32) double l[4];
  _mm256_store_pd(l, acc);
  return (l[0] + l[1]) + (l[2] + l[3]);
}

// Adds up to three tail terms into lanes 0..r-1; the other lanes get +0.0.
inline __m256d add_tail(__m256d acc, const double* t, int r) {
  alignas(32) double v[4] = {0.0, 0.0, 0.0, 0.0};
  for (int q = 0; q < r; ++q) v[q] = t[q];
  return _mm256_add_pd(acc, _mm256_load_pd(v));
}

template <class Load, class Scalar>
double reduce(std::size_t n, Load load, Scalar scalar) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t body = n & ~std::size_t(3);
  for (std::size_t k = 0; k < body; k += 4) acc = _mm256_add_pd(acc, load(k));
  double t[3];
  const int r = static_cast<int>(n - body);
  for (int q = 0; q < r; ++q) t[q] = scalar(body + q);
  if (r > 0) acc = add_tail(acc, t, r);
  return combine(acc);
}

double sum(const double* x, std::size_t n) {
  return reduce(
      n, [x](std::size_t k) { return _mm256_loadu_pd(x + k); }, [x](std::size_t k) { return x[k]; });
}
double sum_abs(const double* x, std::size_t n) {
  return reduce(
      n, [x](std::size_t k) { return abs_pd(_mm256_loadu_pd(x + k)); },
      [x](std::size_t k) { return std::fabs(x[k]); });
}
double sum_sq(const double* x, std::size_t n) {
  return reduce(
      n,
      [x](std::size_t k) {
        const __m256d v = _mm256_loadu_pd(x + k);
        return _mm256_mul_pd(v, v);
      },
      [x](std::size_t k) { return x[k] * x[k]; });
}
double dot(const double* x, const double* y, std::size_t n) {
  return reduce(
      n, [x, y](std::size_t k) { return _mm256_mul_pd(_mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k)); },
      [x, y](std::size_t k) { return x[k] * y[k]; });
}
double max_abs(const double* x, std::size_t n) {
  __m256d m = _mm256_setzero_pd();
  const std::size_t body = n & ~std::size_t(3);
  for (std::size_t k = 0; k < body; k += 4) m = _mm256_max_pd(m, abs_pd(_mm256_loadu_pd(x + k)));
  alignas(32) double l[4];
  _mm256_store_pd(l, m);
  double r = std::fmax(std::fmax(l[0], l[1]), std::fmax(l[2], l[3]));
  for (std::size_t k = body; k < n; ++k) r = std::fmax(r, std::fabs(x[k]));
  return r;
}
void mul(const double* x, const double* y, double* out, std::size_t n) {
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4)
    _mm256_storeu_pd(out + k, _mm256_mul_pd(_mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k)));
  for (; k < n; ++k) out[k] = x[k] * y[k];
}
void axpby(double a, const double* x, double b, const double* y, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4)
    _mm256_storeu_pd(out + k, _mm256_add_pd(_mm256_mul_pd(va, _mm256_loadu_pd(x + k)),
                                            _mm256_mul_pd(vb, _mm256_loadu_pd(y + k))));
  for (; k < n; ++k) out[k] = a * x[k] + b * y[k];
}

void laplacian(const double* in, double* out, int nx, int ny, double inv_h2) {
  const __m256d vinv = _mm256_set1_pd(inv_h2);
  const __m256d four = _mm256_set1_pd(4.0);
  for (int j = 0; j < ny; ++j) {
    const double* row = in + static_cast<std::size_t>(j) * nx;
    const double* dn = in + static_cast<std::size_t>(j == 0 ? ny - 1 : j - 1) * nx;
    const double* up = in + static_cast<std::size_t>(j == ny - 1 ? 0 : j + 1) * nx;
    double* o = out + static_cast<std::size_t>(j) * nx;
    auto scalar_cell = [&](int i) {
      const double l = row[i == 0 ? nx - 1 : i - 1];
      const double r = row[i == nx - 1 ? 0 : i + 1];
      o[i] = (((l + r) + (dn[i] + up[i])) - 4.0 * row[i]) * inv_h2;
    };
    scalar_cell(0);
    int i = 1;
    for (; i + 4 <= nx - 1; i += 4) {
      const __m256d l = _mm256_loadu_pd(row + i - 1);
      const __m256d r = _mm256_loadu_pd(row + i + 1);
      const __m256d c = _mm256_loadu_pd(row + i);
      const __m256d d = _mm256_loadu_pd(dn + i);
      const __m256d u = _mm256_loadu_pd(up + i);
      const __m256d s = _mm256_sub_pd(_mm256_add_pd(_mm256_add_pd(l, r), _mm256_add_pd(d, u)),
                                      _mm256_mul_pd(four, c));
      _mm256_storeu_pd(o + i, _mm256_mul_pd(s, vinv));
    }
    for (; i < nx; ++i) scalar_cell(i);
  }
}

double forward_abs_sum(const double* f, int nx, int ny) {
  __m256d acc = _mm256_setzero_pd();
  const int body = nx & ~3;
  for (int j = 0; j < ny; ++j) {
    const double* row = f + static_cast<std::size_t>(j) * nx;
    const double* up = f + static_cast<std::size_t>(j == ny - 1 ? 0 : j + 1) * nx;
    auto term = [&](int i) {
      const double c = row[i];
      return std::fabs(row[i == nx - 1 ? 0 : i + 1] - c) + std::fabs(up[i] - c);
    };
    for (int i = 0; i < body; i += 4) {
      __m256d t;
      if (i + 4 < nx) {
        const __m256d c = _mm256_loadu_pd(row + i);
        t = _mm256_add_pd(abs_pd(_mm256_sub_pd(_mm256_loadu_pd(row + i + 1), c)),
                          abs_pd(_mm256_sub_pd(_mm256_loadu_pd(up + i), c)));
      } else {
        alignas(32) double v[4];
        for (int q = 0; q < 4; ++q) v[q] = term(i + q);
        t = _mm256_load_pd(v);
      }
      acc = _mm256_add_pd(acc, t);
    }
    const int r = nx - body;
    if (r > 0) {
      double v[3];
      for (int q = 0; q < r; ++q) v[q] = term(body + q);
      acc = add_tail(acc, v, r);
    }
  }
  return combine(acc);
}

double forward_dot_sum(const double* f, const double* g, int nx, int ny) {
  __m256d acc = _mm256_setzero_pd();
  const int body = nx & ~3;
  for (int j = 0; j < ny; ++j) {
    const std::size_t r0 = static_cast<std::size_t>(j) * nx;
    const std::size_t ru = static_cast<std::size_t>(j == ny - 1 ? 0 : j + 1) * nx;
    auto term = [&](int i) {
      const int ir = i == nx - 1 ? 0 : i + 1;
      const double fx = f[r0 + ir] - f[r0 + i];
      const double gx = g[r0 + ir] - g[r0 + i];
      const double fy = f[ru + i] - f[r0 + i];
      const double gy = g[ru + i] - g[r0 + i];
      return fx * gx + fy * gy;
    };
    for (int i = 0; i < body; i += 4) {
      __m256d t;
      if (i + 4 < nx) {
        const __m256d fc = _mm256_loadu_pd(f + r0 + i);
        const __m256d gc = _mm256_loadu_pd(g + r0 + i);
        const __m256d fx = _mm256_sub_pd(_mm256_loadu_pd(f + r0 + i + 1), fc);
        const __m256d gx = _mm256_sub_pd(_mm256_loadu_pd(g + r0 + i + 1), gc);
        const __m256d fy = _mm256_sub_pd(_mm256_loadu_pd(f + ru + i), fc);
        const __m256d gy = _mm256_sub_pd(_mm256_loadu_pd(g + ru + i), gc);
        t = _mm256_add_pd(_mm256_mul_pd(fx, gx), _mm256_mul_pd(fy, gy));
      } else {
        alignas(32) double v[4];
        for (int q = 0; q < 4; ++q) v[q] = term(i + q);
        t = _mm256_load_pd(v);
      }
      acc = _mm256_add_pd(acc, t);
    }
    const int r = nx - body;
    if (r > 0) {
      double v[3];
      for (int q = 0; q < r; ++q) v[q] = term(body + q);
      acc = add_tail(acc, v, r);
    }
  }
  return combine(acc);
}

const KernelTable kAvx2{
    "avx2", sum, sum_abs, sum_sq, dot, max_abs, mul, axpby, laplacian, forward_abs_sum, forward_dot_sum,
};

}  // namespace

const KernelTable* avx2_kernels_impl() { return &kAvx2; }

}  // namespace patchflow::simd
