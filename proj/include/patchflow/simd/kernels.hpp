#pragma once

#include <cstddef>

namespace patchflow::simd {

// Inner-loop kernels over contiguous double arrays. Every reduction uses the
// same fixed 4-lane tree: element k of a row-block goes to lane (k mod 4),
// tail elements go to lanes 0,1,2 in order, and the lanes are combined as
// (l0 + l1) + (l2 + l3). The scalar and vector variants therefore agree
// bitwise, and results never depend on the dispatch choice.
struct KernelTable {
  const char* name;

  double (*sum)(const double* x, std::size_t n);
  double (*sum_abs)(const double* x, std::size_t n);
  double (*sum_sq)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*max_abs)(const double* x, std::size_t n);

  // out = x * y
  void (*mul)(const double* x, const double* y, double* out, std::size_t n);
  // out = a*x + b*y
  void (*axpby)(double a, const double* x, double b, const double* y, double* out, std::size_t n);

  // Periodic 5-point Laplacian on an nx-by-ny row-major grid.
  void (*laplacian)(const double* in, double* out, int nx, int ny, double inv_h2);
  // sum over cells of |f(i+1,j)-f(i,j)| + |f(i,j+1)-f(i,j)| (periodic).
  double (*forward_abs_sum)(const double* f, int nx, int ny);
  // sum over cells of Dx+f*Dx+g + Dy+f*Dy+g, unscaled differences (periodic).
  double (*forward_dot_sum)(const double* f, const double* g, int nx, int ny);
};

const KernelTable& scalar_kernels();
// nullptr when the build or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

// Table chosen at first use: AVX2 when available unless PATCHFLOW_SIMD=scalar.
const KernelTable& kernels();

}  // namespace patchflow::simd
