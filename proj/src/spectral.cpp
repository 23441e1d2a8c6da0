#include "patchflow/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>

namespace patchflow::spectral {
namespace {

struct Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

const Plans& plans_for(int nx, int ny) {
  static std::map<std::pair<int, int>, Plans> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = cache.find({nx, ny});
  if (it != cache.end()) return it->second;
  const int nxc = nx / 2 + 1;
  double* r = fftw_alloc_real(static_cast<std::size_t>(nx) * ny);
  fftw_complex* c = fftw_alloc_complex(static_cast<std::size_t>(nxc) * ny);
  Plans p;
  p.forward = fftw_plan_dft_r2c_2d(ny, nx, r, c, FFTW_ESTIMATE);
  p.backward = fftw_plan_dft_c2r_2d(ny, nx, c, r, FFTW_ESTIMATE);
  fftw_free(r);
  fftw_free(c);
  return cache.emplace(std::make_pair(nx, ny), p).first->second;
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

ScalarField apply_multiplier(const ScalarField& f, const std::function<double(double, double)>& symbol) {
  const Grid2D& g = f.grid;
  const int nx = g.nx, ny = g.ny, nxc = nx / 2 + 1;
  const Plans& p = plans_for(nx, ny);

  std::unique_ptr<double, FftwDeleter> r(fftw_alloc_real(g.size()));
  std::unique_ptr<fftw_complex, FftwDeleter> c(fftw_alloc_complex(static_cast<std::size_t>(nxc) * ny));
  std::copy(f.values.begin(), f.values.end(), r.get());
  fftw_execute_dft_r2c(p.forward, r.get(), c.get());

  const double two_pi = 2.0 * std::numbers::pi;
  const double scale = 1.0 / static_cast<double>(g.size());
  for (int j = 0; j < ny; ++j) {
    const int mj = j <= ny / 2 ? j : j - ny;
    const double ky = two_pi * mj / g.length_y();
    for (int i = 0; i < nxc; ++i) {
      const double kx = two_pi * i / g.length_x();
      const double s = symbol(kx, ky) * scale;
      fftw_complex& z = c.get()[static_cast<std::size_t>(j) * nxc + i];
      z[0] *= s;
      z[1] *= s;
    }
  }
  fftw_execute_dft_c2r(p.backward, c.get(), r.get());
  ScalarField out(g);
  std::copy(r.get(), r.get() + g.size(), out.values.begin());
  return out;
}

}  // namespace patchflow::spectral
