#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace patchflow::detail {

struct EnvelopeScratch {
  std::vector<int> v;
  std::vector<double> z;
};

// out[q] = min_c f(c) + a (q - c)^2 over the periodic line of n nodes,
// q = 0..n-1. Candidates run over three periodic copies [-n, 2n), which
// contain the nearest image of every node. Infinite entries of f are
// skipped; an all-infinite line yields +inf. Exact ties keep the earlier
// candidate.
inline void lower_envelope_periodic(const double* f, std::size_t stride, int n, double a, double* out,
                                    std::size_t out_stride, EnvelopeScratch& s) {
  const double inf = std::numeric_limits<double>::infinity();
  const int m = 3 * n;
  auto value = [&](int c) { return f[static_cast<std::size_t>(c % n) * stride]; };
  auto pos = [&](int c) { return static_cast<double>(c - n); };
  s.v.assign(m, 0);
  s.z.assign(m + 1, 0.0);
  int k = -1;
  for (int c = 0; c < m; ++c) {
    const double fc = value(c);
    if (!std::isfinite(fc)) continue;
    if (k < 0) {
      k = 0;
      s.v[0] = c;
      s.z[0] = -inf;
      s.z[1] = inf;
      continue;
    }
    const double qc = pos(c);
    double x;
    while (true) {
      const double qv = pos(s.v[k]), fv = value(s.v[k]);
      x = ((fc + a * qc * qc) - (fv + a * qv * qv)) / (2.0 * a * (qc - qv));
      if (x <= s.z[k]) {
        --k;
        continue;
      }
      break;
    }
    ++k;
    s.v[k] = c;
    s.z[k] = x;
    s.z[k + 1] = inf;
  }
  if (k < 0) {
    for (int q = 0; q < n; ++q) out[static_cast<std::size_t>(q) * out_stride] = inf;
    return;
  }
  int idx = 0;
  for (int q = 0; q < n; ++q) {
    const double x = static_cast<double>(q);
    while (s.z[idx + 1] < x) ++idx;
    const double d = x - pos(s.v[idx]);
    out[static_cast<std::size_t>(q) * out_stride] = value(s.v[idx]) + a * d * d;
  }
}

}  // namespace patchflow::detail
