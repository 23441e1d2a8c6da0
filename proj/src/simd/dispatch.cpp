#include <cstdlib>
#include <cstring>

#include "patchflow/simd/kernels.hpp"

namespace patchflow::simd {

#if defined(PATCHFLOW_HAVE_AVX2)
const KernelTable* avx2_kernels_impl();
#endif

const KernelTable* avx2_kernels() {
#if defined(PATCHFLOW_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? avx2_kernels_impl() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& kernels() {
  static const KernelTable* active = [] {
    const char* env = std::getenv("PATCHFLOW_SIMD");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) return &scalar_kernels();
    const KernelTable* v = avx2_kernels();
    return v != nullptr ? v : &scalar_kernels();
  }();
  return *active;
}

}  // namespace patchflow::simd
