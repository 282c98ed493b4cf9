#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Dot-product kernels for the similarity inner loops. A scalar reference
// implementation is always available; wider variants are compiled per
// architecture and selected once at startup based on CPU capabilities.
// The env var PSCLUSTER_SIMD=scalar|avx2|neon forces a kernel.

namespace ps::simd {

using DotFn = double (*)(const double*, const double*, std::size_t);

double dot_scalar(const double* a, const double* b, std::size_t n);

#if defined(PS_HAVE_AVX2_TU)
double dot_avx2(const double* a, const double* b, std::size_t n);
#endif
#if defined(PS_HAVE_NEON_TU)
double dot_neon(const double* a, const double* b, std::size_t n);
#endif

// Kernel chosen for this process (cached after first call).
DotFn active_dot();
std::string_view active_kernel_name();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active_dot()(a.data(), b.data(), a.size());
}

}  // namespace ps::simd
