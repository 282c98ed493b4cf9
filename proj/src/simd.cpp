#include "ps/simd.hpp"

#include <cstdlib>
#include <cstring>

namespace ps::simd {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

namespace {

struct Selected {
  DotFn fn;
  std::string_view name;
};

Selected select_kernel() {
  const char* forced = std::getenv("PSCLUSTER_SIMD");
#if defined(PS_HAVE_AVX2_TU)
  if (forced == nullptr || std::strcmp(forced, "avx2") == 0) {
    if (__builtin_cpu_supports("avx2")) return {dot_avx2, "avx2"};
  }
#endif
#if defined(PS_HAVE_NEON_TU)
  if (forced == nullptr || std::strcmp(forced, "neon") == 0) {
    return {dot_neon, "neon"};
  }
#endif
  (void)forced;
  return {dot_scalar, "scalar"};
}

const Selected& selected() {
  static const Selected sel = select_kernel();
  return sel;
}

}  // namespace

DotFn active_dot() { return selected().fn; }

std::string_view active_kernel_name() { return selected().name; }

}  // namespace ps::simd
