#include <cstdlib>
#include <string_view>

#include "tunnelstat/simd/kernels.hpp"

namespace tunnelstat::simd {

#if defined(TUNNELSTAT_HAVE_AVX2)
const KernelTable& avx2_kernel_table();
#endif

const KernelTable* avx2_kernels() {
#if defined(TUNNELSTAT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  static const KernelTable& table = []() -> const KernelTable& {
    const char* env = std::getenv("TUNNELSTAT_KERNELS");
    const std::string_view request = env != nullptr ? env : "";
    if (request == "scalar") {
      return scalar_kernels();
    }
    if (const KernelTable* vec = avx2_kernels()) {
      return *vec;
    }
    return scalar_kernels();
  }();
  return table;
}

}  // namespace tunnelstat::simd
