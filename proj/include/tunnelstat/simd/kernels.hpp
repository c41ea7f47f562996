#pragma once

// Data-parallel inner loops of the propagator and the overlap integrals.
//
// Every kernel has a scalar reference implementation. An AVX2/FMA variant is
// compiled in on x86-64 and picked at runtime when the CPU supports it. The
// environment variable TUNNELSTAT_KERNELS=scalar|avx2 forces a choice.
// Variants agree to rounding (reductions are reassociated), and each variant
// is deterministic for a given length: there is no alignment-dependent path.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace tunnelstat::simd {

using cplx = std::complex<double>;

struct Moments {
  double mass = 0.0;    // sum |a|^2
  double first = 0.0;   // sum x |a|^2
  double second = 0.0;  // sum x^2 |a|^2
};

struct KernelTable {
  std::string_view name;
  // data[i] *= factors[i]
  void (*multiply)(cplx* data, const cplx* factors, std::size_t n);
  // sum |a_i|^2
  double (*sum_norm)(const cplx* a, std::size_t n);
  // sum conj(a_i) b_i
  cplx (*conj_dot)(const cplx* a, const cplx* b, std::size_t n);
  // max |a_i|^2
  double (*max_norm)(const cplx* a, std::size_t n);
  Moments (*moments)(const cplx* a, const double* x, std::size_t n);
};

const KernelTable& scalar_kernels();

/// nullptr when the AVX2 variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_kernels();

/// Resolved once per process.
const KernelTable& active_kernels();

// Span conveniences over the active table.

inline void multiply(std::span<cplx> data, std::span<const cplx> factors) {
  active_kernels().multiply(data.data(), factors.data(), data.size());
}

inline double sum_norm(std::span<const cplx> a) {
  return active_kernels().sum_norm(a.data(), a.size());
}

inline cplx conj_dot(std::span<const cplx> a, std::span<const cplx> b) {
  return active_kernels().conj_dot(a.data(), b.data(), a.size());
}

inline double max_norm(std::span<const cplx> a) {
  return active_kernels().max_norm(a.data(), a.size());
}

inline Moments moments(std::span<const cplx> a, std::span<const double> x) {
  return active_kernels().moments(a.data(), x.data(), a.size());
}

}  // namespace tunnelstat::simd
