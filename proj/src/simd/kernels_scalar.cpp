#include "tunnelstat/simd/kernels.hpp"

#include <algorithm>

namespace tunnelstat::simd {
namespace {

// Written out component-wise: std::complex operator* adds inf/nan recovery
// branches that the vector variants do not have.
void multiply_scalar(cplx* data, const cplx* factors, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = data[i].real();
    const double ai = data[i].imag();
    const double br = factors[i].real();
    const double bi = factors[i].imag();
    data[i] = cplx(ar * br - ai * bi, ar * bi + ai * br);
  }
}

double sum_norm_scalar(const cplx* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  }
  return acc;
}

cplx conj_dot_scalar(const cplx* a, const cplx* b, std::size_t n) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return {re, im};
}

double max_norm_scalar(const cplx* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    m = std::max(m, a[i].real() * a[i].real() + a[i].imag() * a[i].imag());
  }
  return m;
}

Moments moments_scalar(const cplx* a, const double* x, std::size_t n) {
  Moments m;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
    m.mass += w;
    m.first += x[i] * w;
    m.second += x[i] * x[i] * w;
  }
  return m;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar",          multiply_scalar, sum_norm_scalar,
                                 conj_dot_scalar,   max_norm_scalar, moments_scalar};
  return table;
}

}  // namespace tunnelstat::simd
