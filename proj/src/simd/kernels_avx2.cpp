// AVX2/FMA variants. This translation unit is the only one built with
// -mavx2 -mfma; it is entered only after the runtime CPU check in dispatch.cpp.

#include <immintrin.h>

#include <algorithm>

#include "tunnelstat/simd/kernels.hpp"

namespace tunnelstat::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline const double* as_doubles(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* as_doubles(cplx* p) { return reinterpret_cast<double*>(p); }

void multiply_avx2(cplx* data, const cplx* factors, std::size_t n) {
  double* d = as_doubles(data);
  const double* f = as_doubles(factors);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d a = _mm256_loadu_pd(d + 2 * i);
    const __m256d b = _mm256_loadu_pd(f + 2 * i);
    const __m256d b_re = _mm256_movedup_pd(b);       // br br
    const __m256d b_im = _mm256_permute_pd(b, 0xF);  // bi bi
    const __m256d a_sw = _mm256_permute_pd(a, 0x5);  // ai ar
    // even lanes: ar*br - ai*bi, odd lanes: ai*br + ar*bi
    _mm256_storeu_pd(d + 2 * i, _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_sw, b_im)));
  }
  for (; i < n; ++i) {
    const double ar = data[i].real();
    const double ai = data[i].imag();
    const double br = factors[i].real();
    const double bi = factors[i].imag();
    data[i] = cplx(ar * br - ai * bi, ar * bi + ai * br);
  }
}

double sum_norm_avx2(const cplx* a, std::size_t n) {
  const double* p = as_doubles(a);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(p + 2 * i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    total += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  }
  return total;
}

cplx conj_dot_avx2(const cplx* a, const cplx* b, std::size_t n) {
  const double* pa = as_doubles(a);
  const double* pb = as_doubles(b);
  __m256d acc_re = _mm256_setzero_pd();  // ar*br, ai*bi
  __m256d acc_im = _mm256_setzero_pd();  // ar*bi, ai*br
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * i);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    acc_re = _mm256_fmadd_pd(va, vb, acc_re);
    acc_im = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0x5), acc_im);
  }
  double re = hsum(acc_re);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc_im);
  double im = (lanes[0] + lanes[2]) - (lanes[1] + lanes[3]);
  for (; i < n; ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return {re, im};
}

double max_norm_avx2(const cplx* a, std::size_t n) {
  const double* p = as_doubles(a);
  __m256d best = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(p + 2 * i);
    const __m256d sq = _mm256_mul_pd(v, v);
    best = _mm256_max_pd(best, _mm256_hadd_pd(sq, sq));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, best);
  double m = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) {
    m = std::max(m, a[i].real() * a[i].real() + a[i].imag() * a[i].imag());
  }
  return m;
}

Moments moments_avx2(const cplx* a, const double* x, std::size_t n) {
  const double* p = as_doubles(a);
  __m256d mass = _mm256_setzero_pd();
  __m256d first = _mm256_setzero_pd();
  __m256d second = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v0 = _mm256_loadu_pd(p + 2 * i);
    const __m256d v1 = _mm256_loadu_pd(p + 2 * i + 4);
    // hadd interleaves the pairs: |a0|^2 |a2|^2 |a1|^2 |a3|^2
    const __m256d w = _mm256_hadd_pd(_mm256_mul_pd(v0, v0), _mm256_mul_pd(v1, v1));
    const __m256d xs = _mm256_permute4x64_pd(_mm256_loadu_pd(x + i), 0xD8);
    const __m256d xw = _mm256_mul_pd(xs, w);
    mass = _mm256_add_pd(mass, w);
    first = _mm256_add_pd(first, xw);
    second = _mm256_fmadd_pd(xs, xw, second);
  }
  Moments m{hsum(mass), hsum(first), hsum(second)};
  for (; i < n; ++i) {
    const double w = a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
    m.mass += w;
    m.first += x[i] * w;
    m.second += x[i] * x[i] * w;
  }
  return m;
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{"avx2",        multiply_avx2, sum_norm_avx2,
                                 conj_dot_avx2, max_norm_avx2, moments_avx2};
  return table;
}

}  // namespace tunnelstat::simd
