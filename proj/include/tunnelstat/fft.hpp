#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace tunnelstat {

/// In-place complex FFT of a fixed length over an owned, SIMD-aligned buffer.
///
/// Unnormalized in both directions (backward(forward(x)) == n * x). Plans are
/// created with estimate-only planning, so the same length always yields the
/// same plan and bit-identical output. Instances may be used concurrently
/// from different threads; planning itself is serialized internally.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  FftPlan(FftPlan&&) noexcept;
  FftPlan& operator=(FftPlan&&) noexcept;

  std::size_t size() const { return n_; }
  std::span<std::complex<double>> buffer() { return {data_, n_}; }
  std::span<const std::complex<double>> buffer() const { return {data_, n_}; }

  void forward();
  void backward();

 private:
  struct Plans;
  std::size_t n_ = 0;
  std::complex<double>* data_ = nullptr;
  std::unique_ptr<Plans> plans_;
};

}  // namespace tunnelstat
