#include "tunnelstat/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <new>
#include <utility>

namespace tunnelstat {
namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct FftPlan::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

FftPlan::FftPlan(std::size_t n) : n_(n), plans_(std::make_unique<Plans>()) {
  data_ = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (data_ == nullptr) {
    throw std::bad_alloc();
  }
  auto* raw = reinterpret_cast<fftw_complex*>(data_);
  const int len = static_cast<int>(n);
  std::lock_guard lock(planner_mutex());
  plans_->forward = fftw_plan_dft_1d(len, raw, raw, FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->backward = fftw_plan_dft_1d(len, raw, raw, FFTW_BACKWARD, FFTW_ESTIMATE);
}

FftPlan::~FftPlan() {
  if (plans_) {
    std::lock_guard lock(planner_mutex());
    if (plans_->forward != nullptr) fftw_destroy_plan(plans_->forward);
    if (plans_->backward != nullptr) fftw_destroy_plan(plans_->backward);
  }
  if (data_ != nullptr) {
    fftw_free(data_);
  }
}

FftPlan::FftPlan(FftPlan&& other) noexcept
    : n_(other.n_), data_(other.data_), plans_(std::move(other.plans_)) {
  other.n_ = 0;
  other.data_ = nullptr;
}

FftPlan& FftPlan::operator=(FftPlan&& other) noexcept {
  std::swap(n_, other.n_);
  std::swap(data_, other.data_);
  std::swap(plans_, other.plans_);
  return *this;
}

void FftPlan::forward() { fftw_execute(plans_->forward); }

void FftPlan::backward() { fftw_execute(plans_->backward); }

}  // namespace tunnelstat
