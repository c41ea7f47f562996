#include "tunnelstat/propagator.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tunnelstat/errors.hpp"
#include "tunnelstat/simd/kernels.hpp"

namespace tunnelstat {

void validate(const BarrierPotential& barrier, const Grid1D& grid) {
  if (!(barrier.height >= 0.0) || !std::isfinite(barrier.height)) {
    throw ConfigError("barrier height must be finite and >= 0");
  }
  if (!(barrier.width > 0.0)) {
    throw ConfigError("barrier width must be positive");
  }
  const double L = grid.half_width();
  if (!(barrier.lower() > -L && barrier.upper() < L)) {
    throw ConfigError("barrier support must lie inside the box (-L, L)");
  }
  if (grid.spacing() > barrier.width / 8.0) {
    std::ostringstream msg;
    msg << "barrier under-resolved: dx = " << grid.spacing() << " exceeds width/8 = "
        << barrier.width / 8.0;
    throw ConfigError(msg.str());
  }
}

std::vector<double> sample_potential(const BarrierPotential& barrier, const Grid1D& grid) {
  const double dx = grid.spacing();
  std::vector<double> v(grid.size(), 0.0);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid.position(j);
    const double covered =
        std::min(x + 0.5 * dx, barrier.upper()) - std::max(x - 0.5 * dx, barrier.lower());
    if (covered > 0.0) {
      v[j] = barrier.height * std::min(covered, dx) / dx;
    }
  }
  return v;
}

void validate_time_step(double dt, const Grid1D& grid) {
  if (!(dt > 0.0)) {
    throw ConfigError("time step must be positive");
  }
  const double kmax = grid.nyquist_wavenumber();
  if (!(dt * kmax * kmax / 2.0 < std::numbers::pi)) {
    std::ostringstream msg;
    msg << "time step " << dt << " violates dt*k_max^2/2 < pi (limit dt < "
        << 2.0 * std::numbers::pi / (kmax * kmax) << ")";
    throw ConfigError(msg.str());
  }
}

SplitOperator::SplitOperator(Grid1D grid, const BarrierPotential& barrier, double dt)
    : grid_(std::move(grid)), barrier_(barrier), dt_(dt) {
  validate(barrier_, grid_);
  validate_time_step(dt_, grid_);

  const auto v = sample_potential(barrier_, grid_);
  const auto nonzero = [](double x) { return x != 0.0; };
  const auto first = std::ranges::find_if(v, nonzero);
  const auto last = std::find_if(v.rbegin(), v.rend(), nonzero).base();
  if (first < last) {
    potential_begin_ = static_cast<std::size_t>(first - v.begin());
    half_potential_.reserve(static_cast<std::size_t>(last - first));
    for (auto it = first; it != last; ++it) {
      half_potential_.push_back(std::polar(1.0, -0.5 * (*it) * dt_));
    }
  }

  const double scale = 1.0 / static_cast<double>(grid_.size());
  kinetic_.resize(grid_.size());
  for (std::size_t m = 0; m < grid_.size(); ++m) {
    const double k = grid_.wavenumber(m);
    kinetic_[m] = std::polar(scale, -0.5 * k * k * dt_);
  }
}

Evolution::Evolution(std::shared_ptr<const SplitOperator> op, const Wavefunction& initial,
                     double edge_limit)
    : op_(std::move(op)),
      fft_(initial.grid().size()),
      start_time_(initial.time()),
      edge_limit_(edge_limit) {
  if (!(initial.grid() == op_->grid())) {
    throw GridMismatch("initial state and propagator use different grids");
  }
  std::ranges::copy(initial.amplitudes(), fft_.buffer().begin());
  max_edge_ = edge_amplitude(fft_.buffer(), op_->grid());
}

double Evolution::time() const {
  return start_time_ + static_cast<double>(steps_) * op_->dt();
}

void Evolution::advance(std::size_t steps) {
  const auto buf = fft_.buffer();
  const auto half_v = op_->half_potential_phase();
  const auto barrier_part = buf.subspan(op_->potential_begin(), half_v.size());
  for (std::size_t s = 0; s < steps; ++s) {
    simd::multiply(barrier_part, half_v);
    fft_.forward();
    simd::multiply(buf, op_->kinetic_phase());
    fft_.backward();
    simd::multiply(barrier_part, half_v);
    ++steps_;

    max_edge_ = std::max(max_edge_, edge_amplitude(buf, op_->grid()));
    if (max_edge_ > edge_limit_) {
      std::ostringstream msg;
      msg << "amplitude " << max_edge_ << " reached the box edge at t = " << time()
          << " (limit " << edge_limit_ << "); enlarge the box or shorten the run";
      throw BoundaryContamination(msg.str());
    }
  }
}

Wavefunction Evolution::snapshot() const {
  const auto buf = fft_.buffer();
  return Wavefunction(op_->grid(), std::vector<cplx>(buf.begin(), buf.end()), time());
}

Wavefunction step(const Wavefunction& psi, const BarrierPotential& barrier, double dt) {
  auto op = std::make_shared<const SplitOperator>(psi.grid(), barrier, dt);
  Evolution ev(std::move(op), psi, std::numeric_limits<double>::infinity());
  ev.advance(1);
  return ev.snapshot();
}

EvolveResult evolve(const Wavefunction& psi, const BarrierPotential& barrier,
                    const PropagationParams& params, double edge_limit) {
  if (params.steps == 0) {
    return {psi, edge_amplitude(psi.amplitudes(), psi.grid())};
  }
  auto op = std::make_shared<const SplitOperator>(psi.grid(), barrier, params.dt);
  Evolution ev(std::move(op), psi, edge_limit);
  ev.advance(params.steps);
  return {ev.snapshot(), ev.max_edge_amplitude()};
}

// --- analytic oracles ----------------------------------------------------------

namespace {

// sinh^2(x)/x^2 (over the barrier) or sin^2(x)/x^2 (above it), stable near 0.
double squared_ratio(double x, bool evanescent) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return evanescent ? 1.0 + x2 / 3.0 : 1.0 - x2 / 3.0;
  }
  const double r = (evanescent ? std::sinh(x) : std::sin(x)) / x;
  return r * r;
}

}  // namespace

double analytic_plane_transmission(double k, const BarrierPotential& barrier) {
  if (!(k > 0.0)) {
    throw ConfigError("plane-wave transmission needs k > 0");
  }
  const double energy = 0.5 * k * k;
  const double v0 = barrier.height;
  const double w = barrier.width;
  if (v0 == 0.0) {
    return 1.0;
  }
  const double q = std::sqrt(2.0 * std::abs(v0 - energy));
  const double g = squared_ratio(q * w, energy < v0);
  return 1.0 / (1.0 + v0 * v0 * w * w * g / (2.0 * energy));
}

double expected_packet_transmission(const WavepacketSpec& spec, const BarrierPotential& barrier) {
  // |phi(k)|^2 is Gaussian with standard deviation 1 / (2 sigma).
  const double sk = 1.0 / (2.0 * spec.sigma);
  const double toward = spec.center <= barrier.center ? 1.0 : -1.0;
  const double mean = toward * spec.wavenumber;  // mean speed toward the barrier
  const double lo = std::max(0.0, mean - 12.0 * sk);
  const double hi = mean + 12.0 * sk;
  if (!(hi > lo)) {
    return 0.0;
  }
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sk);
  auto integrand = [&](double k) {
    if (k <= 0.0) return 0.0;
    const double u = (k - mean) / sk;
    return norm * std::exp(-0.5 * u * u) * analytic_plane_transmission(k, barrier);
  };
  using boost::math::quadrature::gauss_kronrod;
  // The transmission has a kink at E = V0; integrate the two pieces separately.
  const double k_edge = std::sqrt(2.0 * barrier.height);
  double total = 0.0;
  if (k_edge > lo && k_edge < hi) {
    total += gauss_kronrod<double, 61>::integrate(integrand, lo, k_edge, 15, 1e-12);
    total += gauss_kronrod<double, 61>::integrate(integrand, k_edge, hi, 15, 1e-12);
  } else {
    total = gauss_kronrod<double, 61>::integrate(integrand, lo, hi, 15, 1e-12);
  }
  return total;
}

// --- measurement time ------------------------------------------------------------

Lobes measure_lobes(std::span<const cplx> amplitudes, const Grid1D& grid, double boundary) {
  const std::size_t split = grid.split_index(boundary);
  const double dx = grid.spacing();
  const auto summarize = [&](std::span<const cplx> a, std::span<const double> x) {
    const auto m = simd::moments(a, x);
    Lobe lobe;
    lobe.mass = m.mass * dx;
    if (m.mass > 0.0) {
      lobe.mean = m.first / m.mass;
      lobe.spread = std::sqrt(std::max(0.0, m.second / m.mass - lobe.mean * lobe.mean));
    }
    return lobe;
  };
  const auto x = grid.positions();
  return {summarize(amplitudes.first(split), x.first(split)),
          summarize(amplitudes.subspan(split), x.subspan(split))};
}

double barrier_amplitude(std::span<const cplx> amplitudes, const Grid1D& grid,
                         const BarrierPotential& barrier) {
  const std::size_t begin = grid.split_index(barrier.lower());
  const std::size_t end = grid.split_index(barrier.upper());
  if (end <= begin) {
    return 0.0;
  }
  return std::sqrt(simd::max_norm(amplitudes.subspan(begin, end - begin)));
}

namespace {

bool lobe_clear(const Lobe& lobe, double boundary, const MeasurementCriterion& c) {
  return lobe.mass < c.lobe_mass_floor ||
         std::abs(lobe.mean - boundary) >= c.lobe_separation * lobe.spread;
}

bool receding(const Lobe& now, const Lobe& before, double boundary,
              const MeasurementCriterion& c) {
  if (now.mass < c.lobe_mass_floor) {
    return true;
  }
  if (before.mass < c.lobe_mass_floor) {
    return false;
  }
  return std::abs(now.mean - boundary) > std::abs(before.mean - boundary);
}

}  // namespace

bool is_cleared(std::span<const cplx> amplitudes, const Grid1D& grid,
                const BarrierPotential& barrier, const MeasurementCriterion& criterion) {
  if (barrier_amplitude(amplitudes, grid, barrier) >= criterion.barrier_amplitude) {
    return false;
  }
  const auto lobes = measure_lobes(amplitudes, grid, barrier.center);
  return lobe_clear(lobes.negative, barrier.center, criterion) &&
         lobe_clear(lobes.positive, barrier.center, criterion);
}

ClearanceMonitor::ClearanceMonitor(Grid1D grid, BarrierPotential barrier,
                                   MeasurementCriterion criterion)
    : grid_(std::move(grid)), barrier_(barrier), criterion_(criterion) {}

bool ClearanceMonitor::update(std::span<const cplx> amplitudes) {
  const auto lobes = measure_lobes(amplitudes, grid_, barrier_.center);
  const bool moving_out =
      previous_.has_value() &&
      receding(lobes.negative, previous_->negative, barrier_.center, criterion_) &&
      receding(lobes.positive, previous_->positive, barrier_.center, criterion_);
  previous_ = lobes;
  return moving_out && is_cleared(amplitudes, grid_, barrier_, criterion_);
}

// --- single-packet runs and calibration ---------------------------------------------

TransmissionRun measure_transmission(const Grid1D& grid, const WavepacketSpec& spec,
                                     const BarrierPotential& barrier,
                                     const RunSettings& settings) {
  const Wavefunction initial = make_gaussian(grid, spec);
  auto op = std::make_shared<const SplitOperator>(grid, barrier, settings.dt);
  Evolution ev(op, initial, settings.edge_limit);
  ClearanceMonitor monitor(grid, barrier, settings.criterion);

  monitor.update(ev.amplitudes());
  while (true) {
    if (ev.steps_taken() >= settings.max_steps) {
      std::ostringstream msg;
      msg << "measurement criterion not met within " << settings.max_steps << " steps (t = "
          << ev.time() << ")";
      throw MeasurementTimeout(msg.str());
    }
    ev.advance(std::min(settings.check_interval, settings.max_steps - ev.steps_taken()));
    if (monitor.update(ev.amplitudes())) {
      break;
    }
  }

  const Wavefunction final_state = ev.snapshot();
  const Side far_side = spec.center < barrier.center ? Side::positive : Side::negative;
  TransmissionRun run;
  run.transmission = probability_on_side(final_state, far_side, barrier.center);
  run.time = ev.time();
  run.steps = ev.steps_taken();
  run.max_edge_amplitude = ev.max_edge_amplitude();
  run.norm_drift = std::abs(final_state.norm2() - 1.0);
  return run;
}

CalibrationResult calibrate_barrier(const Grid1D& grid, const WavepacketSpec& spec,
                                    const CalibrationRequest& request,
                                    const RunSettings& settings) {
  if (!(request.target > 0.0 && request.target <= 1.0)) {
    throw ConfigError("calibration target must lie in (0, 1]");
  }
  if (!(request.tolerance > 0.0)) {
    throw ConfigError("calibration tolerance must be positive");
  }
  double lo = request.height_min.value_or(0.0);
  double hi = request.height_max.value_or(spec.wavenumber * spec.wavenumber);
  if (!(lo >= 0.0 && hi > lo)) {
    throw ConfigError("calibration bracket must satisfy 0 <= height_min < height_max");
  }

  CalibrationResult result;
  const auto probe = [&](double height) {
    BarrierPotential b{height, request.width, request.center};
    TransmissionRun run = measure_transmission(grid, spec, b, settings);
    result.probes.push_back({height, run.transmission});
    return std::pair{b, run};
  };
  const auto accept = [&](const std::pair<BarrierPotential, TransmissionRun>& p) {
    result.barrier = p.first;
    result.run = p.second;
    return result;
  };
  const auto within = [&](const TransmissionRun& r) {
    return std::abs(r.transmission - request.target) <= request.tolerance;
  };

  const auto at_lo = probe(lo);
  if (within(at_lo.second)) return accept(at_lo);
  const auto at_hi = probe(hi);
  if (within(at_hi.second)) return accept(at_hi);

  const double f_lo = at_lo.second.transmission - request.target;
  const double f_hi = at_hi.second.transmission - request.target;
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    std::ostringstream msg;
    msg << "target transmission " << request.target << " not bracketed: T(" << lo
        << ") = " << at_lo.second.transmission << ", T(" << hi
        << ") = " << at_hi.second.transmission;
    throw CalibrationError(msg.str());
  }

  const bool lo_above = f_lo > 0.0;
  for (std::size_t it = 0; it < request.max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto at_mid = probe(mid);
    if (within(at_mid.second)) return accept(at_mid);
    const bool mid_above = at_mid.second.transmission > request.target;
    (mid_above == lo_above ? lo : hi) = mid;
  }
  std::ostringstream msg;
  msg << "calibration did not reach tolerance " << request.tolerance << " in "
      << request.max_iterations << " bisection steps; last bracket [" << lo << ", " << hi
      << "]; probes:";
  for (const auto& p : result.probes) {
    msg << " (" << p.height << ", " << p.transmission << ")";
  }
  throw CalibrationError(msg.str());
}

}  // namespace tunnelstat
