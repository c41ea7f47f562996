#include "tunnelstat/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

#include "tunnelstat/errors.hpp"
#include "tunnelstat/fft.hpp"
#include "tunnelstat/format.hpp"
#include "tunnelstat/simd/kernels.hpp"

namespace tunnelstat {

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

Grid1D::Grid1D(double half_width, std::size_t points)
    : half_width_(half_width), points_(points), dx_(0.0) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw ConfigError("grid half_width must be positive and finite");
  }
  if (points < 2 || !std::has_single_bit(points)) {
    throw ConfigError("grid points must be a power of two >= 2, got " + std::to_string(points));
  }
  dx_ = 2.0 * half_width / static_cast<double>(points);
  auto x = std::make_shared<std::vector<double>>(points);
  const auto half = static_cast<std::ptrdiff_t>(points / 2);
  for (std::size_t j = 0; j < points; ++j) {
    (*x)[j] = static_cast<double>(static_cast<std::ptrdiff_t>(j) - half) * dx_;
  }
  positions_ = std::move(x);
}

std::size_t Grid1D::split_index(double boundary) const {
  const auto& x = *positions_;
  return static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), boundary) - x.begin());
}

double Grid1D::wavenumber(std::size_t m) const {
  const double dk = 2.0 * std::numbers::pi / (static_cast<double>(points_) * dx_);
  const auto signed_m = m < points_ / 2 ? static_cast<double>(m)
                                        : static_cast<double>(m) - static_cast<double>(points_);
  return signed_m * dk;
}

double Grid1D::nyquist_wavenumber() const { return std::numbers::pi / dx_; }

void validate(const WavepacketSpec& spec, const Grid1D& grid) {
  std::ostringstream msg;
  if (!(spec.sigma > 0.0)) {
    throw ConfigError("packet sigma must be positive");
  }
  if (!(std::abs(spec.center) + 6.0 * spec.sigma < grid.half_width())) {
    msg << "packet support violates |x0| + 6 sigma < L (" << std::abs(spec.center) << " + "
        << 6.0 * spec.sigma << " >= " << grid.half_width() << ")";
    throw ConfigError(msg.str());
  }
  if (!(std::abs(spec.wavenumber) + 3.0 / spec.sigma < grid.nyquist_wavenumber())) {
    msg << "packet violates Nyquist margin |k0| + 3/sigma < pi/dx ("
        << std::abs(spec.wavenumber) + 3.0 / spec.sigma << " >= " << grid.nyquist_wavenumber()
        << ")";
    throw ConfigError(msg.str());
  }
}

Wavefunction::Wavefunction(Grid1D grid, std::vector<cplx> amplitudes, double time)
    : grid_(std::move(grid)), amplitudes_(std::move(amplitudes)), time_(time) {
  if (amplitudes_.size() != grid_.size()) {
    throw GridMismatch("amplitude count does not match grid size");
  }
}

double Wavefunction::norm2() const { return simd::sum_norm(amplitudes_) * grid_.spacing(); }

Wavefunction make_gaussian(const Grid1D& grid, const WavepacketSpec& spec) {
  validate(spec, grid);
  const double prefactor = std::pow(2.0 * std::numbers::pi * spec.sigma * spec.sigma, -0.25);
  const double inv4s2 = 1.0 / (4.0 * spec.sigma * spec.sigma);
  std::vector<cplx> amps(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid.position(j);
    const double u = x - spec.center;
    amps[j] = prefactor * std::exp(-u * u * inv4s2) * std::polar(1.0, spec.wavenumber * x);
  }
  const double scale = 1.0 / std::sqrt(simd::sum_norm(amps) * grid.spacing());
  for (auto& a : amps) {
    a *= scale;
  }
  return Wavefunction(grid, std::move(amps), 0.0);
}

namespace {

void require_compatible(const Wavefunction& psi, const Wavefunction& phi) {
  if (!(psi.grid() == phi.grid())) {
    throw GridMismatch("wavefunctions live on different grids");
  }
  if (psi.time() != phi.time()) {
    throw GridMismatch("wavefunctions are at different times");
  }
}

cplx partial_overlap(const Wavefunction& psi, const Wavefunction& phi, std::size_t begin,
                     std::size_t end) {
  return simd::conj_dot(psi.amplitudes().subspan(begin, end - begin),
                        phi.amplitudes().subspan(begin, end - begin));
}

}  // namespace

cplx inner_product(const Wavefunction& psi, const Wavefunction& phi) {
  require_compatible(psi, phi);
  const double dx = psi.grid().spacing();
  const std::size_t mid = psi.grid().center_index();
  const std::size_t n = psi.grid().size();
  return partial_overlap(psi, phi, 0, mid) * dx + partial_overlap(psi, phi, mid, n) * dx;
}

cplx half_line_overlap(const Wavefunction& psi, const Wavefunction& phi, Side side,
                       double boundary) {
  require_compatible(psi, phi);
  const std::size_t split = psi.grid().split_index(boundary);
  const std::size_t n = psi.grid().size();
  const double dx = psi.grid().spacing();
  return side == Side::negative ? partial_overlap(psi, phi, 0, split) * dx
                                : partial_overlap(psi, phi, split, n) * dx;
}

double probability_on_side(const Wavefunction& psi, Side side, double boundary) {
  const std::size_t split = psi.grid().split_index(boundary);
  const auto amps = psi.amplitudes();
  const auto part = side == Side::negative ? amps.first(split) : amps.subspan(split);
  return simd::sum_norm(part) * psi.grid().spacing();
}

double position_expectation(const Wavefunction& psi) {
  const auto m = simd::moments(psi.amplitudes(), psi.grid().positions());
  return m.first / m.mass;
}

double position_spread(const Wavefunction& psi) {
  const auto m = simd::moments(psi.amplitudes(), psi.grid().positions());
  const double mean = m.first / m.mass;
  return std::sqrt(std::max(0.0, m.second / m.mass - mean * mean));
}

namespace {

std::vector<double> power_spectrum(const Wavefunction& psi) {
  FftPlan fft(psi.grid().size());
  std::ranges::copy(psi.amplitudes(), fft.buffer().begin());
  fft.forward();
  std::vector<double> power(fft.size());
  std::ranges::transform(fft.buffer(), power.begin(), [](cplx c) { return std::norm(c); });
  return power;
}

}  // namespace

double momentum_expectation(const Wavefunction& psi) {
  const auto power = power_spectrum(psi);
  double total = 0.0;
  double weighted = 0.0;
  for (std::size_t m = 0; m < power.size(); ++m) {
    total += power[m];
    weighted += psi.grid().wavenumber(m) * power[m];
  }
  return weighted / total;
}

double spectral_norm2(const Wavefunction& psi) {
  const auto power = power_spectrum(psi);
  double total = 0.0;
  for (double p : power) total += p;
  // Unnormalized DFT: sum |F|^2 = G sum |f|^2.
  return total * psi.grid().spacing() / static_cast<double>(psi.grid().size());
}

double edge_amplitude(std::span<const cplx> amplitudes, const Grid1D& grid) {
  const std::size_t e = grid.edge_samples();
  const double left = simd::max_norm(amplitudes.first(e));
  const double right = simd::max_norm(amplitudes.last(e));
  return std::sqrt(std::max(left, right));
}

void write_wavefunction_csv(std::ostream& out, const Wavefunction& psi) {
  out << "x,re,im,abs2\n";
  const auto amps = psi.amplitudes();
  for (std::size_t j = 0; j < amps.size(); ++j) {
    out << format_number(psi.grid().position(j)) << ',' << format_number(amps[j].real()) << ','
        << format_number(amps[j].imag()) << ',' << format_number(std::norm(amps[j])) << '\n';
  }
}

}  // namespace tunnelstat
