#pragma once

// Uniform periodic 1D grid, sampled wavefunctions, Gaussian packets and the
// quadratures (overlaps, half-line integrals) consumed by the pair statistics.
//
// Units: hbar = m = 1. Sample j sits at x_j = (j - G/2) dx, so x_0 = -L and
// x = 0 is always a sample (index G/2).

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace tunnelstat {

using cplx = std::complex<double>;

class Grid1D {
 public:
  /// Throws ConfigError unless half_width > 0 and points is a power of two >= 2.
  Grid1D(double half_width, std::size_t points);

  double half_width() const { return half_width_; }
  std::size_t size() const { return points_; }
  double spacing() const { return dx_; }
  double position(std::size_t j) const { return (*positions_)[j]; }
  std::span<const double> positions() const { return *positions_; }

  /// Index of x = 0.
  std::size_t center_index() const { return points_ / 2; }

  /// First sample with x_j >= boundary; a sample on the boundary belongs to
  /// the positive side.
  std::size_t split_index(double boundary) const;

  /// Angular wavenumber of FFT bin m (standard FFT ordering).
  double wavenumber(std::size_t m) const;
  double nyquist_wavenumber() const;

  /// Samples counted as "box edge" at each end for leakage checks.
  std::size_t edge_samples() const { return points_ / 128 > 0 ? points_ / 128 : 1; }

  bool operator==(const Grid1D& other) const {
    return half_width_ == other.half_width_ && points_ == other.points_;
  }

 private:
  double half_width_;
  std::size_t points_;
  double dx_;
  std::shared_ptr<const std::vector<double>> positions_;
};

/// Gaussian packet parameters. sigma is the standard deviation of |psi|^2.
struct WavepacketSpec {
  double center = 0.0;
  double wavenumber = 0.0;
  double sigma = 1.0;
};

/// Throws ConfigError naming the violated bound (support or Nyquist margin).
void validate(const WavepacketSpec& spec, const Grid1D& grid);

/// Complex amplitudes on a grid at time t. Immutable once built.
class Wavefunction {
 public:
  Wavefunction(Grid1D grid, std::vector<cplx> amplitudes, double time);

  const Grid1D& grid() const { return grid_; }
  std::span<const cplx> amplitudes() const { return amplitudes_; }
  double time() const { return time_; }

  /// sum |psi_j|^2 dx
  double norm2() const;

 private:
  Grid1D grid_;
  std::vector<cplx> amplitudes_;
  double time_;
};

enum class Side { negative, positive };

Wavefunction make_gaussian(const Grid1D& grid, const WavepacketSpec& spec);

/// <psi|phi> = sum conj(psi_j) phi_j dx. Accumulated as the two half-line
/// partials around x = 0, so it equals
/// half_line_overlap(negative, 0) + half_line_overlap(positive, 0) bit for bit.
cplx inner_product(const Wavefunction& psi, const Wavefunction& phi);

/// Integral of conj(psi) phi over x < boundary (negative) or x >= boundary (positive).
cplx half_line_overlap(const Wavefunction& psi, const Wavefunction& phi, Side side,
                       double boundary);

double probability_on_side(const Wavefunction& psi, Side side, double boundary);

double position_expectation(const Wavefunction& psi);
double position_spread(const Wavefunction& psi);

/// Mean wavenumber from the discrete spectrum.
double momentum_expectation(const Wavefunction& psi);

/// Norm squared computed from the spectral representation (Parseval).
double spectral_norm2(const Wavefunction& psi);

/// Largest |psi| among the edge samples at either end of the box.
double edge_amplitude(std::span<const cplx> amplitudes, const Grid1D& grid);

/// CSV with header x,re,im,abs2; one line per sample, 12 significant digits.
void write_wavefunction_csv(std::ostream& out, const Wavefunction& psi);

}  // namespace tunnelstat
