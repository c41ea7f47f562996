#pragma once

// Unitary single-particle evolution through a rectangular barrier, the
// plane-wave and packet-averaged transmission oracles, the "packets have
// cleared the barrier" measurement test, and barrier calibration.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "tunnelstat/fft.hpp"
#include "tunnelstat/grid.hpp"

namespace tunnelstat {

struct BarrierPotential {
  double height = 0.0;
  double width = 1.0;
  double center = 0.0;

  double lower() const { return center - 0.5 * width; }
  double upper() const { return center + 0.5 * width; }
};

/// Throws ConfigError unless height >= 0, width > 0, the support lies inside
/// (-L, L) and the barrier spans at least eight grid cells.
void validate(const BarrierPotential& barrier, const Grid1D& grid);

/// Potential on the grid. Each sample carries the barrier's average over its
/// cell [x_j - dx/2, x_j + dx/2], so the sampled barrier has exactly the
/// nominal area height * width.
std::vector<double> sample_potential(const BarrierPotential& barrier, const Grid1D& grid);

struct PropagationParams {
  double dt = 0.0;
  std::size_t steps = 0;
};

/// Phase-wrap guard: dt * k_max^2 / 2 < pi with k_max = pi / dx.
void validate_time_step(double dt, const Grid1D& grid);

/// Immutable phase tables for Strang splitting exp(-iV dt/2) exp(-iT dt) exp(-iV dt/2).
class SplitOperator {
 public:
  SplitOperator(Grid1D grid, const BarrierPotential& barrier, double dt);

  const Grid1D& grid() const { return grid_; }
  const BarrierPotential& barrier() const { return barrier_; }
  double dt() const { return dt_; }

  /// exp(-i V dt / 2) restricted to [potential_begin, potential_end); the
  /// phase is exactly 1 everywhere else.
  std::span<const cplx> half_potential_phase() const { return half_potential_; }
  std::size_t potential_begin() const { return potential_begin_; }
  /// exp(-i k^2 dt / 2) / G, in FFT bin order (folds in the inverse-FFT scale).
  std::span<const cplx> kinetic_phase() const { return kinetic_; }

 private:
  Grid1D grid_;
  BarrierPotential barrier_;
  double dt_;
  std::size_t potential_begin_ = 0;
  std::vector<cplx> half_potential_;
  std::vector<cplx> kinetic_;
};

/// One packet being propagated in place. Tracks the largest amplitude seen at
/// the box edges after every step and throws BoundaryContamination once it
/// exceeds the limit.
class Evolution {
 public:
  Evolution(std::shared_ptr<const SplitOperator> op, const Wavefunction& initial,
            double edge_limit = 1e-6);

  void advance(std::size_t steps);

  std::span<const cplx> amplitudes() const { return fft_.buffer(); }
  double time() const;
  std::size_t steps_taken() const { return steps_; }
  double max_edge_amplitude() const { return max_edge_; }
  Wavefunction snapshot() const;

 private:
  std::shared_ptr<const SplitOperator> op_;
  FftPlan fft_;
  double start_time_;
  double edge_limit_;
  std::size_t steps_ = 0;
  double max_edge_ = 0.0;
};

Wavefunction step(const Wavefunction& psi, const BarrierPotential& barrier, double dt);

struct EvolveResult {
  Wavefunction psi;
  double max_edge_amplitude = 0.0;
};

EvolveResult evolve(const Wavefunction& psi, const BarrierPotential& barrier,
                    const PropagationParams& params, double edge_limit = 1e-6);

/// Plane-wave transmission of the rectangular barrier at wavenumber k > 0.
double analytic_plane_transmission(double k, const BarrierPotential& barrier);

/// Transmission averaged over the packet's Gaussian momentum density. Only
/// components heading toward the barrier can cross it.
double expected_packet_transmission(const WavepacketSpec& spec, const BarrierPotential& barrier);

// --- measurement time --------------------------------------------------------

/// When t counts as "sufficiently large": nothing left inside the barrier and
/// every lobe well clear of the boundary and moving away from it.
struct MeasurementCriterion {
  double barrier_amplitude = 1e-6;
  double lobe_separation = 5.0;  // in units of the lobe's own spread
  double lobe_mass_floor = 1e-6;
};

struct Lobe {
  double mass = 0.0;
  double mean = 0.0;
  double spread = 0.0;
};

struct Lobes {
  Lobe negative;
  Lobe positive;
};

Lobes measure_lobes(std::span<const cplx> amplitudes, const Grid1D& grid, double boundary);

/// Largest |psi| over samples inside the barrier support.
double barrier_amplitude(std::span<const cplx> amplitudes, const Grid1D& grid,
                         const BarrierPotential& barrier);

/// The static part of the criterion (no motion check).
bool is_cleared(std::span<const cplx> amplitudes, const Grid1D& grid,
                const BarrierPotential& barrier, const MeasurementCriterion& criterion);

/// Applies the full criterion across successive checks of one packet: the
/// static test must hold and every lobe must have moved away from the
/// boundary since the previous check.
class ClearanceMonitor {
 public:
  ClearanceMonitor(Grid1D grid, BarrierPotential barrier, MeasurementCriterion criterion);

  bool update(std::span<const cplx> amplitudes);

 private:
  Grid1D grid_;
  BarrierPotential barrier_;
  MeasurementCriterion criterion_;
  std::optional<Lobes> previous_;
};

/// Numerical settings shared by every simulated run.
struct RunSettings {
  double dt = 3e-4;
  std::size_t max_steps = 100000;
  std::size_t check_interval = 100;
  double edge_limit = 1e-6;
  MeasurementCriterion criterion;
};

struct TransmissionRun {
  double transmission = 0.0;  // mass on the far side of the barrier
  double time = 0.0;
  std::size_t steps = 0;
  double max_edge_amplitude = 0.0;
  double norm_drift = 0.0;
};

/// Evolves a single packet until the measurement criterion holds and reports
/// the probability on the side of the barrier opposite to its start.
TransmissionRun measure_transmission(const Grid1D& grid, const WavepacketSpec& spec,
                                     const BarrierPotential& barrier,
                                     const RunSettings& settings);

struct CalibrationRequest {
  double target = 0.5;
  double tolerance = 0.005;
  double width = 0.5;
  double center = 0.0;
  /// Height bracket. Missing ends default to [0, k0^2] (twice the packet energy).
  std::optional<double> height_min;
  std::optional<double> height_max;
  std::size_t max_iterations = 60;
};

struct BracketProbe {
  double height = 0.0;
  double transmission = 0.0;
};

struct CalibrationResult {
  BarrierPotential barrier;
  TransmissionRun run;
  std::vector<BracketProbe> probes;
};

/// Bisection on the barrier height against fully simulated transmission until
/// |T_sim - target| <= tolerance. Throws CalibrationError when the bracket
/// does not straddle the target or the iteration budget runs out.
CalibrationResult calibrate_barrier(const Grid1D& grid, const WavepacketSpec& spec,
                                    const CalibrationRequest& request,
                                    const RunSettings& settings);

}  // namespace tunnelstat
