#pragma once

// Scenario runner and overlap sweeps: two packets (B is a translated and
// boosted copy of A) scatter off the same barrier; once both have cleared it
// the pair statistics are measured and compared with the counting laws.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tunnelstat/grid.hpp"
#include "tunnelstat/occupancy.hpp"
#include "tunnelstat/propagator.hpp"
#include "tunnelstat/twoparticle.hpp"

namespace tunnelstat {

enum class BarrierMode { fixed, calibrate };

struct DensityOptions {
  std::optional<double> window_min;
  std::optional<double> window_max;
  std::size_t max_points = 256;
};

struct ScenarioConfig {
  double half_width = 100.0;
  std::size_t points = 8192;

  WavepacketSpec packet{-30.0, 8.0, 1.0};
  double separation = 20.0;         // B centre = A centre + separation
  double wavenumber_offset = 0.0;   // B wavenumber = A wavenumber + offset
  Exchange exchange = Exchange::boson;

  BarrierMode barrier_mode = BarrierMode::calibrate;
  double barrier_height = 0.0;      // used when barrier_mode == fixed
  CalibrationRequest calibration;   // width and centre apply in both modes

  RunSettings run;
  std::size_t followup_checks = 2;
  std::size_t followup_steps = 2000;
  double classify_tolerance = 0.005;
  double final_edge_limit = 1e-8;

  DensityOptions density;

  Grid1D grid() const { return Grid1D(half_width, points); }
  WavepacketSpec partner() const {
    return {packet.center + separation, packet.wavenumber + wavenumber_offset, packet.sigma};
  }
};

/// Throws ConfigError on the first violated invariant.
void validate(const ScenarioConfig& config);

enum class SweepParameter { separation_d, wavenumber_dk, phase_k0d };

struct SweepConfig {
  ScenarioConfig base;
  SweepParameter parameter = SweepParameter::separation_d;
  std::vector<double> values;
};

/// separation_d sets d, wavenumber_dk sets dk, phase_k0d shifts d by value / k0.
ScenarioConfig scenario_for(const SweepConfig& sweep, double value);

void validate(const SweepConfig& sweep);

struct Diagnostics {
  double norm_drift = 0.0;     // max |norm^2 - 1| of the two packets at measurement
  double leakage = 0.0;        // largest edge amplitude seen during the run
  double final_edge = 0.0;     // edge amplitude at measurement
  double t_meas = 0.0;
  std::size_t steps = 0;
  double barrier_height = 0.0;
  std::optional<double> calibrated_transmission;
};

struct ResultRow {
  double param = 0.0;
  std::optional<JointStats> stats;
  std::string label;
  Diagnostics diagnostics;
  std::vector<double> followup_times;
  std::vector<double> followup_a;
  bool valid = false;
  std::string error_kind;  // empty on success
  std::string error;
};

struct ScenarioOutcome {
  ResultRow row;
  SymmetrizedPair pair;  // state at the measurement time
};

/// Barrier used by a scenario: fixed, or calibrated against packet A.
struct ResolvedBarrier {
  BarrierPotential barrier;
  std::optional<CalibrationResult> calibration;
};

ResolvedBarrier resolve_barrier(const ScenarioConfig& config);

/// Full scenario. Throws on calibration failure, boundary contamination,
/// measurement timeout or Pauli degeneracy.
ScenarioOutcome simulate(const ScenarioConfig& config, const ResolvedBarrier& barrier);

ResultRow run_scenario(const ScenarioConfig& config);

/// One row per value, in input order. Per-row errors are recorded in the row.
/// The barrier is resolved once (rows only change packet B). workers <= 1
/// runs serially; output is identical for any worker count.
std::vector<ResultRow> sweep(const SweepConfig& config, std::size_t workers = 1,
                             std::ostream* progress = nullptr);

/// Same, with the barrier already resolved for config.base.
std::vector<ResultRow> sweep(const SweepConfig& config, const ResolvedBarrier& resolved,
                             std::size_t workers = 1, std::ostream* progress = nullptr);

struct ReferencePoint {
  std::string name;  // MB, BE, FD
  ExactProb p20, p02, p11;
  double distance = 0.0;  // max component difference to the measured triple
};

struct CountingReport {
  std::string label;
  double a = 0.0;
  std::vector<ReferencePoint> references;
  std::string nearest;
};

/// Attaches the N = M = 2 counting values and the classification label.
CountingReport compare_with_counting(const ResultRow& row, double tolerance = 0.005);

// --- output ------------------------------------------------------------------

/// param,p20,p02,p11,a,s_abs,i_plus_abs,i_minus_abs,t_a,t_b,label,norm_drift,leakage,t_meas,valid
void write_rows_csv(std::ostream& out, const std::vector<ResultRow>& rows);

nlohmann::json to_json(const ResultRow& row);
nlohmann::json to_json(const CountingReport& report);
nlohmann::json to_json(const CalibrationResult& calibration);

/// Short name of an exception type for the error_kind column.
std::string error_kind(const std::exception& e);

std::string_view to_string(SweepParameter p);

}  // namespace tunnelstat
