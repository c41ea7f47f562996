#include "tunnelstat/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "tunnelstat/errors.hpp"
#include "tunnelstat/format.hpp"

namespace tunnelstat {

void validate(const ScenarioConfig& config) {
  const Grid1D grid = config.grid();
  validate(config.packet, grid);
  validate(config.partner(), grid);
  if (!(config.separation >= 0.0)) {
    throw ConfigError("partner separation must be >= 0");
  }
  BarrierPotential probe{config.barrier_height, config.calibration.width,
                         config.calibration.center};
  validate(probe, grid);
  if (config.barrier_mode == BarrierMode::calibrate &&
      !(config.calibration.target > 0.0 && config.calibration.target < 1.0)) {
    throw ConfigError("calibration target must lie in (0, 1)");
  }
  validate_time_step(config.run.dt, grid);
  if (config.run.check_interval == 0) {
    throw ConfigError("check_interval must be positive");
  }
}

ScenarioConfig scenario_for(const SweepConfig& sweep, double value) {
  ScenarioConfig c = sweep.base;
  switch (sweep.parameter) {
    case SweepParameter::separation_d: c.separation = value; break;
    case SweepParameter::wavenumber_dk: c.wavenumber_offset = value; break;
    case SweepParameter::phase_k0d:
      c.separation = sweep.base.separation + value / c.packet.wavenumber;
      break;
  }
  return c;
}

void validate(const SweepConfig& sweep) {
  if (sweep.values.empty()) {
    throw ConfigError("sweep needs at least one value");
  }
  if (sweep.parameter == SweepParameter::phase_k0d && sweep.base.packet.wavenumber == 0.0) {
    throw ConfigError("phase_k0d sweep needs a nonzero packet wavenumber");
  }
  for (double v : sweep.values) {
    validate(scenario_for(sweep, v));
  }
}

std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::separation_d: return "separation_d";
    case SweepParameter::wavenumber_dk: return "wavenumber_dk";
    case SweepParameter::phase_k0d: return "phase_k0d";
  }
  return "unknown";
}

ResolvedBarrier resolve_barrier(const ScenarioConfig& config) {
  const auto& req = config.calibration;
  if (config.barrier_mode == BarrierMode::fixed) {
    return {BarrierPotential{config.barrier_height, req.width, req.center}, std::nullopt};
  }
  CalibrationResult cal = calibrate_barrier(config.grid(), config.packet, req, config.run);
  const BarrierPotential b = cal.barrier;
  return {b, std::move(cal)};
}

namespace {

// Steps both packets in lockstep until each one's clearance monitor agrees.
void advance_until_cleared(Evolution& a, Evolution& b, ClearanceMonitor& ma,
                           ClearanceMonitor& mb, const RunSettings& run) {
  ma.update(a.amplitudes());
  mb.update(b.amplitudes());
  while (true) {
    if (a.steps_taken() >= run.max_steps) {
      std::ostringstream msg;
      msg << "measurement criterion not met within " << run.max_steps << " steps (t = "
          << a.time() << ")";
      throw MeasurementTimeout(msg.str());
    }
    const std::size_t n = std::min(run.check_interval, run.max_steps - a.steps_taken());
    a.advance(n);
    b.advance(n);
    const bool ready_a = ma.update(a.amplitudes());
    const bool ready_b = mb.update(b.amplitudes());
    if (ready_a && ready_b) {
      return;
    }
  }
}

}  // namespace

ScenarioOutcome simulate(const ScenarioConfig& config, const ResolvedBarrier& resolved) {
  validate(config);
  const Grid1D grid = config.grid();
  const BarrierPotential& barrier = resolved.barrier;

  const Wavefunction a0 = make_gaussian(grid, config.packet);
  const Wavefunction b0 = make_gaussian(grid, config.partner());
  // The overlap is conserved, so a degenerate fermion pair fails here, before any work.
  (void)make_pair(a0, b0, config.exchange);

  auto op = std::make_shared<const SplitOperator>(grid, barrier, config.run.dt);
  Evolution ea(op, a0, config.run.edge_limit);
  Evolution eb(op, b0, config.run.edge_limit);
  ClearanceMonitor ma(grid, barrier, config.run.criterion);
  ClearanceMonitor mb(grid, barrier, config.run.criterion);
  advance_until_cleared(ea, eb, ma, mb, config.run);

  Wavefunction a_meas = ea.snapshot();
  Wavefunction b_meas = eb.snapshot();
  Diagnostics diag;
  diag.norm_drift = std::max(std::abs(a_meas.norm2() - 1.0), std::abs(b_meas.norm2() - 1.0));
  diag.final_edge = std::max(edge_amplitude(a_meas.amplitudes(), grid),
                             edge_amplitude(b_meas.amplitudes(), grid));
  diag.t_meas = ea.time();
  diag.steps = ea.steps_taken();
  diag.barrier_height = barrier.height;
  if (resolved.calibration) {
    diag.calibrated_transmission = resolved.calibration->run.transmission;
  }

  SymmetrizedPair pair = make_pair(std::move(a_meas), std::move(b_meas), config.exchange);
  const JointStats stats = joint_probabilities(pair, barrier, config.run.criterion);

  ResultRow row;
  for (std::size_t i = 0; i < config.followup_checks; ++i) {
    ea.advance(config.followup_steps);
    eb.advance(config.followup_steps);
    const auto later = make_pair(ea.snapshot(), eb.snapshot(), config.exchange);
    row.followup_times.push_back(ea.time());
    row.followup_a.push_back(joint_probabilities(later, barrier.center).a);
  }
  diag.leakage = std::max(ea.max_edge_amplitude(), eb.max_edge_amplitude());

  row.stats = stats;
  row.diagnostics = diag;
  row.label = std::string(label(classify_pair(stats.a, config.classify_tolerance)));
  row.valid = std::abs(stats.sum_check - 1.0) <= 1e-6 && diag.norm_drift <= 1e-10 &&
              diag.leakage <= config.run.edge_limit && diag.final_edge <= config.final_edge_limit;
  return {std::move(row), std::move(pair)};
}

ResultRow run_scenario(const ScenarioConfig& config) {
  validate(config);
  ResultRow row = simulate(config, resolve_barrier(config)).row;
  row.param = config.separation;
  return row;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const PauliDegeneracy*>(&e)) return "pauli-degeneracy";
  if (dynamic_cast<const CalibrationError*>(&e)) return "calibration";
  if (dynamic_cast<const BoundaryContamination*>(&e)) return "boundary-contamination";
  if (dynamic_cast<const MeasurementTimeout*>(&e)) return "measurement-timeout";
  if (dynamic_cast<const PrematureMeasurement*>(&e)) return "premature-measurement";
  if (dynamic_cast<const ConsistencyError*>(&e)) return "consistency";
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  return "error";
}

std::vector<ResultRow> sweep(const SweepConfig& config, std::size_t workers,
                             std::ostream* progress) {
  validate(config);
  return sweep(config, resolve_barrier(config.base), workers, progress);
}

std::vector<ResultRow> sweep(const SweepConfig& config, const ResolvedBarrier& resolved,
                             std::size_t workers, std::ostream* progress) {
  validate(config);

  std::vector<ResultRow> rows(config.values.size());
  std::mutex log_mutex;
  const auto run_row = [&](std::size_t i) {
    const double value = config.values[i];
    ResultRow row;
    try {
      row = simulate(scenario_for(config, value), resolved).row;
    } catch (const std::exception& e) {
      row = ResultRow{};
      row.label = "error";
      row.error_kind = error_kind(e);
      row.error = e.what();
      row.diagnostics.barrier_height = resolved.barrier.height;
    }
    row.param = value;
    if (progress != nullptr) {
      std::lock_guard lock(log_mutex);
      *progress << "row " << i + 1 << "/" << rows.size() << " " << to_string(config.parameter)
                << "=" << format_number(value) << " -> "
                << (row.stats ? "a=" + format_number(row.stats->a) : row.error_kind) << '\n';
    }
    rows[i] = std::move(row);
  };

  if (workers <= 1) {
    for (std::size_t i = 0; i < rows.size(); ++i) run_row(i);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < std::min(workers, rows.size()); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < rows.size(); i = next++) run_row(i);
    });
  }
  pool.clear();
  return rows;
}

CountingReport compare_with_counting(const ResultRow& row, double tolerance) {
  CountingReport report;
  if (!row.stats) {
    report.label = row.label;
    return report;
  }
  const JointStats& st = *row.stats;
  report.a = st.a;
  report.label = std::string(label(classify_pair(st.a, tolerance)));

  const OccupancyVector both_left({2, 0});
  const OccupancyVector both_right({0, 2});
  const OccupancyVector split({1, 1});
  const auto distance = [&](const ExactProb& p20, const ExactProb& p02, const ExactProb& p11) {
    return std::max({std::abs(st.p20 - p20.to_double()), std::abs(st.p02 - p02.to_double()),
                     std::abs(st.p11 - p11.to_double())});
  };
  const auto add = [&](std::string name, ExactProb p20, ExactProb p02, ExactProb p11) {
    const double d = distance(p20, p02, p11);
    report.references.push_back({std::move(name), std::move(p20), std::move(p02), std::move(p11), d});
  };
  add("MB", mb_probability(both_left), mb_probability(both_right), mb_probability(split));
  add("BE", be_probability(2, 2), be_probability(2, 2), be_probability(2, 2));
  add("FD", fd_probability(both_left), fd_probability(both_right), fd_probability(split));
  const auto nearest = std::ranges::min_element(
      report.references, {}, [](const ReferencePoint& r) { return r.distance; });
  report.nearest = nearest->name;
  return report;
}

// --- output --------------------------------------------------------------------

void write_rows_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "param,p20,p02,p11,a,s_abs,i_plus_abs,i_minus_abs,t_a,t_b,label,norm_drift,leakage,"
         "t_meas,valid\n";
  const auto num = [](double v) { return format_number(v); };
  for (const auto& row : rows) {
    out << num(row.param) << ',';
    if (row.stats) {
      const auto& s = *row.stats;
      out << num(s.p20) << ',' << num(s.p02) << ',' << num(s.p11) << ',' << num(s.a) << ','
          << num(s.s_abs()) << ',' << num(std::abs(s.i_plus)) << ','
          << num(std::abs(s.i_minus)) << ',' << num(s.t_a) << ',' << num(s.t_b) << ',';
    } else {
      out << "nan,nan,nan,nan,nan,nan,nan,nan,nan,";
    }
    const auto& d = row.diagnostics;
    out << (row.error_kind.empty() ? row.label : row.error_kind) << ',' << num(d.norm_drift)
        << ',' << num(d.leakage) << ',' << num(d.t_meas) << ','
        << (row.valid ? "true" : "false") << '\n';
  }
}

namespace {

nlohmann::json complex_json(cplx c) {
  return {{"re", c.real()}, {"im", c.imag()}, {"abs", std::abs(c)}};
}

}  // namespace

nlohmann::json to_json(const ResultRow& row) {
  nlohmann::json j;
  j["param"] = row.param;
  j["label"] = row.label;
  j["valid"] = row.valid;
  if (row.stats) {
    const auto& s = *row.stats;
    j["p20"] = s.p20;
    j["p02"] = s.p02;
    j["p11"] = s.p11;
    j["a"] = s.a;
    j["sum_check"] = s.sum_check;
    j["s"] = complex_json(s.overlap);
    j["i_plus"] = complex_json(s.i_plus);
    j["i_minus"] = complex_json(s.i_minus);
    j["t_a"] = s.t_a;
    j["t_b"] = s.t_b;
    j["r_a"] = s.r_a;
    j["r_b"] = s.r_b;
  }
  const auto& d = row.diagnostics;
  j["diagnostics"] = {{"norm_drift", d.norm_drift},   {"leakage", d.leakage},
                      {"final_edge", d.final_edge},   {"t_meas", d.t_meas},
                      {"steps", d.steps},             {"barrier_height", d.barrier_height}};
  if (d.calibrated_transmission) {
    j["diagnostics"]["calibrated_transmission"] = *d.calibrated_transmission;
  }
  j["followup"] = nlohmann::json::array();
  for (std::size_t i = 0; i < row.followup_a.size(); ++i) {
    j["followup"].push_back({{"t", row.followup_times[i]}, {"a", row.followup_a[i]}});
  }
  if (!row.error_kind.empty()) {
    j["error"] = {{"kind", row.error_kind}, {"message", row.error}};
  }
  return j;
}

nlohmann::json to_json(const CountingReport& report) {
  nlohmann::json j;
  j["label"] = report.label;
  j["a"] = report.a;
  j["nearest"] = report.nearest;
  j["references"] = nlohmann::json::array();
  for (const auto& r : report.references) {
    j["references"].push_back({{"name", r.name},
                               {"p20", r.p20.str()},
                               {"p02", r.p02.str()},
                               {"p11", r.p11.str()},
                               {"distance", r.distance}});
  }
  return j;
}

nlohmann::json to_json(const CalibrationResult& cal) {
  nlohmann::json j;
  j["height"] = cal.barrier.height;
  j["width"] = cal.barrier.width;
  j["center"] = cal.barrier.center;
  j["transmission"] = cal.run.transmission;
  j["measurement_time"] = cal.run.time;
  j["steps"] = cal.run.steps;
  j["norm_drift"] = cal.run.norm_drift;
  j["probes"] = nlohmann::json::array();
  for (const auto& p : cal.probes) {
    j["probes"].push_back({{"height", p.height}, {"transmission", p.transmission}});
  }
  return j;
}

}  // namespace tunnelstat
