// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion passes.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "tunnelstat/cli.hpp"
#include "tunnelstat/config.hpp"
#include "tunnelstat/errors.hpp"
#include "tunnelstat/experiment.hpp"
#include "tunnelstat/occupancy.hpp"

using namespace tunnelstat;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = TUNNELSTAT_CONFIG_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string secs(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f s", s);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Every emitted row, for the sum-rule check.
std::vector<ResultRow> g_rows;

// One calibration per distinct (grid, packet, barrier, evolution, measurement) block.
std::map<std::string, ResolvedBarrier> g_barriers;

const ResolvedBarrier& barrier_for(const ScenarioConfig& c) {
  auto doc = to_document(c);
  for (const char* k : {"partner", "pair", "density"}) doc.erase(k);
  const std::string key = doc.dump();
  auto it = g_barriers.find(key);
  if (it == g_barriers.end()) it = g_barriers.emplace(key, resolve_barrier(c)).first;
  return it->second;
}

ScenarioConfig load_scenario(const std::string& name) {
  ScenarioConfig c = scenario_from_document(read_config_document(kConfigs / name));
  validate(c);
  return c;
}

SweepConfig load_sweep(const std::string& name) {
  return sweep_from_document(read_config_document(kConfigs / name));
}

ResultRow run_config(const std::string& name) {
  const ScenarioConfig c = load_scenario(name);
  ResultRow row = simulate(c, barrier_for(c)).row;
  row.param = c.separation;
  g_rows.push_back(row);
  return row;
}

std::vector<ResultRow> run_sweep(const std::string& name) {
  const SweepConfig s = load_sweep(name);
  auto rows = sweep(s, barrier_for(s.base));
  g_rows.insert(g_rows.end(), rows.begin(), rows.end());
  return rows;
}

double max_mb_deviation(const JointStats& st) {
  return std::max({std::abs(st.p20 - 0.25), std::abs(st.p02 - 0.25), std::abs(st.p11 - 0.5)});
}

// --- criteria ----------------------------------------------------------------

Outcome exact_counting() {
  const auto t0 = std::chrono::steady_clock::now();
  const OccupancyVector l({2, 0}), r({0, 2}), s({1, 1});
  bool ok = mb_probability(l).str() == "1/4" && mb_probability(r).str() == "1/4" &&
            mb_probability(s).str() == "1/2" && be_probability(2, 2).str() == "1/3" &&
            fd_probability(l).str() == "0" && fd_probability(r).str() == "0" &&
            fd_probability(s).str() == "1";
  std::size_t compared = 0;
  for (unsigned n = 0; n <= 4; ++n) {
    for (std::size_t m = 1; m <= 4; ++m) {
      const auto oracle = enumerate_mb_oracle(n, m);
      const auto all = enumerate_occupancies(n, m);
      ok = ok && oracle.size() == all.size();
      for (const auto& occ : all) {
        ok = ok && oracle.at(occ) == mb_probability(occ);
        ++compared;
      }
    }
  }
  const double t = seconds_since(t0);
  return {ok && t < 1.0, "N=M=2 MB 1/4,1/4,1/2 BE 1/3 FD 0,0,1; " + std::to_string(compared) +
                             " vectors equal to enumeration in " + secs(t)};
}

Outcome propagator_oracles() {
  const Grid1D grid(100.0, 8192);
  std::ostringstream d;
  bool ok = true;

  auto t0 = std::chrono::steady_clock::now();
  {
    const double sigma = 1.0;
    const WavepacketSpec spec{-40.0, 8.0, sigma};
    auto op = std::make_shared<const SplitOperator>(grid, BarrierPotential{0.0, 0.5, 0.0}, 2e-4);
    Evolution ev(op, make_gaussian(grid, spec));
    double worst = 0, width = sigma;
    while (width < 3.0 * sigma) {
      ev.advance(2000);
      const Wavefunction psi = ev.snapshot();
      const double t = psi.time();
      const double expect = sigma * std::sqrt(1.0 + std::pow(t / (2 * sigma * sigma), 2));
      width = position_spread(psi);
      worst = std::max(worst, std::abs(width / expect - 1.0));
    }
    const double elapsed = seconds_since(t0);
    ok = ok && worst < 1e-6 && elapsed < 30;
    d << "spreading rel err " << num(worst) << " (" << secs(elapsed) << "); ";
  }

  t0 = std::chrono::steady_clock::now();
  {
    const auto r = evolve(make_gaussian(grid, {-30.0, 8.0, 1.0}), BarrierPotential{27.0, 0.5, 0.0},
                          {3e-4, 10000});
    const double drift = std::abs(r.psi.norm2() - 1.0);
    const double elapsed = seconds_since(t0);
    ok = ok && drift < 1e-10 && elapsed < 30;
    d << "norm drift " << num(drift) << " over 1e4 steps (" << secs(elapsed) << "); ";
  }

  t0 = std::chrono::steady_clock::now();
  {
    const WavepacketSpec spec{-30.0, 8.0, 1.0};
    const BarrierPotential b{27.0, 0.5, 0.0};
    const TransmissionRun run = measure_transmission(grid, spec, b, RunSettings{});
    const double oracle = expected_packet_transmission(spec, b);
    const double rel = std::abs(run.transmission / oracle - 1.0);
    const double elapsed = seconds_since(t0);
    ok = ok && rel < 0.02 && elapsed < 30;
    d << "T_sim " << num(run.transmission) << " vs oracle " << num(oracle) << " rel "
      << num(rel) << " (" << secs(elapsed) << ")";
  }
  return {ok, d.str()};
}

Outcome calibration() {
  const auto t0 = std::chrono::steady_clock::now();
  const ScenarioConfig c = load_scenario("mb_limit_boson.ini");
  const ResolvedBarrier& r = barrier_for(c);
  const double elapsed = seconds_since(t0);
  if (!r.calibration) return {false, "committed default is not in calibrate mode"};
  const double t = r.calibration->run.transmission;
  return {std::abs(t - 0.5) <= 0.005 && elapsed < 120,
          "V0 " + num(r.barrier.height) + " gives T_sim " + num(t) + " after " +
              std::to_string(r.calibration->probes.size()) + " runs in " + secs(elapsed)};
}

Outcome mb_limit() {
  bool ok = true;
  std::ostringstream d;
  for (const char* name : {"mb_limit_boson.ini", "mb_limit_fermion.ini"}) {
    const ResultRow row = run_config(name);
    const double dev = row.stats ? max_mb_deviation(*row.stats) : 1.0;
    ok = ok && row.valid && dev <= 0.01;
    d << name << " (" << num(row.stats->p20) << ", " << num(row.stats->p02) << ", "
      << num(row.stats->p11) << ") max dev " << num(dev) << "  ";
  }
  return {ok, d.str()};
}

Outcome consistency() {
  // factorized vs direct 2D quadrature on simulated G = 4096 pairs
  double worst = 0;
  std::size_t pairs = 0;
  for (const char* name : {"mb_limit_boson.ini", "intermediate_bose.ini",
                           "intermediate_fermi.ini", "sweep_separation_fermion.ini"}) {
    ScenarioConfig c = load_scenario(name);
    c.points = 4096;
    if (c.separation == 20 && c.wavenumber_offset == 0) c.separation = 2;  // overlapping variant
    const ScenarioOutcome out = simulate(c, barrier_for(c));
    const JointStats fast = joint_probabilities(out.pair);
    const JointStats slow = quadrant_quadrature_oracle(out.pair);
    worst = std::max({worst, std::abs(fast.p20 - slow.p20), std::abs(fast.p02 - slow.p02),
                      std::abs(fast.p11 - slow.p11)});
    g_rows.push_back(out.row);
    ++pairs;
  }
  double sum_worst = 0;
  std::size_t emitted = 0;
  for (const ResultRow& row : g_rows) {
    if (!row.stats) continue;
    sum_worst = std::max(sum_worst, std::abs(row.stats->sum_check - 1.0));
    ++emitted;
  }
  return {worst <= 1e-10 && sum_worst <= 1e-6,
          std::to_string(pairs) + " pairs, max |factorized - 2D| " + num(worst) + "; " +
              std::to_string(emitted) + " rows, max |sum - 1| " + num(sum_worst)};
}

Outcome sign_inequalities() {
  bool ok = true;
  std::ostringstream d;
  for (const char* name : {"sweep_separation_boson.ini", "sweep_separation_fermion.ini",
                           "sweep_counter_boson.ini", "sweep_counter_fermion.ini"}) {
    const SweepConfig s = load_sweep(name);
    const bool boson = s.base.exchange == Exchange::boson;
    const auto rows = run_sweep(name);
    double lo = 1, hi = 0;
    std::size_t bad = 0;
    for (const ResultRow& row : rows) {
      if (!row.valid || !row.stats) {
        ++bad;
        continue;
      }
      lo = std::min(lo, row.stats->a);
      hi = std::max(hi, row.stats->a);
      if (boson ? row.stats->a < 0.25 - 1e-4 : row.stats->a > 0.25 + 1e-4) ++bad;
    }
    if (s.parameter == SweepParameter::separation_d && s.base.wavenumber_offset == 0) {
      const ResultRow& far = rows.back();
      if (!far.stats || max_mb_deviation(*far.stats) > 0.01) ++bad;
    }
    ok = ok && bad == 0;
    d << name << " a in [" << num(lo) << ", " << num(hi) << "]" << (bad ? " VIOLATED" : "")
      << "  ";
  }
  return {ok, d.str()};
}

Outcome intermediate() {
  const ResultRow bose = run_config("intermediate_bose.ini");
  const ResultRow fermi = run_config("intermediate_fermi.ini");
  const double ab = bose.stats ? bose.stats->a : -1;
  const double af = fermi.stats ? fermi.stats->a : -1;
  return {bose.valid && fermi.valid && ab > 0.26 && ab < 0.33 && af > 0.0 && af < 0.24,
          "intermediate_bose a " + num(ab) + " (" + bose.label + "), intermediate_fermi a " +
              num(af) + " (" + fermi.label + ")"};
}

Outcome identical_bosons() {
  const ResultRow row = run_config("identical_boson.ini");
  if (!row.stats) return {false, "no statistics"};
  const double dev = max_mb_deviation(*row.stats);
  return {row.valid && dev <= 0.001,
          "(" + num(row.stats->p20) + ", " + num(row.stats->p02) + ", " + num(row.stats->p11) +
              ") max dev from (1/4,1/4,1/2) " + num(dev) + "; BE point 1/3 is not reached (a = " +
              num(row.stats->a) + ")"};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "tunnelstat_acceptance";
  fs::remove_all(dir);
  std::ostringstream sink;
  const auto cli = [&](std::vector<std::string> args) { return run_cli(args, sink, sink); };

  const std::string run_cfg = (kConfigs / "mb_limit_boson.ini").string();
  bool ok = cli({"run", "--config", run_cfg, "--out", (dir / "run1").string()}) == 0 &&
            cli({"run", "--config", run_cfg, "--out", (dir / "run2").string()}) == 0;
  ok = ok && slurp(dir / "run1" / "run.csv") == slurp(dir / "run2" / "run.csv") &&
       slurp(dir / "run1" / "run.json") == slurp(dir / "run2" / "run.json");

  // committed sweep at its calibrated height, on a subset of its values
  SweepConfig s = load_sweep("sweep_separation_boson.ini");
  s.base.barrier_mode = BarrierMode::fixed;
  s.base.barrier_height = barrier_for(s.base).barrier.height;
  s.values = {0, 1, 2, 5, 20};
  fs::create_directories(dir);
  const fs::path cfg = dir / "sweep.json";
  std::ofstream(cfg) << to_document(s).dump(2);
  const std::vector<std::pair<std::string, std::string>> sweeps = {
      {"serial1", "1"}, {"serial2", "1"}, {"parallel", "3"}};
  for (const auto& [out, workers] : sweeps) {
    ok = ok && cli({"sweep", "--config", cfg.string(), "--out", (dir / out).string(),
                    "--parallel", workers}) == 0;
  }
  const std::string ref = slurp(dir / "serial1" / "sweep.csv");
  for (const char* other : {"serial2", "parallel"}) {
    ok = ok && !ref.empty() && ref == slurp(dir / other / "sweep.csv") &&
         slurp(dir / "serial1" / "sweep.json") == slurp(dir / other / "sweep.json");
  }
  return {ok, "run.csv/run.json identical on rerun; sweep.csv/sweep.json identical on rerun "
              "and with 3 workers"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 exact counting", exact_counting},
      {"2 propagator oracles", propagator_oracles},
      {"3 calibration", calibration},
      {"4 MB limit", mb_limit},
      {"6 sign inequalities", sign_inequalities},
      {"7 intermediate regimes", intermediate},
      {"8 identical bosons", identical_bosons},
      {"9 determinism", determinism},
      {"5 consistency oracles", consistency},  // last: sums over every emitted row
  };
  std::vector<std::pair<std::string, Outcome>> results;
  for (const auto& [name, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    o.detail += " [" + secs(seconds_since(t0)) + "]";
    results.emplace_back(name, o);
  }
  std::sort(results.begin(), results.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  bool all = true;
  for (const auto& [name, o] : results) {
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << '\n';
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
