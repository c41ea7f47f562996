#include "tunnelstat/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "tunnelstat/config.hpp"
#include "tunnelstat/errors.hpp"
#include "tunnelstat/experiment.hpp"
#include "tunnelstat/format.hpp"
#include "tunnelstat/occupancy.hpp"
#include "tunnelstat/version.hpp"

namespace tunnelstat {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
  unsigned particles = 0;
  std::size_t states = 0;
  std::string statistics = "all";
  bool oracle = false;
  std::string config;
  std::string out_dir = ".";
  std::size_t parallel = 1;
  bool verbose = false;
  std::string which = "joint";
};

constexpr std::size_t kMaxOccupancyRows = 100000;

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw Error("cannot write " + path.string());
  }
  f << content;
}

int cmd_occupancy(const Options& o, std::ostream& out) {
  const BigInt rows = [&] {
    // C(N + M - 1, M - 1)
    BigInt c = 1;
    for (std::size_t i = 1; i < o.states; ++i) c = c * (o.particles + i) / i;
    return c;
  }();
  if (rows > kMaxOccupancyRows) {
    throw ConfigError("N=" + std::to_string(o.particles) + " M=" + std::to_string(o.states) +
                      " has " + rows.str() + " occupancy vectors; the table is limited to " +
                      std::to_string(kMaxOccupancyRows));
  }
  std::map<OccupancyVector, ExactProb> oracle;
  if (o.oracle) {
    oracle = enumerate_mb_oracle(o.particles, o.states);
  }

  const bool mb = o.statistics == "all" || o.statistics == "mb";
  const bool be = o.statistics == "all" || o.statistics == "be";
  const bool fd = o.statistics == "all" || o.statistics == "fd";
  const auto cell = [](const ExactProb& p) {
    return p.str() + " (" + format_number(p.to_double()) + ")";
  };

  out << "# N=" << o.particles << " M=" << o.states << '\n';
  out << std::left << std::setw(20) << "occupancy";
  if (mb) out << std::setw(28) << "MB";
  if (be) out << std::setw(28) << "BE";
  if (fd) out << std::setw(28) << "FD";
  out << '\n';

  bool agree = true;
  std::size_t count = 0;
  for (const auto& occ : enumerate_occupancies(o.particles, o.states)) {
    ++count;
    out << std::setw(20) << occ.str();
    const ExactProb p_mb = mb_probability(occ);
    if (mb) out << std::setw(28) << cell(p_mb);
    if (be) out << std::setw(28) << cell(be_probability(o.particles, o.states));
    if (fd) out << std::setw(28) << cell(fd_probability(occ));
    out << '\n';
    if (o.oracle) {
      const auto it = oracle.find(occ);
      agree = agree && it != oracle.end() && it->second == p_mb;
    }
  }
  if (o.oracle) {
    agree = agree && oracle.size() == count;
    out << "# oracle: " << (agree ? "MB agrees exactly with enumeration of all "
                                  : "MB DISAGREES with enumeration of ")
        << BigInt(boost::multiprecision::pow(BigInt(o.states), o.particles)).str()
        << " assignments\n";
  }
  return agree ? kExitOk : kExitFailure;
}

json calibration_report(const ScenarioConfig& config) {
  const Grid1D grid = config.grid();
  json report;
  report["version"] = kVersion;
  if (config.barrier_mode == BarrierMode::fixed) {
    const BarrierPotential b{config.barrier_height, config.calibration.width,
                             config.calibration.center};
    const TransmissionRun run = measure_transmission(grid, config.packet, b, config.run);
    report["mode"] = "fixed";
    report["height"] = b.height;
    report["width"] = b.width;
    report["center"] = b.center;
    report["transmission"] = run.transmission;
    report["measurement_time"] = run.time;
    report["analytic_transmission"] = expected_packet_transmission(config.packet, b);
    return report;
  }
  const CalibrationResult cal =
      calibrate_barrier(grid, config.packet, config.calibration, config.run);
  report["mode"] = "calibrate";
  report["target"] = config.calibration.target;
  report["tolerance"] = config.calibration.tolerance;
  report.update(to_json(cal));
  report["analytic_transmission"] = expected_packet_transmission(config.packet, cal.barrier);
  return report;
}

int cmd_calibrate(const Options& o, std::ostream& out) {
  const ScenarioConfig config = scenario_from_document(read_config_document(o.config));
  validate(config);
  const std::string text = calibration_report(config).dump(2) + "\n";
  out << text;
  write_file(fs::path(o.out_dir) / "calibration.json", text);
  return kExitOk;
}

int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
  const ScenarioConfig config = scenario_from_document(read_config_document(o.config));
  validate(config);
  if (o.verbose) err << "resolving barrier\n";
  const ResolvedBarrier barrier = resolve_barrier(config);
  if (o.verbose) err << "barrier height " << format_number(barrier.barrier.height) << '\n';
  ResultRow row = simulate(config, barrier).row;
  row.param = config.separation;

  std::ostringstream csv;
  write_rows_csv(csv, {row});
  json summary;
  summary["version"] = kVersion;
  summary["config"] = to_document(config);
  if (barrier.calibration) summary["calibration"] = to_json(*barrier.calibration);
  summary["rows"] = json::array({to_json(row)});
  summary["comparison"] = to_json(compare_with_counting(row, config.classify_tolerance));

  write_file(fs::path(o.out_dir) / "run.csv", csv.str());
  write_file(fs::path(o.out_dir) / "run.json", summary.dump(2) + "\n");
  out << csv.str();
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const SweepConfig config = sweep_from_document(read_config_document(o.config));
  const auto rows = sweep(config, o.parallel, o.verbose ? &err : nullptr);

  std::ostringstream csv;
  write_rows_csv(csv, rows);
  json summary;
  summary["version"] = kVersion;
  summary["config"] = to_document(config);
  summary["rows"] = json::array();
  for (const auto& row : rows) {
    json j = to_json(row);
    j["comparison"] = to_json(compare_with_counting(row, config.base.classify_tolerance));
    summary["rows"].push_back(std::move(j));
  }
  write_file(fs::path(o.out_dir) / "sweep.csv", csv.str());
  write_file(fs::path(o.out_dir) / "sweep.json", summary.dump(2) + "\n");
  out << csv.str();
  const bool any_valid = std::ranges::any_of(rows, [](const ResultRow& r) { return r.valid; });
  return any_valid ? kExitOk : kExitAllInvalid;
}

std::vector<std::size_t> density_indices(const Grid1D& grid, const DensityOptions& opt) {
  const std::size_t begin = opt.window_min ? grid.split_index(*opt.window_min) : 0;
  const std::size_t end = opt.window_max ? grid.split_index(*opt.window_max) : grid.size();
  if (end <= begin) {
    throw ConfigError("[density] window is empty");
  }
  const std::size_t max_points = std::max<std::size_t>(opt.max_points, 1);
  const std::size_t stride = (end - begin + max_points - 1) / max_points;
  std::vector<std::size_t> idx;
  for (std::size_t j = begin; j < end; j += stride) idx.push_back(j);
  return idx;
}

int cmd_density(const Options& o, std::ostream& out) {
  const ScenarioConfig config = scenario_from_document(read_config_document(o.config));
  validate(config);
  const ScenarioOutcome outcome = simulate(config, resolve_barrier(config));
  const SymmetrizedPair& pair = outcome.pair;

  std::ostringstream csv;
  if (o.which == "single_a" || o.which == "single_b") {
    write_wavefunction_csv(csv, o.which == "single_a" ? pair.psi_a() : pair.psi_b());
  } else {
    const auto idx = density_indices(pair.psi_a().grid(), config.density);
    const Grid1D& grid = pair.psi_a().grid();
    csv << "x1,x2,density\n";
    for (std::size_t i1 : idx) {
      for (std::size_t i2 : idx) {
        csv << format_number(grid.position(i1)) << ',' << format_number(grid.position(i2)) << ','
            << format_number(joint_density(pair, i1, i2)) << '\n';
      }
    }
  }
  const fs::path path = fs::path(o.out_dir) / ("density_" + o.which + ".csv");
  write_file(path, csv.str());
  out << path.string() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Two-particle exchange statistics of barrier-tunneling wavepackets", "tunnelstat"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto* occ = app.add_subcommand("occupancy", "exact MB/BE/FD occupancy probabilities");
  occ->add_option("N", o.particles, "number of particles")->required()->check(CLI::NonNegativeNumber);
  occ->add_option("M", o.states, "number of states")->required()->check(CLI::PositiveNumber);
  occ->add_option("--statistics", o.statistics, "mb, be, fd or all")
      ->check(CLI::IsMember({"mb", "be", "fd", "all"}));
  occ->add_flag("--oracle", o.oracle, "cross-check MB against brute-force enumeration");

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "scenario file (INI or JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", o.out_dir, "output directory");
    sub->add_flag("--verbose", o.verbose, "progress on stderr");
  };
  auto* cal = app.add_subcommand("calibrate", "fit the barrier height to the target transmission");
  add_common(cal);
  auto* run = app.add_subcommand("run", "one scenario: pair statistics with diagnostics");
  add_common(run);
  auto* sw = app.add_subcommand("sweep", "scenario family over one overlap control");
  add_common(sw);
  sw->add_option("--parallel", o.parallel, "worker threads")->check(CLI::PositiveNumber);
  auto* dens = app.add_subcommand("density", "dump single-particle or joint densities");
  add_common(dens);
  dens->add_option("--which", o.which, "single_a, single_b or joint")
      ->check(CLI::IsMember({"single_a", "single_b", "joint"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (occ->parsed()) return cmd_occupancy(o, out);
    if (cal->parsed()) return cmd_calibrate(o, out);
    if (run->parsed()) return cmd_run(o, out, err);
    if (sw->parsed()) return cmd_sweep(o, out, err);
    if (dens->parsed()) return cmd_density(o, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CalibrationError& e) {
    err << "calibration failed: " << e.what() << '\n';
    return kExitCalibration;
  } catch (const PauliDegeneracy& e) {
    err << "degenerate state: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace tunnelstat
