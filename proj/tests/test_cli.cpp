#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tunnelstat/cli.hpp"

using namespace tunnelstat;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "tunnelstat_cli_test" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// Coarse fixed-barrier scenario; extra holds additional INI text.
fs::path quick_config(const fs::path& dir, const std::string& statistics, double separation,
                      const std::string& extra = "") {
  const fs::path p = dir / ("quick_" + statistics + ".ini");
  std::ofstream f(p);
  f << "[grid]\nhalf_width = 100\npoints = 4096\n"
    << "[partner]\nseparation = " << separation << "\n"
    << "[pair]\nstatistics = " << statistics << "\n"
    << "[barrier]\nmode = fixed\nheight = 27\nwidth = 0.5\n"
    << "[measurement]\nfollowup_steps = 500\n"
    << extra;
  return p;
}

std::vector<std::vector<double>> numeric_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> r;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      r.push_back(end == cell.c_str() ? std::nan("") : v);
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

TEST_CASE("occupancy tables") {
  const Result mb = cli({"occupancy", "2", "2", "--statistics", "mb"});
  CHECK(mb.code == 0);
  CHECK(mb.out.find("{2,0}               1/4 (0.25)") != std::string::npos);
  CHECK(mb.out.find("{1,1}               1/2 (0.5)") != std::string::npos);
  CHECK(mb.out.find("{0,2}               1/4 (0.25)") != std::string::npos);

  const Result be = cli({"occupancy", "2", "2", "--statistics", "be"});
  CHECK(be.out.find("{2,0}               1/3 (0.333333333333)") != std::string::npos);
  CHECK(be.out.find("{1,1}               1/3 (0.333333333333)") != std::string::npos);

  const Result fd = cli({"occupancy", "2", "2", "--statistics", "fd"});
  CHECK(fd.out.find("{2,0}               0 (0)") != std::string::npos);
  CHECK(fd.out.find("{1,1}               1 (1)") != std::string::npos);

  const Result oracle = cli({"occupancy", "4", "3", "--oracle"});
  CHECK(oracle.code == 0);
  CHECK(oracle.out.find("MB agrees exactly with enumeration of all 81 assignments") !=
        std::string::npos);
}

TEST_CASE("usage errors exit 2") {
  CHECK(cli({"occupancy", "2", "0"}).code == 2);
  CHECK(cli({"occupancy", "-1", "2"}).code == 2);
  CHECK(cli({"occupancy", "2", "2", "--statistics", "xy"}).code == 2);
  CHECK(cli({"occupancy", "12", "12", "--oracle"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"run"}).code == 2);
  CHECK(cli({"run", "--config", "/nonexistent.ini"}).code == 2);
  CHECK(cli({"--help"}).code == 0);

  const fs::path dir = scratch("usage");
  const fs::path bad = dir / "bad.ini";
  std::ofstream(bad) << "[grid]\npoints = 4096\nhalfwidth = 3\n";
  const Result r = cli({"run", "--config", bad.string(), "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("halfwidth") != std::string::npos);
}

TEST_CASE("calibrate: fixed passthrough and unreachable target") {
  const fs::path dir = scratch("calibrate");
  const Result fixed = cli({"calibrate", "--config", quick_config(dir, "boson", 20).string(),
                            "--out", dir.string()});
  REQUIRE(fixed.code == 0);
  const auto report = nlohmann::json::parse(read(dir / "calibration.json"));
  CHECK(report["mode"] == "fixed");
  CHECK(report["height"] == 27.0);
  CHECK(std::abs(report["transmission"].get<double>() - 0.5) < 0.05);
  CHECK(nlohmann::json::parse(fixed.out) == report);

  const fs::path cal = dir / "cal.ini";
  std::ofstream(cal) << "[grid]\npoints = 4096\n[barrier]\ntarget = 0.9\nheight_min = 20\n"
                        "height_max = 34\n";
  CHECK(cli({"calibrate", "--config", cal.string(), "--out", dir.string()}).code == 3);

  const fs::path ok = dir / "ok.ini";
  std::ofstream(ok) << "[grid]\npoints = 4096\n[barrier]\ntarget = 0.5\nheight_min = 20\n"
                       "height_max = 34\n";
  REQUIRE(cli({"calibrate", "--config", ok.string(), "--out", dir.string()}).code == 0);
  const auto calibrated = nlohmann::json::parse(read(dir / "calibration.json"));
  CHECK(calibrated["height"].get<double>() > 0);
  CHECK(std::abs(calibrated["transmission"].get<double>() - 0.5) <= 0.005);
}

TEST_CASE("run: outputs, determinism, round trip") {
  const fs::path dir = scratch("run");
  const fs::path config = quick_config(dir, "boson", 20);
  const Result first = cli({"run", "--config", config.string(), "--out", (dir / "a").string()});
  REQUIRE(first.code == 0);
  const std::string csv = read(dir / "a" / "run.csv");
  CHECK(first.out == csv);
  const auto rows = numeric_rows(csv);
  REQUIRE(rows.size() == 1);
  CHECK(std::abs(rows[0][4] - 0.25) < 0.01);
  CHECK(std::abs(rows[0][1] + rows[0][2] + rows[0][3] - 1.0) < 1e-6);

  const auto summary = nlohmann::json::parse(read(dir / "a" / "run.json"));
  CHECK(summary.contains("version"));
  CHECK(std::abs(summary["rows"][0]["sum_check"].get<double>() - 1.0) < 1e-6);
  CHECK(summary["comparison"]["label"] == "MB");

  REQUIRE(cli({"run", "--config", config.string(), "--out", (dir / "b").string()}).code == 0);
  CHECK(read(dir / "b" / "run.csv") == csv);
  CHECK(read(dir / "b" / "run.json") == read(dir / "a" / "run.json"));

  // the echoed configuration reproduces the run
  REQUIRE(cli({"run", "--config", (dir / "a" / "run.json").string(), "--out",
               (dir / "c").string()})
              .code == 0);
  CHECK(read(dir / "c" / "run.csv") == csv);
}

TEST_CASE("run: degenerate fermions exit 4") {
  const fs::path dir = scratch("pauli");
  CHECK(cli({"run", "--config", (fs::path(TUNNELSTAT_CONFIG_DIR) / "pauli_degenerate.ini").string(),
             "--out", dir.string()})
            .code == 4);
  CHECK_FALSE(fs::exists(dir / "run.csv"));
}

TEST_CASE("sweep: parallel determinism and all-invalid exit") {
  const fs::path dir = scratch("sweep");
  const fs::path config = quick_config(dir, "fermion", 0,
                                       "[sweep]\nparameter = separation_d\nvalues = 0, 2, 20\n");
  REQUIRE(cli({"sweep", "--config", config.string(), "--out", (dir / "serial").string()}).code ==
          0);
  REQUIRE(cli({"sweep", "--config", config.string(), "--out", (dir / "par").string(),
               "--parallel", "3"})
              .code == 0);
  const std::string csv = read(dir / "serial" / "sweep.csv");
  CHECK(csv == read(dir / "par" / "sweep.csv"));
  CHECK(csv.find(",pauli-degeneracy,") != std::string::npos);
  CHECK(csv.find(",false\n") != std::string::npos);

  const fs::path dead = quick_config(dir, "fermion", 0,
                                     "[sweep]\nparameter = separation_d\nvalues = 0\n");
  CHECK(cli({"sweep", "--config", dead.string(), "--out", (dir / "dead").string()}).code == 5);
  CHECK(fs::exists(dir / "dead" / "sweep.csv"));
}

TEST_CASE("density dumps") {
  const fs::path dir = scratch("density");
  const fs::path config = quick_config(dir, "fermion", 2,
                                       "[density]\nwindow_min = -30\nwindow_max = 30\n"
                                       "max_points = 64\n");
  REQUIRE(cli({"density", "--config", config.string(), "--out", dir.string(), "--which", "joint"})
              .code == 0);
  std::map<std::pair<double, double>, double> joint;
  std::istringstream in(read(dir / "density_joint.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "x1,x2,density");
  while (std::getline(in, line)) {
    double x1, x2, v;
    char c1, c2;
    std::istringstream(line) >> x1 >> c1 >> x2 >> c2 >> v;
    joint[{x1, x2}] = v;
  }
  CHECK(joint.size() <= 64 * 64);
  CHECK(joint.size() >= 32 * 32);
  for (const auto& [xy, v] : joint) {
    if (xy.first == xy.second) CHECK(std::abs(v) < 1e-12);
    CHECK(joint.at({xy.second, xy.first}) == doctest::Approx(v).epsilon(1e-10));
  }

  REQUIRE(cli({"density", "--config", config.string(), "--out", dir.string(), "--which",
               "single_a"})
              .code == 0);
  std::istringstream single(read(dir / "density_single_a.csv"));
  std::getline(single, line);
  double norm = 0;
  const double dx = 200.0 / 4096;
  while (std::getline(single, line)) norm += std::stod(line.substr(line.rfind(',') + 1)) * dx;
  CHECK(std::abs(norm - 1.0) < 1e-8);
}

TEST_CASE("installed binary") {
  const fs::path dir = scratch("binary");
  const std::string cmd = std::string(TUNNELSTAT_CLI_PATH) + " occupancy 2 2 > " +
                          (dir / "out.txt").string();
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(read(dir / "out.txt").find("1/3") != std::string::npos);
  const std::string bad = std::string(TUNNELSTAT_CLI_PATH) + " occupancy 2 0 2> /dev/null";
  const int status = std::system(bad.c_str());
  CHECK(WEXITSTATUS(status) == 2);
}
