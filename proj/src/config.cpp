#include "tunnelstat/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "tunnelstat/errors.hpp"

namespace tunnelstat {

using nlohmann::json;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"grid", {"half_width", "points"}},
      {"packet", {"center", "wavenumber", "sigma"}},
      {"partner", {"separation", "wavenumber_offset"}},
      {"pair", {"statistics"}},
      {"barrier",
       {"mode", "height", "width", "center", "target", "tolerance", "height_min", "height_max",
        "max_iterations"}},
      {"evolution", {"dt", "max_steps", "check_interval", "edge_limit"}},
      {"measurement",
       {"barrier_amplitude", "lobe_separation", "lobe_mass_floor", "followup_checks",
        "followup_steps", "classify_tolerance", "final_edge_limit"}},
      {"sweep", {"parameter", "values"}},
      {"density", {"window_min", "window_max", "max_points"}},
  };
  return s;
}

void check_keys(const json& doc) {
  if (!doc.is_object()) {
    throw ConfigError("config document must be an object of sections");
  }
  for (const auto& [section, body] : doc.items()) {
    const auto it = schema().find(section);
    if (it == schema().end()) {
      throw ConfigError("unknown config section [" + section + "]");
    }
    if (!body.is_object()) {
      throw ConfigError("config section [" + section + "] must hold key/value pairs");
    }
    for (const auto& [key, value] : body.items()) {
      if (!it->second.contains(key)) {
        throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
      }
    }
  }
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double parse_double(const std::string& where, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(where + ": expected a number, got '" + text + "'");
  }
  return v;
}

// Typed access to one optional key of a section.
class Section {
 public:
  Section(const json& doc, std::string name) : name_(std::move(name)) {
    if (doc.contains(name_)) body_ = &doc.at(name_);
  }

  bool has(const std::string& key) const { return body_ != nullptr && body_->contains(key); }

  void get(const std::string& key, double& out) const {
    if (!has(key)) return;
    const json& v = body_->at(key);
    if (v.is_number()) {
      out = v.get<double>();
    } else if (v.is_string()) {
      out = parse_double(where(key), v.get<std::string>());
    } else {
      throw ConfigError(where(key) + ": expected a number");
    }
  }

  void get(const std::string& key, std::optional<double>& out) const {
    if (!has(key)) return;
    double v = 0.0;
    get(key, v);
    out = v;
  }

  void get(const std::string& key, std::size_t& out) const {
    if (!has(key)) return;
    double v = 0.0;
    get(key, v);
    if (!(v >= 0.0) || v != std::floor(v) || v > 9.0e15) {
      throw ConfigError(where(key) + ": expected a non-negative integer");
    }
    out = static_cast<std::size_t>(v);
  }

  std::optional<std::string> text(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    const json& v = body_->at(key);
    if (!v.is_string()) {
      throw ConfigError(where(key) + ": expected a string");
    }
    return trim(v.get<std::string>());
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    if (!has(key)) return out;
    const json& v = body_->at(key);
    if (v.is_array()) {
      for (const auto& item : v) {
        if (!item.is_number()) throw ConfigError(where(key) + ": list entries must be numbers");
        out.push_back(item.get<double>());
      }
    } else if (v.is_string()) {
      std::stringstream ss(v.get<std::string>());
      std::string item;
      while (std::getline(ss, item, ',')) {
        out.push_back(parse_double(where(key), item));
      }
    } else {
      throw ConfigError(where(key) + ": expected a list");
    }
    return out;
  }

 private:
  std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

  std::string name_;
  const json* body_ = nullptr;
};

}  // namespace

json parse_ini(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("INI parse error: ") + e.what());
  }
  json doc = json::object();
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("key '" + section + "' appears outside any section");
    }
    json& s = doc[section];
    s = json::object();
    for (const auto& [key, value] : body) {
      s[key] = value.data();
    }
  }
  return doc;
}

json read_config_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  if (path.extension() == ".json") {
    json doc;
    try {
      doc = json::parse(buf.str());
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("JSON parse error: ") + e.what());
    }
    // A run/sweep summary carries its configuration under "config".
    if (doc.is_object() && doc.contains("config") && doc.contains("version")) {
      return doc.at("config");
    }
    return doc;
  }
  return parse_ini(buf.str());
}

ScenarioConfig scenario_from_document(const json& doc) {
  check_keys(doc);
  ScenarioConfig c;

  const Section grid(doc, "grid");
  grid.get("half_width", c.half_width);
  grid.get("points", c.points);

  const Section packet(doc, "packet");
  packet.get("center", c.packet.center);
  packet.get("wavenumber", c.packet.wavenumber);
  packet.get("sigma", c.packet.sigma);

  const Section partner(doc, "partner");
  partner.get("separation", c.separation);
  partner.get("wavenumber_offset", c.wavenumber_offset);

  if (const auto stats = Section(doc, "pair").text("statistics")) {
    if (*stats == "boson") {
      c.exchange = Exchange::boson;
    } else if (*stats == "fermion") {
      c.exchange = Exchange::fermion;
    } else {
      throw ConfigError("[pair] statistics must be boson or fermion, got '" + *stats + "'");
    }
  }

  const Section barrier(doc, "barrier");
  if (const auto mode = barrier.text("mode")) {
    if (*mode == "calibrate") {
      c.barrier_mode = BarrierMode::calibrate;
    } else if (*mode == "fixed") {
      c.barrier_mode = BarrierMode::fixed;
    } else {
      throw ConfigError("[barrier] mode must be calibrate or fixed, got '" + *mode + "'");
    }
  }
  barrier.get("height", c.barrier_height);
  barrier.get("width", c.calibration.width);
  barrier.get("center", c.calibration.center);
  barrier.get("target", c.calibration.target);
  barrier.get("tolerance", c.calibration.tolerance);
  barrier.get("height_min", c.calibration.height_min);
  barrier.get("height_max", c.calibration.height_max);
  barrier.get("max_iterations", c.calibration.max_iterations);
  if (c.barrier_mode == BarrierMode::fixed && !barrier.has("height")) {
    throw ConfigError("[barrier] mode = fixed needs a height");
  }

  const Section evolution(doc, "evolution");
  evolution.get("dt", c.run.dt);
  evolution.get("max_steps", c.run.max_steps);
  evolution.get("check_interval", c.run.check_interval);
  evolution.get("edge_limit", c.run.edge_limit);

  const Section measurement(doc, "measurement");
  measurement.get("barrier_amplitude", c.run.criterion.barrier_amplitude);
  measurement.get("lobe_separation", c.run.criterion.lobe_separation);
  measurement.get("lobe_mass_floor", c.run.criterion.lobe_mass_floor);
  measurement.get("followup_checks", c.followup_checks);
  measurement.get("followup_steps", c.followup_steps);
  measurement.get("classify_tolerance", c.classify_tolerance);
  measurement.get("final_edge_limit", c.final_edge_limit);

  const Section density(doc, "density");
  density.get("window_min", c.density.window_min);
  density.get("window_max", c.density.window_max);
  density.get("max_points", c.density.max_points);
  return c;
}

SweepConfig sweep_from_document(const json& doc) {
  SweepConfig s;
  s.base = scenario_from_document(doc);
  const Section sweep(doc, "sweep");
  const auto param = sweep.text("parameter");
  if (!param) {
    throw ConfigError("[sweep] parameter is required");
  }
  if (*param == "separation_d") {
    s.parameter = SweepParameter::separation_d;
  } else if (*param == "wavenumber_dk") {
    s.parameter = SweepParameter::wavenumber_dk;
  } else if (*param == "phase_k0d") {
    s.parameter = SweepParameter::phase_k0d;
  } else {
    throw ConfigError("[sweep] unknown parameter '" + *param + "'");
  }
  s.values = sweep.list("values");
  if (s.values.empty()) {
    throw ConfigError("[sweep] values must list at least one number");
  }
  return s;
}

json to_document(const ScenarioConfig& c) {
  json doc;
  doc["grid"] = {{"half_width", c.half_width}, {"points", c.points}};
  doc["packet"] = {
      {"center", c.packet.center}, {"wavenumber", c.packet.wavenumber}, {"sigma", c.packet.sigma}};
  doc["partner"] = {{"separation", c.separation}, {"wavenumber_offset", c.wavenumber_offset}};
  doc["pair"] = {{"statistics", c.exchange == Exchange::boson ? "boson" : "fermion"}};
  json barrier = {{"mode", c.barrier_mode == BarrierMode::fixed ? "fixed" : "calibrate"},
                  {"height", c.barrier_height},
                  {"width", c.calibration.width},
                  {"center", c.calibration.center},
                  {"target", c.calibration.target},
                  {"tolerance", c.calibration.tolerance},
                  {"max_iterations", c.calibration.max_iterations}};
  if (c.calibration.height_min) barrier["height_min"] = *c.calibration.height_min;
  if (c.calibration.height_max) barrier["height_max"] = *c.calibration.height_max;
  doc["barrier"] = barrier;
  doc["evolution"] = {{"dt", c.run.dt},
                      {"max_steps", c.run.max_steps},
                      {"check_interval", c.run.check_interval},
                      {"edge_limit", c.run.edge_limit}};
  doc["measurement"] = {{"barrier_amplitude", c.run.criterion.barrier_amplitude},
                        {"lobe_separation", c.run.criterion.lobe_separation},
                        {"lobe_mass_floor", c.run.criterion.lobe_mass_floor},
                        {"followup_checks", c.followup_checks},
                        {"followup_steps", c.followup_steps},
                        {"classify_tolerance", c.classify_tolerance},
                        {"final_edge_limit", c.final_edge_limit}};
  json density = {{"max_points", c.density.max_points}};
  if (c.density.window_min) density["window_min"] = *c.density.window_min;
  if (c.density.window_max) density["window_max"] = *c.density.window_max;
  doc["density"] = density;
  return doc;
}

json to_document(const SweepConfig& s) {
  json doc = to_document(s.base);
  doc["sweep"] = {{"parameter", std::string(to_string(s.parameter))}, {"values", s.values}};
  return doc;
}

}  // namespace tunnelstat
