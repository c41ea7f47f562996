#pragma once

// Scenario files. Two encodings of one schema: INI (sections and key = value
// lines, lists comma-separated) and JSON ({"section": {"key": value}}).
//
//   [grid]        half_width, points
//   [packet]      center, wavenumber, sigma
//   [partner]     separation, wavenumber_offset
//   [pair]        statistics = boson | fermion
//   [barrier]     mode = calibrate | fixed, height, width, center,
//                 target, tolerance, height_min, height_max, max_iterations
//   [evolution]   dt, max_steps, check_interval, edge_limit
//   [measurement] barrier_amplitude, lobe_separation, lobe_mass_floor,
//                 followup_checks, followup_steps, classify_tolerance,
//                 final_edge_limit
//   [sweep]       parameter = separation_d | wavenumber_dk | phase_k0d, values
//   [density]     window_min, window_max, max_points
//
// Unknown sections or keys are errors. Missing keys take the defaults of
// ScenarioConfig.

#include <filesystem>

#include <nlohmann/json.hpp>

#include "tunnelstat/experiment.hpp"

namespace tunnelstat {

/// Reads .json as JSON and anything else as INI. Throws ConfigError.
nlohmann::json read_config_document(const std::filesystem::path& path);

/// Parses an INI text into the document form.
nlohmann::json parse_ini(const std::string& text);

ScenarioConfig scenario_from_document(const nlohmann::json& doc);
SweepConfig sweep_from_document(const nlohmann::json& doc);

/// Complete documents (every key written); re-reading gives an equal config.
nlohmann::json to_document(const ScenarioConfig& config);
nlohmann::json to_document(const SweepConfig& config);

}  // namespace tunnelstat
