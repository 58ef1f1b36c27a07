#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "directwf/grid.hpp"
#include "directwf/scenario.hpp"
#include "directwf/weak_engine.hpp"

namespace directwf {

/// Flat key-value text: "section.key = value" lines, or "key = value" lines
/// under a "[section]" header. '#' starts a comment line.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text);
KeyValues read_key_values(const std::filesystem::path& path);

struct GridConfig {
  std::size_t n_points = 2048;
  double x_min_mm = -32.0;
  double x_max_mm = 32.0;

  GridSpec spec() const { return GridSpec(n_points, x_min_mm, x_max_mm); }
};

struct MeasurementConfig {
  double phi_deg = 20.0;
  PostSelectionKind postselect = PostSelectionKind::Point;
  double k0_rad_per_mm = 0.0;
  double visibility = 1.0;
  std::size_t sliver_bins = 1;
  double max_flagged_fraction = 0.0;
};

struct CountingConfig {
  bool enabled = false;
  std::uint64_t n_incident = 100000;
  std::uint64_t seed = 1;
};

struct RunConfig {
  Scenario scenario{};
  std::string attenuation_csv;  // empty: built-in profile
  double attenuation_min = 0.1;
  double attenuation_diameter_mm = 10.0;
  std::string state_csv;  // when set, replaces the scenario preparation
  GridConfig grid{};
  MeasurementConfig measurement{};
  CountingConfig counting{};

  double phi_rad() const;
  ScanSettings scan_settings() const;
  PostSelection postselection() const;
};

// Parses and validates; unknown keys and bad values raise InvalidArgument
// naming the offending field.
RunConfig parse_run_config(const KeyValues& kv, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

// Checks every precondition of the modules the config drives.
void validate(const RunConfig& config);

// Canonical, fully resolved key-value listing in a fixed key order.
std::vector<std::pair<std::string, std::string>> resolved_entries(const RunConfig& config);
std::string to_text(const RunConfig& config);

// Sweepable parameter paths.
const std::vector<std::string>& sweep_parameters();
std::string canonical_parameter(const std::string& name);
void set_parameter(RunConfig& config, const std::string& path, double value);

GridState initial_state(const RunConfig& config);

}  // namespace directwf
