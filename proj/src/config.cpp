#include "directwf/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "directwf/error.hpp"
#include "directwf/state_io.hpp"

namespace directwf {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

Error field_error(const std::string& key, const std::string& message) {
  return Error(ErrorKind::InvalidArgument, key + ": " + message);
}

double as_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw field_error(key, "expected a number, got '" + value + "'");
  }
}

std::uint64_t as_unsigned(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    if (!value.empty() && value.front() == '-') throw std::invalid_argument(value);
    const auto v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw field_error(key, "expected a non-negative integer, got '" + value + "'");
  }
}

bool as_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw field_error(key, "expected true or false, got '" + value + "'");
}

// Shortest representation that parses back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#' || t.front() == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw Error(ErrorKind::InvalidArgument, "line " + std::to_string(line_no) + ": bad section header");
      }
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::InvalidArgument, "line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (!section.empty()) key = section + "." + key;
    if (kv.contains(key)) {
      throw Error(ErrorKind::InvalidArgument, key + ": duplicate key (line " + std::to_string(line_no) + ")");
    }
    kv[key] = value;
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

double RunConfig::phi_rad() const { return measurement.phi_deg * std::numbers::pi / 180.0; }

PostSelection RunConfig::postselection() const {
  switch (measurement.postselect) {
    case PostSelectionKind::Point: return PostSelection::point(measurement.k0_rad_per_mm);
    case PostSelectionKind::Window: {
      const auto& o = scenario.optics;
      return PostSelection::window(measurement.k0_rad_per_mm,
                                   slit_offset_to_k(o.slit_width_um, o.f2_mm, o.wavelength_nm));
    }
    case PostSelectionKind::None: return PostSelection::none();
  }
  return PostSelection::none();
}

ScanSettings RunConfig::scan_settings() const {
  return ScanSettings{phi_rad(), postselection(), measurement.visibility, measurement.sliver_bins};
}

RunConfig parse_run_config(const KeyValues& kv, const std::filesystem::path& base_dir) {
  RunConfig c;
  auto& o = c.scenario.optics;
  std::optional<std::string> attenuator;
  for (const auto& [key, value] : kv) {
    if (key == "scenario.kind") {
      try {
        c.scenario.kind = parse_scenario_kind(value);
      } catch (const Error& e) {
        throw field_error(key, e.what());
      }
    } else if (key == "scenario.step_phase_rad") {
      c.scenario.step_phase_rad = as_double(key, value);
    } else if (key == "scenario.attenuator") {
      attenuator = value;
    } else if (key == "scenario.attenuation_csv") {
      c.attenuation_csv = value.empty() || base_dir.empty() || std::filesystem::path(value).is_absolute()
                              ? value
                              : (base_dir / value).string();
    } else if (key == "scenario.attenuation_min") {
      c.attenuation_min = as_double(key, value);
    } else if (key == "scenario.attenuation_diameter_mm") {
      c.attenuation_diameter_mm = as_double(key, value);
    } else if (key == "scenario.state_csv") {
      c.state_csv = value.empty() || base_dir.empty() || std::filesystem::path(value).is_absolute()
                        ? value
                        : (base_dir / value).string();
    } else if (key == "optics.wavelength_nm") {
      o.wavelength_nm = as_double(key, value);
    } else if (key == "optics.f1_mm") {
      o.f1_mm = as_double(key, value);
    } else if (key == "optics.f2_mm") {
      o.f2_mm = as_double(key, value);
    } else if (key == "optics.aperture_mm") {
      o.aperture_mm = as_double(key, value);
    } else if (key == "optics.gauss_diameter_mm") {
      o.gauss_diameter_mm = as_double(key, value);
    } else if (key == "optics.slit_width_um") {
      o.slit_width_um = as_double(key, value);
    } else if (key == "optics.slit_offset_um") {
      o.slit_offset_um = as_double(key, value);
    } else if (key == "optics.lens_shift_um") {
      o.lens_shift_um = as_double(key, value);
    } else if (key == "grid.n_points") {
      c.grid.n_points = static_cast<std::size_t>(as_unsigned(key, value));
    } else if (key == "grid.x_min_mm") {
      c.grid.x_min_mm = as_double(key, value);
    } else if (key == "grid.x_max_mm") {
      c.grid.x_max_mm = as_double(key, value);
    } else if (key == "measurement.phi_deg") {
      c.measurement.phi_deg = as_double(key, value);
    } else if (key == "measurement.postselect") {
      try {
        c.measurement.postselect = parse_postselection_kind(value);
      } catch (const Error& e) {
        throw field_error(key, e.what());
      }
    } else if (key == "measurement.k0_rad_per_mm") {
      c.measurement.k0_rad_per_mm = as_double(key, value);
    } else if (key == "measurement.visibility") {
      c.measurement.visibility = as_double(key, value);
    } else if (key == "measurement.sliver_bins") {
      c.measurement.sliver_bins = static_cast<std::size_t>(as_unsigned(key, value));
    } else if (key == "measurement.max_flagged_fraction") {
      c.measurement.max_flagged_fraction = as_double(key, value);
    } else if (key == "counting.enabled") {
      c.counting.enabled = as_bool(key, value);
    } else if (key == "counting.n_incident") {
      c.counting.n_incident = as_unsigned(key, value);
    } else if (key == "counting.seed") {
      c.counting.seed = as_unsigned(key, value);
    } else {
      throw field_error(key, "unknown configuration key");
    }
  }
  if (attenuator && *attenuator != "auto") {
    c.scenario.attenuator = as_bool("scenario.attenuator", *attenuator);
  }
  if (!c.attenuation_csv.empty()) {
    c.scenario.attenuation = AttenuationProfile::load_csv(c.attenuation_csv);
  } else {
    try {
      c.scenario.attenuation =
          AttenuationProfile::inverted_gaussian(c.attenuation_min, c.attenuation_diameter_mm);
    } catch (const Error& e) {
      throw field_error("scenario.attenuation_min", e.what());
    }
  }
  validate(c);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_key_values(path), path.parent_path());
}

void validate(const RunConfig& c) {
  const auto& m = c.measurement;
  if (!(m.phi_deg > 0.0 && m.phi_deg <= 90.0)) {
    throw field_error("measurement.phi_deg",
                      "must satisfy 0 < phi <= 90 degrees (the pointer readout divides by sin phi; "
                      "phi > 0 is required)");
  }
  if (!(m.visibility > 0.0 && m.visibility <= 1.0)) {
    throw field_error("measurement.visibility", "must lie in (0, 1]");
  }
  if (!(m.max_flagged_fraction >= 0.0 && m.max_flagged_fraction <= 1.0)) {
    throw field_error("measurement.max_flagged_fraction", "must lie in [0, 1]");
  }
  GridSpec spec = [&] {
    try {
      return c.grid.spec();
    } catch (const Error& e) {
      throw field_error("grid", e.what());
    }
  }();
  if (m.sliver_bins == 0 || (m.sliver_bins & (m.sliver_bins - 1)) != 0 ||
      m.sliver_bins > spec.size() / 2) {
    throw field_error("measurement.sliver_bins", "must be a power of two below half the grid size");
  }
  try {
    c.scenario.validate();
  } catch (const Error& e) {
    throw field_error("optics", e.what());
  }
  if (m.postselect == PostSelectionKind::Window && !(c.scenario.optics.slit_width_um > 0.0)) {
    throw field_error("optics.slit_width_um", "window post-selection needs a positive slit width");
  }
  if (c.state_csv.empty()) {
    try {
      check_grid_for_scenario(c.scenario, spec);
    } catch (const Error& e) {
      throw field_error("grid", e.what());
    }
  }
  if (c.counting.enabled && c.counting.n_incident == 0) {
    throw field_error("counting.n_incident", "must be positive");
  }
}

std::vector<std::pair<std::string, std::string>> resolved_entries(const RunConfig& c) {
  const auto& o = c.scenario.optics;
  std::vector<std::pair<std::string, std::string>> e;
  e.emplace_back("scenario.kind", to_string(c.scenario.kind));
  e.emplace_back("scenario.step_phase_rad", fmt(c.scenario.step_phase_rad));
  e.emplace_back("scenario.attenuator",
                 c.scenario.attenuator ? (*c.scenario.attenuator ? "true" : "false") : "auto");
  e.emplace_back("scenario.attenuation_csv", c.attenuation_csv);
  e.emplace_back("scenario.attenuation_min", fmt(c.attenuation_min));
  e.emplace_back("scenario.attenuation_diameter_mm", fmt(c.attenuation_diameter_mm));
  e.emplace_back("scenario.state_csv", c.state_csv);
  e.emplace_back("optics.wavelength_nm", fmt(o.wavelength_nm));
  e.emplace_back("optics.f1_mm", fmt(o.f1_mm));
  e.emplace_back("optics.f2_mm", fmt(o.f2_mm));
  e.emplace_back("optics.aperture_mm", fmt(o.aperture_mm));
  e.emplace_back("optics.gauss_diameter_mm", fmt(o.gauss_diameter_mm));
  e.emplace_back("optics.slit_width_um", fmt(o.slit_width_um));
  e.emplace_back("optics.slit_offset_um", fmt(o.slit_offset_um));
  e.emplace_back("optics.lens_shift_um", fmt(o.lens_shift_um));
  e.emplace_back("grid.n_points", std::to_string(c.grid.n_points));
  e.emplace_back("grid.x_min_mm", fmt(c.grid.x_min_mm));
  e.emplace_back("grid.x_max_mm", fmt(c.grid.x_max_mm));
  e.emplace_back("measurement.phi_deg", fmt(c.measurement.phi_deg));
  e.emplace_back("measurement.postselect", to_string(c.measurement.postselect));
  e.emplace_back("measurement.k0_rad_per_mm", fmt(c.measurement.k0_rad_per_mm));
  e.emplace_back("measurement.visibility", fmt(c.measurement.visibility));
  e.emplace_back("measurement.sliver_bins", std::to_string(c.measurement.sliver_bins));
  e.emplace_back("measurement.max_flagged_fraction", fmt(c.measurement.max_flagged_fraction));
  e.emplace_back("counting.enabled", c.counting.enabled ? "true" : "false");
  e.emplace_back("counting.n_incident", std::to_string(c.counting.n_incident));
  e.emplace_back("counting.seed", std::to_string(c.counting.seed));
  return e;
}

std::string to_text(const RunConfig& config) {
  std::string out;
  for (const auto& [k, v] : resolved_entries(config)) out += k + " = " + v + "\n";
  return out;
}

const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> params = {
      "measurement.phi_deg", "optics.slit_offset_um", "optics.lens_shift_um",
      "optics.slit_width_um", "counting.n_incident"};
  return params;
}

std::string canonical_parameter(const std::string& name) {
  static const std::map<std::string, std::string> aliases = {
      {"phi", "measurement.phi_deg"},         {"phi_deg", "measurement.phi_deg"},
      {"dx_slit", "optics.slit_offset_um"},   {"slit_offset_um", "optics.slit_offset_um"},
      {"dz", "optics.lens_shift_um"},         {"lens_shift_um", "optics.lens_shift_um"},
      {"slit_width", "optics.slit_width_um"}, {"slit_width_um", "optics.slit_width_um"},
      {"n_incident", "counting.n_incident"},
  };
  for (const auto& p : sweep_parameters()) {
    if (p == name) return p;
  }
  if (const auto it = aliases.find(name); it != aliases.end()) return it->second;
  throw Error(ErrorKind::UnknownParameter,
              "'" + name + "' is not sweepable (use one of measurement.phi_deg, "
                           "optics.slit_offset_um, optics.lens_shift_um, optics.slit_width_um, "
                           "counting.n_incident)");
}

void set_parameter(RunConfig& config, const std::string& path, double value) {
  const std::string p = canonical_parameter(path);
  auto& o = config.scenario.optics;
  if (p == "measurement.phi_deg") {
    config.measurement.phi_deg = value;
  } else if (p == "optics.slit_offset_um") {
    o.slit_offset_um = value;
  } else if (p == "optics.lens_shift_um") {
    o.lens_shift_um = value;
  } else if (p == "optics.slit_width_um") {
    o.slit_width_um = value;
  } else if (p == "counting.n_incident") {
    if (!(value >= 1.0) || value != std::floor(value)) {
      throw field_error(p, "must be a positive integer");
    }
    config.counting.n_incident = static_cast<std::uint64_t>(value);
  }
  validate(config);
}

GridState initial_state(const RunConfig& config) {
  if (!config.state_csv.empty()) {
    GridState loaded = load_grid_state(config.state_csv);
    if (!(loaded.spec() == config.grid.spec())) {
      throw field_error("scenario.state_csv", "state grid differs from the configured grid");
    }
    return normalize(loaded);
  }
  return prepare(config.scenario, config.grid.spec());
}

}  // namespace directwf
