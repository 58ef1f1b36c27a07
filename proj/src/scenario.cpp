#include "directwf/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "directwf/error.hpp"
#include "directwf/state_io.hpp"

namespace directwf {

void OpticalParams::validate() const {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::InvalidArgument, std::string(name) + " must be positive");
    }
  };
  positive(wavelength_nm, "wavelength_nm");
  positive(f1_mm, "f1_mm");
  positive(f2_mm, "f2_mm");
  positive(aperture_mm, "aperture_mm");
  positive(gauss_diameter_mm, "gauss_diameter_mm");
  positive(slit_width_um, "slit_width_um");
  if (!std::isfinite(slit_offset_um) || !std::isfinite(lens_shift_um)) {
    throw Error(ErrorKind::InvalidArgument, "slit_offset_um and lens_shift_um must be finite");
  }
}

AttenuationProfile::AttenuationProfile(std::vector<double> r, std::vector<double> t)
    : r_(std::move(r)), t_(std::move(t)) {
  if (r_.size() != t_.size() || r_.empty()) {
    throw Error(ErrorKind::InvalidArgument, "attenuation table needs matching, non-empty columns");
  }
  for (std::size_t i = 0; i < r_.size(); ++i) {
    if (!(t_[i] >= 0.0 && t_[i] <= 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "transmission values must lie in [0, 1]");
    }
    if (i > 0 && !(r_[i] > r_[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "attenuation radii must be strictly increasing");
    }
  }
}

AttenuationProfile AttenuationProfile::inverted_gaussian(double min_transmission,
                                                         double diameter_1e2_mm, double extent_mm,
                                                         std::size_t samples) {
  if (!(min_transmission >= 0.0 && min_transmission <= 1.0) || !(diameter_1e2_mm > 0.0) ||
      samples < 2) {
    throw Error(ErrorKind::InvalidArgument, "invalid inverted-Gaussian attenuation parameters");
  }
  const double radius = 0.5 * diameter_1e2_mm;
  std::vector<double> r(samples);
  std::vector<double> t(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    r[i] = extent_mm * static_cast<double>(i) / static_cast<double>(samples - 1);
    t[i] = 1.0 - (1.0 - min_transmission) * std::exp(-2.0 * r[i] * r[i] / (radius * radius));
  }
  return AttenuationProfile(std::move(r), std::move(t));
}

AttenuationProfile AttenuationProfile::from_table(std::vector<double> r_mm,
                                                  std::vector<double> transmission) {
  return AttenuationProfile(std::move(r_mm), std::move(transmission));
}

AttenuationProfile AttenuationProfile::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open attenuation profile " + path.string());
  std::vector<double> r;
  std::vector<double> t;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#' || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) throw Error(ErrorKind::Io, "attenuation CSV needs two columns");
    if (!header_seen) {
      header_seen = true;
      if (fields[0] == "x_mm") continue;
    }
    try {
      r.push_back(std::stod(fields[0]));
      t.push_back(std::stod(fields[1]));
    } catch (const std::exception&) {
      throw Error(ErrorKind::Io, "attenuation CSV: bad number in '" + line + "'");
    }
  }
  return AttenuationProfile(std::move(r), std::move(t));
}

double AttenuationProfile::transmission(double x_mm) const {
  const double r = std::abs(x_mm);
  if (r <= r_.front()) return t_.front();
  if (r >= r_.back()) return t_.back();
  const auto upper = std::upper_bound(r_.begin(), r_.end(), r);
  const auto hi = static_cast<std::size_t>(upper - r_.begin());
  const std::size_t lo = hi - 1;
  const double frac = (r - r_[lo]) / (r_[hi] - r_[lo]);
  return t_[lo] + frac * (t_[hi] - t_[lo]);
}

const char* to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::TruncatedGaussian: return "truncated_gaussian";
    case ScenarioKind::Bullseye: return "bullseye";
    case ScenarioKind::GlassStep: return "glass_step";
    case ScenarioKind::PhaseGradient: return "phase_gradient";
    case ScenarioKind::PhaseCurvature: return "phase_curvature";
  }
  return "?";
}

ScenarioKind parse_scenario_kind(const std::string& name) {
  for (auto kind : {ScenarioKind::TruncatedGaussian, ScenarioKind::Bullseye,
                    ScenarioKind::GlassStep, ScenarioKind::PhaseGradient,
                    ScenarioKind::PhaseCurvature}) {
    if (name == to_string(kind)) return kind;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown scenario kind '" + name + "'");
}

bool Scenario::uses_attenuator() const noexcept {
  if (attenuator) return *attenuator;
  return kind == ScenarioKind::Bullseye || kind == ScenarioKind::GlassStep;
}

void Scenario::validate() const {
  optics.validate();
  if (!std::isfinite(step_phase_rad)) {
    throw Error(ErrorKind::InvalidArgument, "step_phase_rad must be finite");
  }
}

double slit_offset_to_k(double slit_offset_um, double f2_mm, double wavelength_nm) {
  if (!(f2_mm > 0.0) || !(wavelength_nm > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "focal length and wavelength must be positive");
  }
  return 2.0 * std::numbers::pi * (slit_offset_um * 1e-3) / (f2_mm * wavelength_nm * 1e-6);
}

double lens_shift_to_curvature(double lens_shift_um, double f1_mm, double wavelength_nm) {
  if (!(f1_mm > 0.0) || !(wavelength_nm > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "focal length and wavelength must be positive");
  }
  return std::numbers::pi * (lens_shift_um * 1e-3) / (f1_mm * f1_mm * wavelength_nm * 1e-6);
}

Scenario base_scenario(const Scenario& scenario) {
  Scenario base = scenario;
  base.attenuator = scenario.uses_attenuator();
  base.kind = base.attenuator.value() ? ScenarioKind::Bullseye : ScenarioKind::TruncatedGaussian;
  return base;
}

void check_grid_for_scenario(const Scenario& scenario, const GridSpec& spec) {
  const double half_aperture = 0.5 * scenario.optics.aperture_mm;
  if (spec.x_min() > -half_aperture || spec.x_max() < half_aperture) {
    throw Error(ErrorKind::GridTooCoarse, "grid does not span the aperture");
  }
  if (1.0 / spec.dx() < 8.0) {
    throw Error(ErrorKind::GridTooCoarse, "grid needs at least 8 points per mm");
  }
}

GridState prepare(const Scenario& scenario, const GridSpec& spec) {
  scenario.validate();
  const auto& optics = scenario.optics;
  check_grid_for_scenario(scenario, spec);
  const double half_aperture = 0.5 * optics.aperture_mm;

  const double waist = 0.5 * optics.gauss_diameter_mm;
  const double m = slit_offset_to_k(optics.slit_offset_um, optics.f2_mm, optics.wavelength_nm);
  const double r = lens_shift_to_curvature(optics.lens_shift_um, optics.f1_mm, optics.wavelength_nm);

  ComplexVector amps(spec.size(), Complex{0.0, 0.0});
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double x = spec.x(i);
    if (std::abs(x) > half_aperture) continue;
    double magnitude = std::exp(-x * x / (waist * waist));
    if (scenario.uses_attenuator()) magnitude *= std::sqrt(scenario.attenuation.transmission(x));
    double phase = 0.0;
    switch (scenario.kind) {
      case ScenarioKind::GlassStep: phase = x > 0.0 ? scenario.step_phase_rad : 0.0; break;
      case ScenarioKind::PhaseGradient: phase = m * x; break;
      case ScenarioKind::PhaseCurvature: phase = r * x * x; break;
      default: break;
    }
    amps[i] = std::polar(magnitude, phase);
  }
  return normalize(GridState(spec, std::move(amps)));
}

std::vector<double> probability_scan(const GridState& state) {
  std::vector<double> out(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) out[i] = std::norm(state[i]) * state.measure();
  return out;
}

}  // namespace directwf
