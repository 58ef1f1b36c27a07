#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "directwf/grid.hpp"

namespace directwf {

/// Bench geometry. Unit suffixes are part of every field name.
struct OpticalParams {
  double wavelength_nm = 783.0;
  double f1_mm = 300.0;
  double f2_mm = 1000.0;
  double aperture_mm = 43.0;
  double gauss_diameter_mm = 56.4;  // 1/e^2 intensity diameter
  double slit_width_um = 15.0;
  double slit_offset_um = 0.0;  // transverse slit displacement in the Fourier plane
  double lens_shift_um = 0.0;   // axial displacement of the collimating lens

  void validate() const;
};

/// Radial intensity transmission T(|x|) of the apodized attenuator, linearly
/// interpolated and clamped at the table ends.
class AttenuationProfile {
 public:
  // Inverted Gaussian dip: T(r) = 1 - (1 - min) exp(-2 r^2 / (d/2)^2).
  static AttenuationProfile inverted_gaussian(double min_transmission = 0.1,
                                              double diameter_1e2_mm = 10.0,
                                              double extent_mm = 40.0, std::size_t samples = 401);
  static AttenuationProfile from_table(std::vector<double> r_mm, std::vector<double> transmission);
  // Two-column CSV: x_mm, transmission.
  static AttenuationProfile load_csv(const std::filesystem::path& path);

  double transmission(double x_mm) const;
  const std::vector<double>& radii() const noexcept { return r_; }
  const std::vector<double>& values() const noexcept { return t_; }

 private:
  AttenuationProfile(std::vector<double> r, std::vector<double> t);
  std::vector<double> r_;
  std::vector<double> t_;
};

enum class ScenarioKind { TruncatedGaussian, Bullseye, GlassStep, PhaseGradient, PhaseCurvature };

const char* to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(const std::string& name);

struct Scenario {
  ScenarioKind kind = ScenarioKind::TruncatedGaussian;
  OpticalParams optics{};
  double step_phase_rad = 1.5707963267948966;  // glass plate phase for x > 0
  // Attenuator in the beam; defaults to on for bullseye and glass_step.
  std::optional<bool> attenuator{};
  AttenuationProfile attenuation = AttenuationProfile::inverted_gaussian();

  bool uses_attenuator() const noexcept;
  void validate() const;
};

// k0 = 2 pi dx_slit / (f2 lambda), rad/mm.
double slit_offset_to_k(double slit_offset_um, double f2_mm, double wavelength_nm);
// r = pi dz / (f1^2 lambda), rad/mm^2.
double lens_shift_to_curvature(double lens_shift_um, double f1_mm, double wavelength_nm);

// Scenario without its phase modifications (the no-plate / no-gradient reference).
Scenario base_scenario(const Scenario& scenario);

// Throws GridTooCoarse unless the grid spans the aperture with >= 8 points per mm.
void check_grid_for_scenario(const Scenario& scenario, const GridSpec& spec);

GridState prepare(const Scenario& scenario, const GridSpec& spec);

// |Psi(x_i)|^2 dx, the ideal detector-scan curve.
std::vector<double> probability_scan(const GridState& state);

}  // namespace directwf
