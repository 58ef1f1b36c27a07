#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "directwf/grid.hpp"
#include "directwf/weak_engine.hpp"

namespace directwf {

inline constexpr double kDefaultMagnitudeFloor = 1e-2;

/// Unwrapped phase over the valid bins of a profile.
struct PhaseProfile {
  std::vector<std::size_t> bins;
  std::vector<double> x;
  std::vector<double> phase;
  double reference_offset = 0.0;  // arg at the leftmost valid bin

  std::size_t size() const noexcept { return phase.size(); }
};

// Phase = atan2(Im, Re) for bins whose |value| is at least `floor` times the
// peak |value|; unwrapped left to right onto the nearest branch.
PhaseProfile extract_phase(std::span<const double> x, std::span<const Complex> values,
                           const std::vector<bool>& flagged,
                           double floor = kDefaultMagnitudeFloor);
PhaseProfile extract_phase(const WeakValueProfile& profile, double floor = kDefaultMagnitudeFloor);

struct FitResult {
  double coefficient = 0.0;          // m (rad/mm) or r (rad/mm^2)
  std::vector<double> lower_terms;   // intercept, then linear term for quadratic fits
  double residual_rms = 0.0;
  double coefficient_se = 0.0;
  std::size_t bins_used = 0;
};

FitResult fit_linear_phase(const PhaseProfile& pp);
FitResult fit_quadratic_phase(const PhaseProfile& pp);

// Wrapped phase difference a - b over bins valid in both, in (-pi, pi].
PhaseProfile phase_difference(const PhaseProfile& a, const PhaseProfile& b);

// mean(phase | x > x0) - mean(phase | x < x0).
double phase_step(const PhaseProfile& pp, double x0 = 0.0);

enum class ProfileMeaning {
  Amplitude,    // values proportional to Psi(x); probability from |value|^2
  Expectation,  // no post-selection; Re(value) proportional to |Psi(x)|^2
};

ProfileMeaning default_meaning(const WeakValueProfile& profile);

// Probability per slab estimated from the profile, normalized over unflagged slabs.
std::vector<double> probability_from_profile(const WeakValueProfile& profile,
                                             ProfileMeaning meaning);

// Sums fine-grid probabilities over consecutive blocks.
std::vector<double> coarse_probability(std::span<const double> truth, std::size_t block);

struct ProbabilityComparison {
  double l1 = 0.0;
  double max_deviation = 0.0;
  std::size_t bins_compared = 0;
};

ProbabilityComparison compare_probability(std::span<const double> estimated,
                                          std::span<const double> truth,
                                          const std::vector<bool>& flagged);
ProbabilityComparison compare_probability(const WeakValueProfile& profile,
                                          std::span<const double> truth);

}  // namespace directwf
