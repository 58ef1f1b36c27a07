#include "directwf/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "directwf/error.hpp"

namespace directwf {
namespace {

double wrap_to_pi(double angle) {
  const double two_pi = 2.0 * std::numbers::pi;
  double w = std::remainder(angle, two_pi);
  if (w <= -std::numbers::pi) w += two_pi;
  return w;
}

FitResult polynomial_fit(const PhaseProfile& pp, int degree) {
  const auto n = static_cast<Eigen::Index>(pp.size());
  if (n <= degree + 1) {
    throw Error(ErrorKind::TooFewBins, "phase fit needs more valid bins than parameters");
  }
  Eigen::MatrixXd design(n, degree + 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = pp.x[static_cast<std::size_t>(i)];
    double p = 1.0;
    for (int d = 0; d <= degree; ++d) {
      design(i, d) = p;
      p *= x;
    }
    y(i) = pp.phase[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd coeffs = design.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd residual = y - design * coeffs;
  const double sse = residual.squaredNorm();
  const double dof = static_cast<double>(n - degree - 1);
  const Eigen::MatrixXd cov = (design.transpose() * design).inverse() * (sse / dof);

  FitResult fit;
  fit.coefficient = coeffs(degree);
  for (int d = 0; d < degree; ++d) fit.lower_terms.push_back(coeffs(d));
  fit.residual_rms = std::sqrt(sse / static_cast<double>(n));
  fit.coefficient_se = std::sqrt(std::max(cov(degree, degree), 0.0));
  fit.bins_used = static_cast<std::size_t>(n);
  return fit;
}

}  // namespace

PhaseProfile extract_phase(std::span<const double> x, std::span<const Complex> values,
                           const std::vector<bool>& flagged, double floor) {
  if (x.size() != values.size() || flagged.size() != values.size()) {
    throw Error(ErrorKind::SpecMismatch, "phase extraction inputs differ in length");
  }
  double peak = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!flagged[j]) peak = std::max(peak, std::abs(values[j]));
  }
  PhaseProfile pp;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (flagged[j] || !(std::abs(values[j]) >= floor * peak) || peak == 0.0) continue;
    const double raw = std::atan2(values[j].imag(), values[j].real());
    double unwrapped = raw;
    if (!pp.phase.empty()) {
      const double prev = pp.phase.back();
      unwrapped = raw + 2.0 * std::numbers::pi * std::round((prev - raw) / (2.0 * std::numbers::pi));
    }
    pp.bins.push_back(j);
    pp.x.push_back(x[j]);
    pp.phase.push_back(unwrapped);
  }
  if (pp.size() < 2) throw Error(ErrorKind::TooFewBins, "fewer than two bins above the magnitude floor");
  pp.reference_offset = pp.phase.front();
  return pp;
}

PhaseProfile extract_phase(const WeakValueProfile& profile, double floor) {
  return extract_phase(profile.x, profile.values, profile.flagged, floor);
}

FitResult fit_linear_phase(const PhaseProfile& pp) { return polynomial_fit(pp, 1); }

FitResult fit_quadratic_phase(const PhaseProfile& pp) { return polynomial_fit(pp, 2); }

PhaseProfile phase_difference(const PhaseProfile& a, const PhaseProfile& b) {
  PhaseProfile diff;
  std::size_t j = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    while (j < b.size() && b.bins[j] < a.bins[i]) ++j;
    if (j == b.size()) break;
    if (b.bins[j] != a.bins[i]) continue;
    diff.bins.push_back(a.bins[i]);
    diff.x.push_back(a.x[i]);
    diff.phase.push_back(wrap_to_pi(a.phase[i] - b.phase[j]));
  }
  if (diff.size() < 2) throw Error(ErrorKind::TooFewBins, "profiles share fewer than two valid bins");
  diff.reference_offset = diff.phase.front();
  return diff;
}

double phase_step(const PhaseProfile& pp, double x0) {
  double left = 0.0, right = 0.0;
  std::size_t n_left = 0, n_right = 0;
  for (std::size_t i = 0; i < pp.size(); ++i) {
    if (pp.x[i] < x0) {
      left += pp.phase[i];
      ++n_left;
    } else if (pp.x[i] > x0) {
      right += pp.phase[i];
      ++n_right;
    }
  }
  if (n_left == 0 || n_right == 0) {
    throw Error(ErrorKind::TooFewBins, "phase step needs valid bins on both sides");
  }
  return right / static_cast<double>(n_right) - left / static_cast<double>(n_left);
}

ProfileMeaning default_meaning(const WeakValueProfile& profile) {
  return profile.settings.postselection.kind == PostSelectionKind::None ? ProfileMeaning::Expectation
                                                                        : ProfileMeaning::Amplitude;
}

std::vector<double> probability_from_profile(const WeakValueProfile& profile,
                                             ProfileMeaning meaning) {
  std::vector<double> p(profile.size(), 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < profile.size(); ++j) {
    if (profile.flagged[j]) continue;
    p[j] = meaning == ProfileMeaning::Amplitude ? std::norm(profile.values[j])
                                                : profile.values[j].real();
    total += p[j];
  }
  if (!(std::abs(total) > 1e-300)) {
    throw Error(ErrorKind::DegenerateProfile, "profile carries no probability weight");
  }
  for (auto& v : p) v /= total;
  return p;
}

std::vector<double> coarse_probability(std::span<const double> truth, std::size_t block) {
  if (block == 0 || truth.size() % block != 0) {
    throw Error(ErrorKind::InvalidArgument, "block must divide the profile length");
  }
  std::vector<double> out(truth.size() / block, 0.0);
  for (std::size_t i = 0; i < truth.size(); ++i) out[i / block] += truth[i];
  return out;
}

ProbabilityComparison compare_probability(std::span<const double> estimated,
                                          std::span<const double> truth,
                                          const std::vector<bool>& flagged) {
  if (estimated.size() != truth.size() || flagged.size() != truth.size()) {
    throw Error(ErrorKind::SpecMismatch, "probability profiles live on different grids");
  }
  ProbabilityComparison cmp;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    if (flagged[j]) continue;
    const double d = std::abs(estimated[j] - truth[j]);
    cmp.l1 += d;
    cmp.max_deviation = std::max(cmp.max_deviation, d);
    ++cmp.bins_compared;
  }
  return cmp;
}

ProbabilityComparison compare_probability(const WeakValueProfile& profile,
                                          std::span<const double> truth) {
  const auto estimated = probability_from_profile(profile, default_meaning(profile));
  if (truth.size() == profile.spec.size() && profile.settings.span > 1) {
    return compare_probability(estimated, coarse_probability(truth, profile.settings.span),
                               profile.flagged);
  }
  return compare_probability(estimated, truth, profile.flagged);
}

}  // namespace directwf
