// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "directwf/analysis.hpp"
#include "directwf/discrete.hpp"
#include "directwf/discrete_protocol.hpp"
#include "directwf/error.hpp"
#include "directwf/oracle.hpp"
#include "directwf/photon_counter.hpp"
#include "directwf/scenario.hpp"
#include "directwf/weak_engine.hpp"

using namespace directwf;

namespace {

// Pinned tolerances.
constexpr double kFidelityAt20Deg = 0.995;
constexpr double kFidelityAt5Deg = 0.9999;
constexpr double kRatioTarget = 4.0;
constexpr double kRatioTolerance = 0.5;
constexpr double kGradientRelTol = 0.01;
constexpr double kCurvatureRelTol = 0.02;
constexpr double kNoSlitL1 = 0.01;
constexpr double kNoSlitImOverRe = 0.1;
constexpr double kOracleTol = 1e-10;
constexpr int kOracleDraws = 100;
constexpr std::size_t kOraclePoints = 64;
constexpr double kDiscreteFidelityTol = 1e-10;
constexpr double kDiscreteSumTol = 1e-12;
constexpr int kDiscreteStates = 100;
constexpr double kVisibilityTol = 1e-10;
constexpr double kCountingFidelity = 0.98;
constexpr std::uint64_t kCountingBudget = 10000;
constexpr std::uint64_t kCountingSeed = 42;
constexpr double kSlopeTarget = -0.5;
constexpr double kSlopeTolerance = 0.05;
constexpr double kCoverageTarget = 0.68;
constexpr double kCoverageTolerance = 0.05;
constexpr int kCoverageReps = 200;
constexpr double kStepTol = 0.02;
constexpr double kStepL1 = 0.02;

// Reference bench grid: 2048 points over 64 mm.
const GridSpec kGrid(2048, -32.0, 32.0);
// 1 mm sliver on that grid.
constexpr std::size_t kSliverBins = 32;

double deg(double d) { return d * std::numbers::pi / 180.0; }

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

ScanSettings point0(double phi, std::size_t span = 1) {
  return {phi, PostSelection::point(0.0), 1.0, span};
}

Outcome reconstruction() {
  const auto psi = prepare(Scenario{}, kGrid);
  const double f20 = fidelity(reconstruct(scan_weak_values(psi, point0(deg(20.0)))), psi);
  const double f5 = fidelity(reconstruct(scan_weak_values(psi, point0(deg(5.0)))), psi);
  return {f20 >= kFidelityAt20Deg && f5 >= kFidelityAt5Deg,
          "F(20deg)=" + fmt("%.12f", f20) + " F(5deg)=" + fmt("%.14f", f5)};
}

Outcome weak_limit() {
  const auto psi = prepare(Scenario{}, kGrid);
  const std::vector<double> phis{0.2, 0.1, 0.05};
  std::vector<WeakValueProfile> scans;
  for (double phi : phis) scans.push_back(scan_weak_values(psi, point0(phi)));
  double lo = 1e300, hi = 0.0;
  std::size_t bins = 0;
  for (std::size_t i = 0; i < kGrid.size(); ++i) {
    const Complex exact = analytic_weak_value(psi, i, 0.0);
    if (exact == Complex(0.0, 0.0)) continue;
    std::vector<double> err;
    for (const auto& s : scans) err.push_back(std::abs(s.values[i] - exact));
    for (std::size_t k = 0; k + 1 < err.size(); ++k) {
      const double ratio = err[k] / err[k + 1];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    ++bins;
  }
  const bool ok = bins > 0 && lo >= kRatioTarget - kRatioTolerance && hi <= kRatioTarget + kRatioTolerance;
  return {ok, "error ratios in [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "] over " +
                  std::to_string(bins) + " bins"};
}

Outcome gradient() {
  double worst = 0.0;
  for (double dx : {-30.0, -20.0, -10.0, 10.0, 20.0, 30.0, 40.0}) {
    Scenario s;
    s.kind = ScenarioKind::PhaseGradient;
    s.optics.slit_offset_um = dx;
    const double expected = 2.0 * std::numbers::pi * (dx * 1e-3) / (s.optics.f2_mm * s.optics.wavelength_nm * 1e-6);
    const double m = fit_linear_phase(extract_phase(scan_weak_values(prepare(s, kGrid), point0(deg(20.0))))).coefficient;
    worst = std::max(worst, std::abs(m - expected) / std::abs(expected));
  }
  return {worst <= kGradientRelTol, "worst relative error " + fmt("%.3e", worst) + " over 7 offsets"};
}

Outcome curvature() {
  double worst = 0.0;
  for (double dz : {200.0, 400.0, 600.0, 800.0}) {
    Scenario s;
    s.kind = ScenarioKind::PhaseCurvature;
    s.optics.lens_shift_um = dz;
    const double f1 = s.optics.f1_mm;
    const double expected = std::numbers::pi * (dz * 1e-3) / (f1 * f1 * s.optics.wavelength_nm * 1e-6);
    const double r = fit_quadratic_phase(extract_phase(scan_weak_values(prepare(s, kGrid), point0(deg(20.0))))).coefficient;
    worst = std::max(worst, std::abs(r - expected) / expected);
  }
  return {worst <= kCurvatureRelTol, "worst relative error " + fmt("%.3e", worst) + " over 4 shifts"};
}

Outcome no_slit() {
  const auto psi = prepare(Scenario{}, kGrid);
  const auto profile = scan_weak_values(psi, {deg(20.0), PostSelection::none(), 1.0, 1});
  double re_sum = 0.0, re2 = 0.0, im2 = 0.0;
  for (auto v : profile.values) {
    re_sum += v.real();
    re2 += v.real() * v.real();
    im2 += v.imag() * v.imag();
  }
  double l1 = 0.0;
  for (std::size_t i = 0; i < kGrid.size(); ++i)
    l1 += std::abs(profile.values[i].real() / re_sum - std::norm(psi[i]) * kGrid.dx());
  const double ratio = std::sqrt(im2 / re2);
  return {l1 <= kNoSlitL1 && ratio <= kNoSlitImOverRe,
          "L1=" + fmt("%.3e", l1) + " |Im|/|Re|=" + fmt("%.3e", ratio)};
}

Outcome oracle() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  const GridSpec spec(kOraclePoints, -4.0, 4.0);
  const double k_max = spec.dk() * static_cast<double>(kOraclePoints) / 2.0;
  double worst = 0.0;
  std::size_t bins = 0, flag_mismatch = 0;
  for (int draw = 0; draw < kOracleDraws; ++draw) {
    ComplexVector amps(spec.size());
    for (auto& a : amps) a = {normal(rng), normal(rng)};
    const auto psi = normalize(GridState(spec, amps));
    ScanSettings s;
    s.phi = 0.01 + unit(rng) * (std::numbers::pi / 2 - 0.01);
    s.visibility = 0.1 + 0.9 * unit(rng);
    s.span = std::size_t{1} << static_cast<int>(unit(rng) * 3.0);
    const double k0 = (2.0 * unit(rng) - 1.0) * 0.5 * k_max;
    switch (draw % 3) {
      case 0: s.postselection = PostSelection::point(k0); break;
      case 1: s.postselection = PostSelection::window(k0, (0.5 + 10.0 * unit(rng)) * spec.dk()); break;
      default: s.postselection = PostSelection::none(); break;
    }
    const auto profile = scan_weak_values(psi, s);
    for (std::size_t j = 0; j < profile.size(); ++j) {
      const auto ref = oracle_full_simulation(psi, {s.phi, profile.first_bin[j], s.visibility, s.span},
                                              s.postselection);
      if (ref.weak_value.has_value() == profile.flagged[j]) {
        ++flag_mismatch;
        continue;
      }
      if (ref.weak_value) worst = std::max(worst, std::abs(*ref.weak_value - profile.values[j]));
      ++bins;
    }
  }
  return {worst <= kOracleTol && flag_mismatch == 0,
          "max |engine - oracle| " + fmt("%.3e", worst) + " over " + std::to_string(bins) +
              " bins, " + std::to_string(flag_mismatch) + " flag mismatches"};
}

Outcome discrete() {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> normal;
  double worst_f = 0.0, worst_sum = 0.0;
  for (std::size_t n : {2u, 3u, 4u, 8u}) {
    const auto pair = fourier_mub(n);
    for (int t = 0; t < kDiscreteStates; ++t) {
      Eigen::VectorXcd amps(static_cast<Eigen::Index>(n));
      for (Eigen::Index i = 0; i < amps.size(); ++i) amps(i) = {normal(rng), normal(rng)};
      const auto psi = normalize(DiscreteState(amps));
      for (std::size_t b0 = 0; b0 < n; ++b0) {
        const auto wv = discrete_weak_profile(psi, pair, b0);
        worst_sum = std::max(worst_sum, std::abs(wv.sum() - Complex(1.0, 0.0)));
        worst_f = std::max(worst_f, std::abs(1.0 - fidelity(reconstruct_discrete(wv, pair, b0), psi)));
      }
    }
  }
  return {worst_f <= kDiscreteFidelityTol && worst_sum <= kDiscreteSumTol,
          "max |1-F|=" + fmt("%.3e", worst_f) + " max |sum-1|=" + fmt("%.3e", worst_sum)};
}

Outcome visibility() {
  const auto psi = prepare(Scenario{}, kGrid);
  const auto a = reconstruct(scan_weak_values(psi, {deg(20.0), PostSelection::point(0.0), 1.0, 1}));
  const auto b = reconstruct(scan_weak_values(psi, {deg(20.0), PostSelection::point(0.0), 0.5, 1}));
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return {worst <= kVisibilityTol, "max amplitude difference " + fmt("%.3e", worst)};
}

EstimatedProfile estimate(const WeakValueProfile& exact, std::uint64_t n, std::uint64_t seed) {
  auto records = simulate_counts(exact, ReadoutSetting::Hwp, n, seed);
  const auto qwp = simulate_counts(exact, ReadoutSetting::Qwp, n, seed);
  records.insert(records.end(), qwp.begin(), qwp.end());
  return estimate_profile(records, exact.settings.phi, exact.settings.visibility, exact.bin_width);
}

Outcome monte_carlo() {
  const auto psi = prepare(Scenario{}, kGrid);
  const auto exact = scan_weak_values(psi, point0(deg(20.0), kSliverBins));
  const auto truth = normalize(coarse_grain(psi, kSliverBins));
  const auto grid = exact.reconstruction_grid();

  const double f = fidelity(reconstruct(estimate(exact, kCountingBudget, kCountingSeed), grid), truth);

  const double se_lo = estimate(exact, 100, kCountingSeed).mean_standard_error();
  const double se_hi = estimate(exact, 1000000, kCountingSeed).mean_standard_error();
  const double slope = std::log(se_hi / se_lo) / std::log(1e4);

  std::size_t covered = 0, trials = 0;
  for (int rep = 0; rep < kCoverageReps; ++rep) {
    const auto est = estimate(exact, kCountingBudget, kCountingSeed + 1 + static_cast<std::uint64_t>(rep));
    for (std::size_t j = 0; j < est.size(); ++j) {
      covered += std::abs(est.re[j] - exact.values[j].real()) <= est.se_re[j];
      covered += std::abs(est.im[j] - exact.values[j].imag()) <= est.se_im[j];
      trials += 2;
    }
  }
  const double coverage = static_cast<double>(covered) / static_cast<double>(trials);

  const bool f_ok = f >= kCountingFidelity;
  const bool slope_ok = std::abs(slope - kSlopeTarget) <= kSlopeTolerance;
  const bool cov_ok = std::abs(coverage - kCoverageTarget) <= kCoverageTolerance;
  return {f_ok && slope_ok && cov_ok,
          std::string("fidelity(n=1e4)=") + fmt("%.4f", f) + (f_ok ? " ok" : " LOW") +
              ", SE slope=" + fmt("%.4f", slope) + (slope_ok ? " ok" : " OFF") +
              ", 1-sigma coverage=" + fmt("%.4f", coverage) + (cov_ok ? " ok" : " OFF")};
}

Outcome glass_step() {
  Scenario plate;
  plate.kind = ScenarioKind::GlassStep;
  const auto base = base_scenario(plate);
  const auto with = scan_weak_values(prepare(plate, kGrid), point0(deg(20.0)));
  const auto without = scan_weak_values(prepare(base, kGrid), point0(deg(20.0)));
  const double step = phase_step(extract_phase(with));
  const auto rec_with = reconstruct(with);
  const auto rec_without = reconstruct(without);
  double l1 = 0.0;
  for (std::size_t i = 0; i < rec_with.size(); ++i)
    l1 += std::abs(std::norm(rec_with[i]) - std::norm(rec_without[i])) * kGrid.dx();
  const double err = std::abs(step - plate.step_phase_rad);
  return {err <= kStepTol && l1 <= kStepL1,
          "step=" + fmt("%.5f", step) + " (target " + fmt("%.5f", plate.step_phase_rad) +
              ") |Psi|^2 L1=" + fmt("%.3e", l1)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"reconstruction fidelity", reconstruction},
      {"weak-limit convergence", weak_limit},
      {"phase gradient fits", gradient},
      {"phase curvature fits", curvature},
      {"no-slit limit", no_slit},
      {"oracle equivalence", oracle},
      {"discrete protocol", discrete},
      {"visibility invariance", visibility},
      {"Monte Carlo statistics", monte_carlo},
      {"glass-step phase", glass_step},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %zu (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
