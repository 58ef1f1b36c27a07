#include "directwf/photon_counter.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "directwf/error.hpp"

namespace directwf {
namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

const char* to_string(ReadoutSetting setting) {
  return setting == ReadoutSetting::Hwp ? "hwp" : "qwp";
}

std::uint64_t derive_seed(std::uint64_t seed, std::size_t bin, ReadoutSetting setting) {
  const std::uint64_t tag = (static_cast<std::uint64_t>(bin) << 1) |
                            (setting == ReadoutSetting::Qwp ? 1ULL : 0ULL);
  return splitmix64(splitmix64(seed) ^ splitmix64(tag + 0x632be59bd9b4e019ULL));
}

std::vector<CountRecord> simulate_counts(const WeakValueProfile& exact, ReadoutSetting setting,
                                         std::uint64_t n_incident, std::uint64_t seed) {
  if (n_incident == 0) throw Error(ErrorKind::InvalidArgument, "n_incident must be positive");
  std::vector<CountRecord> records(exact.size());
  for (std::size_t j = 0; j < exact.size(); ++j) {
    CountRecord& rec = records[j];
    rec.bin = j;
    rec.x_mm = exact.x[j];
    rec.setting = setting;
    rec.n_incident = n_incident;
    rec.seed = seed;
    if (exact.flagged[j]) continue;

    std::mt19937_64 rng(derive_seed(seed, j, setting));
    const double p_pass = std::clamp(exact.pass_probability[j], 0.0, 1.0);
    std::binomial_distribution<std::uint64_t> slit(n_incident, p_pass);
    const std::uint64_t passed = slit(rng);

    const double sigma = setting == ReadoutSetting::Hwp ? exact.sigma_x[j] : exact.sigma_y[j];
    const double p_det1 = std::clamp(0.5 * (1.0 + sigma), 0.0, 1.0);
    std::binomial_distribution<std::uint64_t> splitter(passed, p_det1);
    rec.n1 = splitter(rng);
    rec.n2 = passed - rec.n1;
  }
  return records;
}

std::vector<CountRecord> simulate_counts(const GridState& state, const ScanSettings& settings,
                                         ReadoutSetting setting, std::uint64_t n_incident,
                                         std::uint64_t seed) {
  return simulate_counts(scan_weak_values(state, settings), setting, n_incident, seed);
}

double EstimatedProfile::mean_standard_error() const noexcept {
  if (re.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t j = 0; j < re.size(); ++j) sum += 0.5 * (se_re[j] + se_im[j]);
  return sum / static_cast<double>(re.size());
}

EstimatedProfile estimate_profile(const std::vector<CountRecord>& records, double phi,
                                  double visibility, double bin_width) {
  if (!(bin_width > 0.0)) throw Error(ErrorKind::InvalidArgument, "bin width must be positive");
  std::map<std::size_t, std::pair<const CountRecord*, const CountRecord*>> by_bin;
  for (const auto& rec : records) {
    auto& slot = by_bin[rec.bin];
    auto& target = rec.setting == ReadoutSetting::Hwp ? slot.first : slot.second;
    if (target != nullptr) {
      throw Error(ErrorKind::InvalidArgument,
                  "duplicate " + std::string(to_string(rec.setting)) + " record for bin " +
                      std::to_string(rec.bin));
    }
    target = &rec;
  }

  EstimatedProfile est;
  est.counts = records;
  const double scale = visibility / (std::sin(phi) * 2.0 * bin_width);
  for (const auto& [bin, pair] : by_bin) {
    const auto [hwp, qwp] = pair;
    if (hwp == nullptr || qwp == nullptr) {
      throw Error(ErrorKind::InvalidArgument,
                  "bin " + std::to_string(bin) + " needs both hwp and qwp records");
    }
    const auto imbalance = [bin](const CountRecord& r, double& mean, double& se) {
      const std::uint64_t total = r.n1 + r.n2;
      if (total == 0) {
        throw Error(ErrorKind::EmptyBin, "no photons detected in bin " + std::to_string(bin) +
                                             " (" + to_string(r.setting) + ")");
      }
      const double n = static_cast<double>(total);
      mean = (static_cast<double>(r.n1) - static_cast<double>(r.n2)) / n;
      // Binomial variance of the imbalance, floored so the error never collapses to zero.
      se = std::sqrt(std::max(1.0 - mean * mean, 1.0 / n) / n);
    };
    double ex = 0.0, se_x = 0.0, ey = 0.0, se_y = 0.0;
    imbalance(*hwp, ex, se_x);
    imbalance(*qwp, ey, se_y);

    const Complex wv =
        weak_value_from_readout(readout_from_expectations(ex, ey, phi, visibility), bin_width);
    est.x.push_back(hwp->x_mm);
    est.re.push_back(wv.real());
    est.im.push_back(wv.imag());
    est.se_re.push_back(scale * se_x);
    est.se_im.push_back(scale * se_y);
  }
  return est;
}

GridState reconstruct(const EstimatedProfile& estimate, const GridSpec& grid) {
  if (estimate.size() != grid.size()) {
    throw Error(ErrorKind::SpecMismatch, "estimate does not match reconstruction grid");
  }
  ComplexVector amps(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) amps[j] = {estimate.re[j], estimate.im[j]};
  return normalize(GridState(grid, std::move(amps)));
}

}  // namespace directwf
