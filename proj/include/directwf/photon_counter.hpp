#pragma once

#include <cstdint>
#include <vector>

#include "directwf/grid.hpp"
#include "directwf/weak_engine.hpp"

namespace directwf {

// Half-wave plate reads sigma_x, quarter-wave plate reads sigma_y.
enum class ReadoutSetting { Hwp, Qwp };

const char* to_string(ReadoutSetting setting);

struct CountRecord {
  std::size_t bin = 0;  // slab index of the scan
  double x_mm = 0.0;
  ReadoutSetting setting = ReadoutSetting::Hwp;
  std::uint64_t n_incident = 0;
  std::uint64_t n1 = 0;  // Det1
  std::uint64_t n2 = 0;  // Det2
  std::uint64_t seed = 0;  // master seed of the run
};

// Sub-seed for one (slab, setting) stream: splitmix64 finalizer applied to the
// master seed mixed with the slab index and setting. Streams are independent
// of evaluation order.
std::uint64_t derive_seed(std::uint64_t seed, std::size_t bin, ReadoutSetting setting);

// Binomial counting per slab: the slit passes Binomial(n_incident, pass_probability)
// photons, and each lands on Det1 with probability (1 + <sigma>) / 2.
std::vector<CountRecord> simulate_counts(const WeakValueProfile& exact, ReadoutSetting setting,
                                         std::uint64_t n_incident, std::uint64_t seed);
std::vector<CountRecord> simulate_counts(const GridState& state, const ScanSettings& settings,
                                         ReadoutSetting setting, std::uint64_t n_incident,
                                         std::uint64_t seed);

struct EstimatedProfile {
  std::vector<double> x;
  std::vector<double> re;
  std::vector<double> im;
  std::vector<double> se_re;
  std::vector<double> se_im;
  std::vector<CountRecord> counts;

  std::size_t size() const noexcept { return re.size(); }
  double mean_standard_error() const noexcept;
};

// Weak values from detector imbalances via the pointer readout, with binomial
// standard errors propagated through the same linear scaling. Needs one hwp
// and one qwp record per slab; throws EmptyBin when a slab saw no photons.
EstimatedProfile estimate_profile(const std::vector<CountRecord>& records, double phi,
                                  double visibility, double bin_width);

GridState reconstruct(const EstimatedProfile& estimate, const GridSpec& grid);

}  // namespace directwf
