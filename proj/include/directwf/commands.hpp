#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "directwf/config.hpp"
#include "directwf/error.hpp"
#include "directwf/photon_counter.hpp"
#include "directwf/weak_engine.hpp"

namespace directwf {

enum ExitCode : int {
  kExitSuccess = 0,
  kExitFailure = 1,
  kExitValidation = 2,
  kExitDegenerate = 3,
  kExitOracleMismatch = 4,
};

int exit_code_for(const Error& error);

struct PhaseFitSummary {
  std::string quantity;  // "m", "r" or "step"
  double fitted = 0.0;
  double expected = 0.0;
  double standard_error = 0.0;
};

/// Everything one pipeline evaluation produces, without touching the filesystem.
struct RunResult {
  RunResult(GridState truth_, WeakValueProfile profile_, GridState reconstruction_)
      : truth(std::move(truth_)), profile(std::move(profile_)), reconstruction(std::move(reconstruction_)) {}

  GridState truth;           // ground truth on the reconstruction grid
  WeakValueProfile profile;  // exact engine profile
  GridState reconstruction;  // from the engine profile
  std::optional<double> fidelity;  // absent for no-slit runs (profile is |Psi|^2)
  Complex completeness{0.0, 0.0};
  double pass_min = 0.0;
  double pass_max = 0.0;
  double pass_mean = 0.0;
  double probability_l1 = 0.0;
  double flagged_fraction = 0.0;
  std::optional<PhaseFitSummary> phase_fit;
  std::optional<EstimatedProfile> estimate;
  std::optional<GridState> estimate_reconstruction;
  std::optional<double> estimate_fidelity;
};

RunResult run_pipeline(const RunConfig& config);

int cmd_run(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

int cmd_sweep(const RunConfig& config, const std::string& parameter,
              const std::vector<double>& values, const std::filesystem::path& out_dir,
              std::ostream& log);

// b0 empty: every post-selection index.
int cmd_discrete(std::size_t dim, const std::filesystem::path& state_file,
                 std::optional<std::size_t> b0, const std::filesystem::path& out_dir,
                 std::ostream& log);

int cmd_oracle(const RunConfig& config, const std::filesystem::path& out_dir, bool inject_fault,
               std::ostream& log);

}  // namespace directwf
