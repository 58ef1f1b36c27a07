#pragma once

#include <cstddef>
#include <optional>

#include "directwf/grid.hpp"
#include "directwf/weak_engine.hpp"

namespace directwf {

inline constexpr std::size_t kOracleMaxPoints = 256;

struct OracleOptions {
  // Fault injection for negative controls: flips the sign of sigma_y.
  bool flip_sigma_y = false;
};

struct OracleResult {
  std::optional<Complex> weak_value;  // empty when undefined (phi = 0 or null post-selection)
  double pass_probability = 0.0;
  double sigma_x = 0.0;
  double sigma_y = 0.0;
};

// Brute-force reference: builds the full 2n-dimensional joint vector, applies
// the coupling as a dense unitary, post-selects with explicit projectors
// (dense DFT matrix for windows, explicit partial trace for no slit) and reads
// the pointer out with explicit Pauli matrices. Same output scaling as
// scan_weak_values. Grids above kOracleMaxPoints throw GridTooLarge.
OracleResult oracle_full_simulation(const GridState& state, const CouplingConfig& cfg,
                                    const PostSelection& ps, const OracleOptions& options = {});

}  // namespace directwf
