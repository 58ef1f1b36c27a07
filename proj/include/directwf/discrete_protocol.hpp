#pragma once

#include <cstddef>

#include "directwf/discrete.hpp"
#include "directwf/grid.hpp"

namespace directwf {

// Weak value of pi_a = |a><a| post-selected on |b0>:
//   <b0|a><a|Psi> / <b0|Psi>.
Complex discrete_weak_value(const DiscreteState& psi, const BasisPair& pair, std::size_t a,
                            std::size_t b0);

// All N weak values for a fixed post-selection b0.
Eigen::VectorXcd discrete_weak_profile(const DiscreteState& psi, const BasisPair& pair,
                                       std::size_t b0);

// Recovers |Psi> from a complete weak-value profile: divides out <b0|a>
// (a pure phase times 1/sqrt(N) for unbiased bases) and normalizes.
DiscreteState reconstruct_discrete(const Eigen::VectorXcd& weak_values, const BasisPair& pair,
                                   std::size_t b0);

}  // namespace directwf
