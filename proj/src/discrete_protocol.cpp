#include "directwf/discrete_protocol.hpp"

#include <string>

#include "directwf/error.hpp"
#include "directwf/grid.hpp"

namespace directwf {
namespace {

void check_inputs(std::size_t dim, const BasisPair& pair, std::size_t b0) {
  if (dim != pair.dim()) throw Error(ErrorKind::SpecMismatch, "state and bases differ in dimension");
  if (b0 >= dim) {
    throw Error(ErrorKind::BinOutOfRange, "post-selection index " + std::to_string(b0) + " out of range");
  }
}

Complex postselection_overlap(const DiscreteState& psi, const BasisPair& pair, std::size_t b0) {
  const Complex overlap = pair.basis_b().col(static_cast<Eigen::Index>(b0)).dot(psi.amplitudes());
  if (!(std::abs(overlap) >= 1e-30)) {
    throw Error(ErrorKind::NullPostSelection, "<b0|Psi> vanishes; weak value undefined");
  }
  return overlap;
}

}  // namespace

Complex discrete_weak_value(const DiscreteState& psi, const BasisPair& pair, std::size_t a,
                            std::size_t b0) {
  check_inputs(psi.dim(), pair, b0);
  if (a >= psi.dim()) throw Error(ErrorKind::BinOutOfRange, "basis index out of range");
  const auto ai = static_cast<Eigen::Index>(a);
  const auto bi = static_cast<Eigen::Index>(b0);
  const Complex b0_a = pair.basis_b().col(bi).dot(pair.basis_a().col(ai));
  const Complex a_psi = pair.basis_a().col(ai).dot(psi.amplitudes());
  return b0_a * a_psi / postselection_overlap(psi, pair, b0);
}

Eigen::VectorXcd discrete_weak_profile(const DiscreteState& psi, const BasisPair& pair,
                                       std::size_t b0) {
  check_inputs(psi.dim(), pair, b0);
  const Complex denom = postselection_overlap(psi, pair, b0);
  const auto bi = static_cast<Eigen::Index>(b0);
  const Eigen::Index n = pair.basis_a().cols();
  Eigen::VectorXcd out(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const Complex b0_a = pair.basis_b().col(bi).dot(pair.basis_a().col(a));
    out(a) = b0_a * pair.basis_a().col(a).dot(psi.amplitudes()) / denom;
  }
  return out;
}

DiscreteState reconstruct_discrete(const Eigen::VectorXcd& weak_values, const BasisPair& pair,
                                   std::size_t b0) {
  check_inputs(static_cast<std::size_t>(weak_values.size()), pair, b0);
  if (weak_values.cwiseAbs().maxCoeff() < 1e-30) {
    throw Error(ErrorKind::DegenerateProfile, "all weak values vanish");
  }
  const auto bi = static_cast<Eigen::Index>(b0);
  const Eigen::Index n = weak_values.size();
  // Coefficients in basis A, then expressed in the reference basis.
  Eigen::VectorXcd coeffs(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const Complex b0_a = pair.basis_b().col(bi).dot(pair.basis_a().col(a));
    if (!(std::abs(b0_a) >= 1e-30)) {
      throw Error(ErrorKind::NullPostSelection, "<b0|a> vanishes; basis pair is not unbiased");
    }
    coeffs(a) = weak_values(a) / b0_a;
  }
  return normalize(DiscreteState(pair.basis_a() * coeffs));
}

}  // namespace directwf
