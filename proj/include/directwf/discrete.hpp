#pragma once

#include <Eigen/Dense>
#include <cstddef>

namespace directwf {

/// State vector of an N-level system in a fixed reference basis.
class DiscreteState {
 public:
  explicit DiscreteState(Eigen::VectorXcd amplitudes);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }
  const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }
  double norm_squared() const noexcept { return amplitudes_.squaredNorm(); }

 private:
  Eigen::VectorXcd amplitudes_;
};

DiscreteState normalize(const DiscreteState& state);
double fidelity(const DiscreteState& a, const DiscreteState& b);

/// Two orthonormal bases of the same space, stored column-wise: column a of
/// basis_a() is |a>, column b of basis_b() is |b>.
class BasisPair {
 public:
  BasisPair(Eigen::MatrixXcd basis_a, Eigen::MatrixXcd basis_b);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(basis_a_.cols()); }
  const Eigen::MatrixXcd& basis_a() const noexcept { return basis_a_; }
  const Eigen::MatrixXcd& basis_b() const noexcept { return basis_b_; }

  // Largest deviation of A^dagger A and B^dagger B from identity.
  double orthonormality_error() const;
  // max over (a, b) of | |<a|b>|^2 - 1/N |.
  double unbiasedness_error() const;

 private:
  Eigen::MatrixXcd basis_a_;
  Eigen::MatrixXcd basis_b_;
};

// Computational basis paired with the discrete Fourier basis
// b_j(a) = exp(2 pi i j a / N) / sqrt(N).
BasisPair fourier_mub(std::size_t dim);

}  // namespace directwf
