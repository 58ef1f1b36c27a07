#include "directwf/discrete.hpp"

#include <cmath>
#include <numbers>

#include "directwf/error.hpp"

namespace directwf {

DiscreteState::DiscreteState(Eigen::VectorXcd amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() < 1) {
    throw Error(ErrorKind::InvalidArgument, "discrete state needs dimension >= 1");
  }
}

DiscreteState normalize(const DiscreteState& state) {
  const double norm2 = state.norm_squared();
  if (!(norm2 >= 1e-30)) {
    throw Error(ErrorKind::ZeroNorm, "cannot normalize a state with vanishing norm");
  }
  return DiscreteState(state.amplitudes() / std::sqrt(norm2));
}

double fidelity(const DiscreteState& a, const DiscreteState& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::SpecMismatch, "states have different dimensions");
  }
  return std::min(std::norm(a.amplitudes().dot(b.amplitudes())), 1.0);
}

BasisPair::BasisPair(Eigen::MatrixXcd basis_a, Eigen::MatrixXcd basis_b)
    : basis_a_(std::move(basis_a)), basis_b_(std::move(basis_b)) {
  if (basis_a_.rows() != basis_a_.cols() || basis_b_.rows() != basis_b_.cols() ||
      basis_a_.rows() != basis_b_.rows() || basis_a_.rows() < 2) {
    throw Error(ErrorKind::InvalidArgument, "bases must be square matrices of equal dimension >= 2");
  }
}

double BasisPair::orthonormality_error() const {
  const auto n = basis_a_.cols();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const double ea = (basis_a_.adjoint() * basis_a_ - id).cwiseAbs().maxCoeff();
  const double eb = (basis_b_.adjoint() * basis_b_ - id).cwiseAbs().maxCoeff();
  return std::max(ea, eb);
}

double BasisPair::unbiasedness_error() const {
  const Eigen::MatrixXcd overlaps = basis_a_.adjoint() * basis_b_;
  const double target = 1.0 / static_cast<double>(basis_a_.cols());
  return (overlaps.cwiseAbs2().array() - target).abs().maxCoeff();
}

BasisPair fourier_mub(std::size_t dim) {
  if (dim < 2) throw Error(ErrorKind::InvalidArgument, "MUB construction needs N >= 2");
  const auto n = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXcd fourier(n, n);
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index a = 0; a < n; ++a) {
      // Reduce j*a mod N first so the phase stays exact for large products.
      const auto ja = (j * a) % n;
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(ja) / static_cast<double>(n);
      fourier(a, j) = std::polar(inv_sqrt, angle);
    }
  }
  return BasisPair(Eigen::MatrixXcd::Identity(n, n), std::move(fourier));
}

}  // namespace directwf
