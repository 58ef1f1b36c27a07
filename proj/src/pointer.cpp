#include "directwf/pointer.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "directwf/error.hpp"

namespace directwf {

PointerState PointerState::pure(Complex h, Complex v) {
  const double norm2 = std::norm(h) + std::norm(v);
  if (!(norm2 > 0.0)) throw Error(ErrorKind::ZeroNorm, "pointer state has zero norm");
  Eigen::Vector2cd s(h, v);
  Eigen::Matrix2cd rho = s * s.adjoint() / norm2;
  // Exact Hermiticity regardless of rounding in the outer product.
  rho(1, 0) = std::conj(rho(0, 1));
  rho(0, 0) = rho(0, 0).real();
  rho(1, 1) = rho(1, 1).real();
  return PointerState(rho);
}

PointerState PointerState::from_density(const Eigen::Matrix2cd& rho) {
  const Complex trace = rho.trace();
  if (!(trace.real() > 0.0)) throw Error(ErrorKind::ZeroNorm, "pointer density has zero trace");
  const double herm_err = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm_err > 1e-12 * trace.real()) {
    throw Error(ErrorKind::InvalidArgument, "pointer density is not Hermitian");
  }
  Eigen::Matrix2cd normalized = rho / trace.real();
  normalized(1, 0) = std::conj(normalized(0, 1));
  normalized(0, 0) = normalized(0, 0).real();
  normalized(1, 1) = normalized(1, 1).real();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> eig(normalized, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12) {
    throw Error(ErrorKind::InvalidArgument, "pointer density is not positive semidefinite");
  }
  return PointerState(normalized);
}

double PointerState::expectation_x() const noexcept { return 2.0 * rho_(0, 1).real(); }

double PointerState::expectation_y() const noexcept {
  // Tr(rho sigma_y) = i (rho_HV - rho_VH) = -2 Im rho_HV
  return -2.0 * rho_(0, 1).imag();
}

double PointerState::purity() const noexcept { return (rho_ * rho_).trace().real(); }

Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

Eigen::Matrix2cd pauli_y() {
  Eigen::Matrix2cd m;
  m << Complex(0.0, 0.0), Complex(0.0, -1.0), Complex(0.0, 1.0), Complex(0.0, 0.0);
  return m;
}

Complex readout_from_expectations(double sigma_x, double sigma_y, double phi, double visibility) {
  if (!(phi > 0.0) || phi > std::numbers::pi / 2) {
    throw Error(ErrorKind::InvalidArgument, "readout requires 0 < phi <= pi/2");
  }
  if (!(visibility > 0.0) || visibility > 1.0) {
    throw Error(ErrorKind::InvalidArgument, "visibility must lie in (0, 1]");
  }
  return Complex(visibility * sigma_x, -visibility * sigma_y) / std::sin(phi);
}

Complex pointer_readout(const PointerState& pointer, double phi, double visibility) {
  return readout_from_expectations(pointer.expectation_x(), pointer.expectation_y(), phi,
                                   visibility);
}

}  // namespace directwf
