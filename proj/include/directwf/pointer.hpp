#pragma once

#include <Eigen/Dense>

#include "directwf/grid.hpp"

namespace directwf {

// Polarization pointer in the ordered basis (|H>, |V>).
//   sigma_x = [[0, 1], [1, 0]],  sigma_y = [[0, -i], [i, 0]].
// The sliver rotates |V> -> cos(phi)|V> + sin(phi)|H>.
class PointerState {
 public:
  // Normalizes the pure state (h, v).
  static PointerState pure(Complex h, Complex v);
  // Normalizes rho to unit trace; validates Hermiticity and positivity.
  static PointerState from_density(const Eigen::Matrix2cd& rho);
  static PointerState vertical() { return pure({0.0, 0.0}, {1.0, 0.0}); }

  const Eigen::Matrix2cd& density() const noexcept { return rho_; }
  double expectation_x() const noexcept;
  double expectation_y() const noexcept;
  double purity() const noexcept;

 private:
  explicit PointerState(const Eigen::Matrix2cd& rho) : rho_(rho) {}
  Eigen::Matrix2cd rho_;
};

Eigen::Matrix2cd pauli_x();
Eigen::Matrix2cd pauli_y();

// Pointer readout (requires 0 < phi <= pi/2): visibility * (<sigma_x> - i <sigma_y>) / sin(phi).
// For a weak rotation this approaches twice the weak value of the measured
// projector (the polarization angle phi rotates the Bloch vector by 2 phi).
Complex pointer_readout(const PointerState& pointer, double phi, double visibility = 1.0);

// Same readout from already-estimated Pauli expectations.
Complex readout_from_expectations(double sigma_x, double sigma_y, double phi, double visibility);

}  // namespace directwf
