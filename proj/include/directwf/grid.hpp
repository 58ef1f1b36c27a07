#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace directwf {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Uniform, centred 1D position grid. Positions are in mm, wavenumbers in
/// rad/mm. Index n/2 is exactly x = 0 and, on the reciprocal grid, k = 0.
class GridSpec {
 public:
  GridSpec(std::size_t n_points, double x_min, double x_max);

  std::size_t size() const noexcept { return n_; }
  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  double dx() const noexcept { return dx_; }
  double dk() const noexcept;
  std::size_t center_index() const noexcept { return n_ / 2; }

  double x(std::size_t i) const noexcept;
  double k(std::size_t m) const noexcept;
  std::vector<double> positions() const;
  std::vector<double> wavenumbers() const;

  // Index of the grid point nearest to x, clamped to the grid.
  std::size_t nearest_index(double x_mm) const noexcept;

  bool operator==(const GridSpec&) const = default;

 private:
  std::size_t n_;
  double x_min_;
  double x_max_;
  double dx_;
};

enum class Representation { Position, Momentum };

/// Wavefunction sampled on a GridSpec. In the position representation the
/// amplitudes are Psi(x_i) in mm^-1/2 with measure dx; in the momentum
/// representation they are Phi(k_m) in mm^1/2 with measure dk.
class GridState {
 public:
  GridState(GridSpec spec, ComplexVector amplitudes,
            Representation rep = Representation::Position);

  const GridSpec& spec() const noexcept { return spec_; }
  Representation representation() const noexcept { return rep_; }
  std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
  std::size_t size() const noexcept { return amplitudes_.size(); }
  const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }

  double measure() const noexcept;
  double coordinate(std::size_t i) const noexcept;
  double norm_squared() const noexcept;

 private:
  GridSpec spec_;
  ComplexVector amplitudes_;
  Representation rep_;
};

// Convention: <x|k> = exp(+i k x) / sqrt(2 pi), so
//   Phi(k) = sum_i Psi(x_i) exp(-i k x_i) dx / sqrt(2 pi).
GridState momentum_transform(const GridState& position_state);
GridState inverse_momentum_transform(const GridState& momentum_state);

// <k|Psi> at an arbitrary (not necessarily grid) wavenumber, by direct summation.
Complex momentum_amplitude_at(const GridState& position_state, double k);

GridState normalize(const GridState& state);

// <a|b> with the representation's grid measure.
Complex inner_product(const GridState& a, const GridState& b);
double fidelity(const GridState& a, const GridState& b);

// Block-averages amplitudes over `block` consecutive points, producing a state
// on the coarser grid with the same extent. block must be a power of two that
// divides the grid size.
GridState coarse_grain(const GridState& state, std::size_t block);

}  // namespace directwf
