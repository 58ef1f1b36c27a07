#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "directwf/grid.hpp"
#include "directwf/pointer.hpp"

namespace directwf {

/// Weak coupling of the slab projector at [bin_index, bin_index + span) to the
/// polarization pointer. span = 1 is the single-bin projector |x><x|.
struct CouplingConfig {
  double phi = 0.0;         // polarization rotation, radians, 0 <= phi <= pi/2
  std::size_t bin_index = 0;
  double visibility = 1.0;  // eta in (0, 1]
  std::size_t span = 1;

  void validate(const GridSpec& spec) const;
};

enum class PostSelectionKind { Point, Window, None };

struct PostSelection {
  PostSelectionKind kind = PostSelectionKind::Point;
  double k0 = 0.0;     // rad/mm
  double width = 0.0;  // rad/mm, window only

  static PostSelection point(double k0) { return {PostSelectionKind::Point, k0, 0.0}; }
  static PostSelection window(double k0, double width) {
    return {PostSelectionKind::Window, k0, width};
  }
  static PostSelection none() { return {PostSelectionKind::None, 0.0, 0.0}; }

  void validate() const;
};

const char* to_string(PostSelectionKind kind);
PostSelectionKind parse_postselection_kind(const std::string& name);

/// System (grid) tensor pointer state: h[i] and v[i] are the |x_i>|H> and
/// |x_i>|V> amplitudes in mm^-1/2.
struct JointState {
  GridSpec spec;
  ComplexVector h;
  ComplexVector v;

  double norm_squared() const noexcept;
};

JointState couple(const GridState& state, const CouplingConfig& cfg);

struct PostSelectedPointer {
  PointerState pointer;
  double pass_probability;
};

// Point post-selection reports the probability of landing in one reciprocal
// grid cell (width dk) around k0, so it coincides with a single-point window.
// Throws NullPostSelection when the pass probability is below 1e-30.
PostSelectedPointer postselect_pointer(const JointState& joint, const PostSelection& ps);

struct ScanSettings {
  double phi = 0.0;
  PostSelection postselection{};
  double visibility = 1.0;
  std::size_t span = 1;
};

/// One weak value per scanned slab. Values are weak values of the position
/// density (mm^-1): the pointer readout divided by 2 * bin_width, so that
/// sum(values) * bin_width -> 1 in the weak limit. Flagged slabs had a null
/// post-selection; their value and expectations are zero.
struct WeakValueProfile {
  GridSpec spec;
  ScanSettings settings;
  double bin_width = 0.0;
  std::vector<std::size_t> first_bin;
  std::vector<double> x;  // slab centres, mm
  ComplexVector values;
  std::vector<double> pass_probability;
  std::vector<double> sigma_x;  // Tr(rho sigma_x) of the post-selected pointer
  std::vector<double> sigma_y;
  std::vector<bool> flagged;

  std::size_t size() const noexcept { return values.size(); }
  std::size_t flagged_count() const noexcept;
  // sum of unflagged values times bin_width
  Complex completeness_sum() const noexcept;
  // Grid on which reconstructions of this profile live (coarse when span > 1).
  GridSpec reconstruction_grid() const;
};

Complex weak_value_from_readout(Complex readout, double bin_width);

WeakValueProfile scan_weak_values(const GridState& state, const ScanSettings& settings);

// Zero-coupling weak value density <k0|x><x|Psi> / <k0|Psi>
//   = exp(-i k0 x) Psi(x) / (sqrt(2 pi) Phi(k0)).
Complex analytic_weak_value(const GridState& state, std::size_t bin, double k0);

// Normalized state built from the profile (flagged slabs set to zero).
GridState reconstruct(const WeakValueProfile& profile);

}  // namespace directwf
