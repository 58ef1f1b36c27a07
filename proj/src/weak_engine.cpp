#include "directwf/weak_engine.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "directwf/error.hpp"

namespace directwf {
namespace {

constexpr double kNullPassThreshold = 1e-30;

// Post-selection prepared once per grid and reused for every slab of a scan.
class PostSelector {
 public:
  PostSelector(const GridSpec& spec, const PostSelection& ps) : spec_(spec), ps_(ps) {
    ps_.validate();
    if (ps_.kind == PostSelectionKind::Point) {
      const double scale = spec.dx() / std::sqrt(2.0 * std::numbers::pi);
      weights_.resize(spec.size());
      for (std::size_t i = 0; i < spec.size(); ++i) {
        weights_[i] = std::polar(scale, -ps_.k0 * spec.x(i));
      }
    } else if (ps_.kind == PostSelectionKind::Window) {
      const double half = 0.5 * ps_.width + 1e-9 * spec.dk();
      for (std::size_t m = 0; m < spec.size(); ++m) {
        if (std::abs(spec.k(m) - ps_.k0) <= half) window_.push_back(m);
      }
    }
  }

  PostSelectedPointer apply(const JointState& joint) const {
    if (!(joint.spec == spec_)) throw Error(ErrorKind::SpecMismatch, "joint state grid differs");
    switch (ps_.kind) {
      case PostSelectionKind::Point: return apply_point(joint);
      case PostSelectionKind::Window: return apply_window(joint);
      case PostSelectionKind::None: return apply_none(joint);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown post-selection kind");
  }

 private:
  PostSelectedPointer apply_point(const JointState& joint) const {
    Complex h{0.0, 0.0};
    Complex v{0.0, 0.0};
    for (std::size_t i = 0; i < spec_.size(); ++i) {
      h += weights_[i] * joint.h[i];
      v += weights_[i] * joint.v[i];
    }
    const double pass = (std::norm(h) + std::norm(v)) * spec_.dk();
    check_pass(pass);
    return {PointerState::pure(h, v), pass};
  }

  PostSelectedPointer apply_window(const JointState& joint) const {
    const auto phi_h = momentum_transform(GridState(spec_, joint.h));
    const auto phi_v = momentum_transform(GridState(spec_, joint.v));
    Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
    for (const std::size_t m : window_) {
      const Eigen::Vector2cd s(phi_h[m], phi_v[m]);
      rho += s * s.adjoint();
    }
    rho *= spec_.dk();
    const double pass = rho.trace().real();
    check_pass(pass);
    return {PointerState::from_density(rho), pass};
  }

  PostSelectedPointer apply_none(const JointState& joint) const {
    double hh = 0.0;
    double vv = 0.0;
    Complex hv{0.0, 0.0};
    for (std::size_t i = 0; i < spec_.size(); ++i) {
      hh += std::norm(joint.h[i]);
      vv += std::norm(joint.v[i]);
      hv += joint.h[i] * std::conj(joint.v[i]);
    }
    Eigen::Matrix2cd rho;
    rho << hh, hv, std::conj(hv), vv;
    rho *= spec_.dx();
    const double pass = rho.trace().real();
    check_pass(pass);
    return {PointerState::from_density(rho), pass};
  }

  static void check_pass(double pass) {
    if (!(pass >= kNullPassThreshold)) {
      throw Error(ErrorKind::NullPostSelection,
                  "post-selection probability vanishes; weak value undefined");
    }
  }

  GridSpec spec_;
  PostSelection ps_;
  ComplexVector weights_;
  std::vector<std::size_t> window_;
};

}  // namespace

void CouplingConfig::validate(const GridSpec& spec) const {
  if (!(phi >= 0.0) || phi > std::numbers::pi / 2) {
    throw Error(ErrorKind::InvalidArgument, "coupling angle phi must lie in [0, pi/2]");
  }
  if (!(visibility > 0.0) || visibility > 1.0) {
    throw Error(ErrorKind::InvalidArgument, "visibility must lie in (0, 1]");
  }
  if (span == 0 || span > spec.size()) {
    throw Error(ErrorKind::InvalidArgument, "slab span must be between 1 and the grid size");
  }
  if (bin_index >= spec.size() || bin_index + span > spec.size()) {
    throw Error(ErrorKind::BinOutOfRange,
                "bin " + std::to_string(bin_index) + " (span " + std::to_string(span) +
                    ") outside grid of " + std::to_string(spec.size()) + " points");
  }
}

void PostSelection::validate() const {
  if (!std::isfinite(k0)) throw Error(ErrorKind::InvalidArgument, "k0 must be finite");
  if (kind == PostSelectionKind::Window && !(width > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "window post-selection needs a positive width");
  }
}

const char* to_string(PostSelectionKind kind) {
  switch (kind) {
    case PostSelectionKind::Point: return "point";
    case PostSelectionKind::Window: return "window";
    case PostSelectionKind::None: return "none";
  }
  return "?";
}

PostSelectionKind parse_postselection_kind(const std::string& name) {
  if (name == "point") return PostSelectionKind::Point;
  if (name == "window") return PostSelectionKind::Window;
  if (name == "none") return PostSelectionKind::None;
  throw Error(ErrorKind::InvalidArgument,
              "post-selection kind must be point, window or none (got '" + name + "')");
}

double JointState::norm_squared() const noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) sum += std::norm(h[i]) + std::norm(v[i]);
  return sum * spec.dx();
}

JointState couple(const GridState& state, const CouplingConfig& cfg) {
  if (state.representation() != Representation::Position) {
    throw Error(ErrorKind::InvalidArgument, "coupling acts on position-space states");
  }
  cfg.validate(state.spec());
  JointState joint{state.spec(), ComplexVector(state.size(), Complex{0.0, 0.0}),
                   ComplexVector(state.amplitudes().begin(), state.amplitudes().end())};
  const double c = std::cos(cfg.phi);
  const double s = std::sin(cfg.phi);
  for (std::size_t i = cfg.bin_index; i < cfg.bin_index + cfg.span; ++i) {
    joint.h[i] = s * state[i];
    joint.v[i] = c * state[i];
  }
  return joint;
}

PostSelectedPointer postselect_pointer(const JointState& joint, const PostSelection& ps) {
  return PostSelector(joint.spec, ps).apply(joint);
}

std::size_t WeakValueProfile::flagged_count() const noexcept {
  std::size_t n = 0;
  for (const bool f : flagged) n += f ? 1 : 0;
  return n;
}

Complex WeakValueProfile::completeness_sum() const noexcept {
  Complex sum{0.0, 0.0};
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!flagged[j]) sum += values[j];
  }
  return sum * bin_width;
}

GridSpec WeakValueProfile::reconstruction_grid() const {
  if (settings.span == 1) return spec;
  return GridSpec(spec.size() / settings.span, spec.x_min(), spec.x_max());
}

Complex weak_value_from_readout(Complex readout, double bin_width) {
  return readout / (2.0 * bin_width);
}

WeakValueProfile scan_weak_values(const GridState& state, const ScanSettings& settings) {
  const auto& spec = state.spec();
  const std::size_t span = settings.span;
  if (span == 0 || !std::has_single_bit(span) || span > spec.size() / 2) {
    throw Error(ErrorKind::InvalidArgument, "scan span must be a power of two below the grid size");
  }
  if (!(settings.phi > 0.0) || settings.phi > std::numbers::pi / 2) {
    throw Error(ErrorKind::InvalidArgument, "scan requires 0 < phi <= pi/2");
  }
  const PostSelector selector(spec, settings.postselection);

  WeakValueProfile profile{spec, settings, span * spec.dx(), {}, {}, {}, {}, {}, {}, {}};
  const std::size_t slabs = spec.size() / span;
  profile.first_bin.resize(slabs);
  profile.x.resize(slabs);
  profile.values.assign(slabs, Complex{0.0, 0.0});
  profile.pass_probability.assign(slabs, 0.0);
  profile.sigma_x.assign(slabs, 0.0);
  profile.sigma_y.assign(slabs, 0.0);
  profile.flagged.assign(slabs, false);

  for (std::size_t j = 0; j < slabs; ++j) {
    const std::size_t first = j * span;
    profile.first_bin[j] = first;
    profile.x[j] = spec.x(first) + 0.5 * static_cast<double>(span - 1) * spec.dx();
    const CouplingConfig cfg{settings.phi, first, settings.visibility, span};
    try {
      const auto result = selector.apply(couple(state, cfg));
      profile.pass_probability[j] = result.pass_probability;
      profile.sigma_x[j] = result.pointer.expectation_x();
      profile.sigma_y[j] = result.pointer.expectation_y();
      profile.values[j] = weak_value_from_readout(
          pointer_readout(result.pointer, settings.phi, settings.visibility), profile.bin_width);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NullPostSelection) throw;
      profile.flagged[j] = true;
    }
  }
  return profile;
}

Complex analytic_weak_value(const GridState& state, std::size_t bin, double k0) {
  if (bin >= state.size()) throw Error(ErrorKind::BinOutOfRange, "bin outside grid");
  const Complex phi_k0 = momentum_amplitude_at(state, k0);
  if (!(std::abs(phi_k0) >= 1e-30)) {
    throw Error(ErrorKind::NullPostSelection, "Phi(k0) vanishes; weak value undefined");
  }
  const double x = state.spec().x(bin);
  return std::polar(1.0, -k0 * x) * state[bin] / (std::sqrt(2.0 * std::numbers::pi) * phi_k0);
}

GridState reconstruct(const WeakValueProfile& profile) {
  const GridSpec grid = profile.reconstruction_grid();
  ComplexVector amps(profile.size(), Complex{0.0, 0.0});
  for (std::size_t j = 0; j < profile.size(); ++j) {
    if (!profile.flagged[j]) amps[j] = profile.values[j];
  }
  return normalize(GridState(grid, std::move(amps)));
}

}  // namespace directwf
