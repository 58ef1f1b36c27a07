#include "directwf/grid.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>

#include "directwf/error.hpp"

namespace directwf {
namespace {

constexpr double kZeroNormThreshold = 1e-30;

// FFTW's planner is not re-entrant; execution of a finished plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void fft_in_place(ComplexVector& data, int sign) {
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(data.size()), buf, buf, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
}

double alternating(std::size_t i) { return (i % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

GridSpec::GridSpec(std::size_t n_points, double x_min, double x_max)
    : n_(n_points), x_min_(x_min), x_max_(x_max), dx_(0.0) {
  if (n_points < 2 || !std::has_single_bit(n_points)) {
    throw Error(ErrorKind::InvalidArgument, "n_points must be a power of two >= 2");
  }
  if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
    throw Error(ErrorKind::InvalidArgument, "x_max must exceed x_min");
  }
  if (std::abs(x_min + x_max) > 1e-12 * (x_max - x_min)) {
    throw Error(ErrorKind::InvalidArgument,
                "grid must be centred (x_min = -x_max) so that x = 0 is a grid point");
  }
  dx_ = (x_max - x_min) / static_cast<double>(n_points);
}

double GridSpec::dk() const noexcept {
  return 2.0 * std::numbers::pi / (static_cast<double>(n_) * dx_);
}

double GridSpec::x(std::size_t i) const noexcept {
  return (static_cast<double>(i) - static_cast<double>(n_ / 2)) * dx_;
}

double GridSpec::k(std::size_t m) const noexcept {
  return (static_cast<double>(m) - static_cast<double>(n_ / 2)) * dk();
}

std::vector<double> GridSpec::positions() const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = x(i);
  return out;
}

std::vector<double> GridSpec::wavenumbers() const {
  std::vector<double> out(n_);
  for (std::size_t m = 0; m < n_; ++m) out[m] = k(m);
  return out;
}

std::size_t GridSpec::nearest_index(double x_mm) const noexcept {
  const double idx = std::round(x_mm / dx_) + static_cast<double>(n_ / 2);
  if (idx <= 0.0) return 0;
  if (idx >= static_cast<double>(n_ - 1)) return n_ - 1;
  return static_cast<std::size_t>(idx);
}

GridState::GridState(GridSpec spec, ComplexVector amplitudes, Representation rep)
    : spec_(spec), amplitudes_(std::move(amplitudes)), rep_(rep) {
  if (amplitudes_.size() != spec_.size()) {
    throw Error(ErrorKind::SpecMismatch, "amplitude count does not match grid size");
  }
}

double GridState::measure() const noexcept {
  return rep_ == Representation::Position ? spec_.dx() : spec_.dk();
}

double GridState::coordinate(std::size_t i) const noexcept {
  return rep_ == Representation::Position ? spec_.x(i) : spec_.k(i);
}

double GridState::norm_squared() const noexcept {
  double sum = 0.0;
  for (const auto& a : amplitudes_) sum += std::norm(a);
  return sum * measure();
}

GridState momentum_transform(const GridState& position_state) {
  if (position_state.representation() != Representation::Position) {
    throw Error(ErrorKind::InvalidArgument, "momentum_transform expects a position-space state");
  }
  const auto& spec = position_state.spec();
  const std::size_t n = spec.size();
  ComplexVector data(position_state.amplitudes().begin(), position_state.amplitudes().end());
  for (std::size_t i = 0; i < n; ++i) data[i] *= alternating(i);
  fft_in_place(data, FFTW_FORWARD);
  const double scale = spec.dx() / std::sqrt(2.0 * std::numbers::pi);
  for (std::size_t m = 0; m < n; ++m) data[m] *= scale * alternating(m + n / 2);
  return GridState(spec, std::move(data), Representation::Momentum);
}

GridState inverse_momentum_transform(const GridState& momentum_state) {
  if (momentum_state.representation() != Representation::Momentum) {
    throw Error(ErrorKind::InvalidArgument,
                "inverse_momentum_transform expects a momentum-space state");
  }
  const auto& spec = momentum_state.spec();
  const std::size_t n = spec.size();
  ComplexVector data(momentum_state.amplitudes().begin(), momentum_state.amplitudes().end());
  for (std::size_t m = 0; m < n; ++m) data[m] *= alternating(m);
  fft_in_place(data, FFTW_BACKWARD);
  const double scale = spec.dk() / std::sqrt(2.0 * std::numbers::pi);
  for (std::size_t i = 0; i < n; ++i) data[i] *= scale * alternating(i + n / 2);
  return GridState(spec, std::move(data), Representation::Position);
}

Complex momentum_amplitude_at(const GridState& position_state, double k) {
  if (position_state.representation() != Representation::Position) {
    throw Error(ErrorKind::InvalidArgument, "momentum_amplitude_at expects a position-space state");
  }
  const auto& spec = position_state.spec();
  Complex sum{0.0, 0.0};
  for (std::size_t i = 0; i < spec.size(); ++i) {
    sum += position_state[i] * std::polar(1.0, -k * spec.x(i));
  }
  return sum * (spec.dx() / std::sqrt(2.0 * std::numbers::pi));
}

GridState normalize(const GridState& state) {
  const double norm2 = state.norm_squared();
  if (!(norm2 >= kZeroNormThreshold)) {
    throw Error(ErrorKind::ZeroNorm, "cannot normalize a state with vanishing norm");
  }
  const double scale = 1.0 / std::sqrt(norm2);
  ComplexVector out(state.amplitudes().begin(), state.amplitudes().end());
  for (auto& a : out) a *= scale;
  return GridState(state.spec(), std::move(out), state.representation());
}

Complex inner_product(const GridState& a, const GridState& b) {
  if (!(a.spec() == b.spec()) || a.representation() != b.representation()) {
    throw Error(ErrorKind::SpecMismatch, "states live on different grids");
  }
  Complex sum{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::conj(a[i]) * b[i];
  return sum * a.measure();
}

double fidelity(const GridState& a, const GridState& b) {
  const double f = std::norm(inner_product(a, b));
  return std::min(f, 1.0);
}

GridState coarse_grain(const GridState& state, std::size_t block) {
  const auto& spec = state.spec();
  if (block == 0 || !std::has_single_bit(block) || block > spec.size() / 2) {
    throw Error(ErrorKind::InvalidArgument, "block must be a power of two below the grid size");
  }
  if (block == 1) return state;
  GridSpec coarse(spec.size() / block, spec.x_min(), spec.x_max());
  ComplexVector out(coarse.size());
  for (std::size_t b = 0; b < coarse.size(); ++b) {
    Complex sum{0.0, 0.0};
    for (std::size_t j = 0; j < block; ++j) sum += state[b * block + j];
    out[b] = sum / static_cast<double>(block);
  }
  return GridState(coarse, std::move(out), state.representation());
}

}  // namespace directwf
