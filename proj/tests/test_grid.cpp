#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "directwf/error.hpp"
#include "directwf/grid.hpp"
#include "directwf/state_io.hpp"
#include "test_support.hpp"

using namespace directwf;
using directwf::testing::gaussian_state;
using directwf::testing::random_grid_state;

namespace {

double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace

TEST(GridSpec, CentredAxes) {
  GridSpec spec(256, -16.0, 16.0);
  EXPECT_DOUBLE_EQ(spec.dx(), 0.125);
  EXPECT_DOUBLE_EQ(spec.x(spec.center_index()), 0.0);
  EXPECT_DOUBLE_EQ(spec.k(spec.center_index()), 0.0);
  EXPECT_NEAR(spec.dk(), 2.0 * std::numbers::pi / (256 * 0.125), 1e-15);
  EXPECT_EQ(spec.nearest_index(0.06), spec.center_index());
  EXPECT_EQ(spec.nearest_index(-100.0), 0u);
  EXPECT_EQ(spec.nearest_index(100.0), 255u);
}

TEST(GridSpec, RejectsBadSizes) {
  EXPECT_THROW(GridSpec(100, -1.0, 1.0), Error);
  EXPECT_THROW(GridSpec(1, -1.0, 1.0), Error);
  EXPECT_THROW(GridSpec(64, 1.0, -1.0), Error);
}

TEST(MomentumTransform, ParsevalAndRoundTripOnRandomStates) {
  std::mt19937_64 rng(7);
  for (std::size_t n : {2u, 8u, 64u, 1024u}) {
    GridSpec spec(n, -5.0, 5.0);
    for (int trial = 0; trial < 10; ++trial) {
      auto psi = random_grid_state(spec, rng);
      auto phi = momentum_transform(psi);
      EXPECT_EQ(phi.representation(), Representation::Momentum);
      EXPECT_NEAR(phi.norm_squared(), 1.0, 1e-12);
      auto back = inverse_momentum_transform(phi);
      EXPECT_LT(max_abs_diff(back.amplitudes(), psi.amplitudes()), 1e-12);
    }
  }
}

TEST(MomentumTransform, GaussianMapsToRealGaussianOfInverseWidth) {
  GridSpec spec(1024, -20.0, 20.0);
  const double sigma = 1.5;
  auto phi = momentum_transform(gaussian_state(spec, sigma));
  const double peak = std::pow(sigma * sigma / std::numbers::pi, 0.25);
  for (std::size_t m = 0; m < spec.size(); ++m) {
    const double k = spec.k(m);
    const double expected = peak * std::exp(-0.5 * k * k * sigma * sigma);
    EXPECT_NEAR(phi[m].real(), expected, 1e-10) << "k=" << k;
    EXPECT_NEAR(phi[m].imag(), 0.0, 1e-10) << "k=" << k;
  }
}

TEST(MomentumTransform, ShiftTheoremMovesPeakToNearestGridMultiple) {
  GridSpec spec(512, -25.0, 25.0);
  for (double m : {0.0, 0.37, -1.1, 2.5}) {
    auto phi = momentum_transform(gaussian_state(spec, 3.0, 0.0, m));
    std::size_t peak = 0;
    for (std::size_t j = 0; j < spec.size(); ++j)
      if (std::abs(phi[j]) > std::abs(phi[peak])) peak = j;
    const auto shift = static_cast<long>(std::lround(m / spec.dk()));
    EXPECT_EQ(static_cast<long>(peak) - static_cast<long>(spec.center_index()), shift) << m;
  }
}

TEST(MomentumTransform, AgreesWithDirectSummation) {
  std::mt19937_64 rng(3);
  GridSpec spec(128, -4.0, 4.0);
  auto psi = random_grid_state(spec, rng);
  auto phi = momentum_transform(psi);
  for (std::size_t m = 0; m < spec.size(); ++m) {
    Complex direct{0.0, 0.0};
    for (std::size_t i = 0; i < spec.size(); ++i)
      direct += psi[i] * std::polar(1.0, -spec.k(m) * spec.x(i));
    direct *= spec.dx() / std::sqrt(2.0 * std::numbers::pi);
    EXPECT_LT(std::abs(phi[m] - direct), 1e-12);
    EXPECT_LT(std::abs(momentum_amplitude_at(psi, spec.k(m)) - direct), 1e-12);
  }
}

TEST(MomentumTransform, ZeroMomentumOfTruncatedGaussianIsPlainSum) {
  GridSpec spec(2048, -32.0, 32.0);
  ComplexVector amps(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double x = spec.x(i);
    amps[i] = std::abs(x) <= 21.5 ? std::exp(-x * x / (28.2 * 28.2)) : 0.0;
  }
  auto psi = normalize(GridState(spec, amps));
  Complex sum{0.0, 0.0};
  for (std::size_t i = 0; i < spec.size(); ++i) sum += psi[i];
  sum *= spec.dx() / std::sqrt(2.0 * std::numbers::pi);
  EXPECT_LT(std::abs(momentum_transform(psi)[spec.center_index()] - sum), 1e-10);
}

TEST(Normalize, ScaleInvariantIdempotentAndUnitNorm) {
  std::mt19937_64 rng(11);
  GridSpec spec(64, -2.0, 2.0);
  auto psi = random_grid_state(spec, rng);
  ComplexVector doubled(psi.amplitudes().begin(), psi.amplitudes().end());
  for (auto& a : doubled) a *= 2.0;
  auto renorm = normalize(GridState(spec, doubled));
  EXPECT_LT(max_abs_diff(renorm.amplitudes(), psi.amplitudes()), 1e-12);
  EXPECT_LT(max_abs_diff(normalize(psi).amplitudes(), psi.amplitudes()), 1e-12);

  ComplexVector raw(spec.size(), Complex{0.3, -0.2});
  auto unit = normalize(GridState(spec, raw));
  double sum = 0.0;
  for (auto a : unit.amplitudes()) sum += std::norm(a) * spec.dx();
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Normalize, ZeroStateThrows) {
  GridSpec spec(8, -1.0, 1.0);
  try {
    normalize(GridState(spec, ComplexVector(8)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroNorm);
  }
}

TEST(Fidelity, SelfPhaseAndOrthogonal) {
  std::mt19937_64 rng(5);
  GridSpec spec(64, -3.0, 3.0);
  auto psi = random_grid_state(spec, rng);
  ComplexVector rotated(psi.amplitudes().begin(), psi.amplitudes().end());
  for (auto& a : rotated) a *= std::polar(1.0, 0.7);
  EXPECT_NEAR(fidelity(psi, psi), 1.0, 1e-12);
  EXPECT_NEAR(fidelity(psi, GridState(spec, rotated)), 1.0, 1e-12);

  ComplexVector a(spec.size()), b(spec.size());
  a[3] = 1.0;
  b[40] = 1.0;
  EXPECT_NEAR(fidelity(normalize(GridState(spec, a)), normalize(GridState(spec, b))), 0.0, 1e-12);
  EXPECT_THROW(fidelity(psi, random_grid_state(GridSpec(32, -3.0, 3.0), rng)), Error);
}

TEST(CoarseGrain, AveragesBlocks) {
  GridSpec spec(8, -4.0, 4.0);
  ComplexVector amps{1, 3, 2, 2, 0, 4, 5, 7};
  auto coarse = coarse_grain(GridState(spec, amps), 2);
  EXPECT_EQ(coarse.size(), 4u);
  EXPECT_DOUBLE_EQ(coarse[0].real(), 2.0);
  EXPECT_DOUBLE_EQ(coarse[3].real(), 6.0);
  EXPECT_DOUBLE_EQ(coarse.spec().dx(), 2.0);
}

TEST(StateIo, GridStateCsvRoundTripIsExact) {
  std::mt19937_64 rng(9);
  GridSpec spec(128, -6.0, 6.0);
  auto psi = random_grid_state(spec, rng);
  std::stringstream buffer;
  save_grid_state(buffer, psi, {{"seed", "9"}});
  const auto text = buffer.str();
  EXPECT_EQ(text.rfind("# seed = 9\nx_mm,re,im\n", 0), 0u);
  auto loaded = load_grid_state(buffer);
  EXPECT_EQ(loaded.spec(), spec);
  EXPECT_EQ(max_abs_diff(loaded.amplitudes(), psi.amplitudes()), 0.0);
}

TEST(StateIo, RejectsNonUniformGrid) {
  std::stringstream bad("x_mm,re,im\n-1,1,0\n-0.4,1,0\n0,1,0\n0.5,1,0\n");
  EXPECT_THROW(load_grid_state(bad), Error);
}

TEST(StateIo, DiscreteStateRoundTrip) {
  std::mt19937_64 rng(2);
  auto psi = directwf::testing::random_discrete_state(5, rng);
  std::stringstream buffer;
  save_discrete_state(buffer, psi);
  auto loaded = load_discrete_state(buffer);
  EXPECT_EQ((loaded.amplitudes() - psi.amplitudes()).norm(), 0.0);
}
