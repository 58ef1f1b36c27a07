#include "directwf/oracle.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <cmath>
#include <numbers>

#include "directwf/error.hpp"

namespace directwf {
namespace {

// Joint basis ordering: index 2*i + p with p = 0 for |H>, p = 1 for |V>.
constexpr Eigen::Index kH = 0;
constexpr Eigen::Index kV = 1;

double position(Eigen::Index i, Eigen::Index n, double dx) {
  return static_cast<double>(i - n / 2) * dx;
}

}  // namespace

OracleResult oracle_full_simulation(const GridState& state, const CouplingConfig& cfg,
                                    const PostSelection& ps, const OracleOptions& options) {
  const auto& spec = state.spec();
  if (spec.size() > kOracleMaxPoints) {
    throw Error(ErrorKind::GridTooLarge, "oracle limited to " + std::to_string(kOracleMaxPoints) +
                                             " grid points");
  }
  cfg.validate(spec);
  ps.validate();

  const auto n = static_cast<Eigen::Index>(spec.size());
  const double dx = spec.dx();
  const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * dx);
  const double two_pi = 2.0 * std::numbers::pi;

  // Initial product state Psi (x) |V>, as discrete normalized amplitudes.
  Eigen::VectorXcd initial = Eigen::VectorXcd::Zero(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    initial(2 * i + kV) = state[static_cast<std::size_t>(i)] * std::sqrt(dx);
  }

  // Coupling unitary: rotation by phi of the pointer on the slab, identity elsewhere.
  Eigen::MatrixXcd coupling = Eigen::MatrixXcd::Identity(2 * n, 2 * n);
  const double c = std::cos(cfg.phi);
  const double s = std::sin(cfg.phi);
  const auto first = static_cast<Eigen::Index>(cfg.bin_index);
  const auto last = first + static_cast<Eigen::Index>(cfg.span);
  for (Eigen::Index i = first; i < last; ++i) {
    coupling(2 * i + kH, 2 * i + kH) = c;
    coupling(2 * i + kH, 2 * i + kV) = s;
    coupling(2 * i + kV, 2 * i + kH) = -s;
    coupling(2 * i + kV, 2 * i + kV) = c;
  }
  const Eigen::VectorXcd joint = coupling * initial;

  Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
  switch (ps.kind) {
    case PostSelectionKind::Point: {
      // (<k0| (x) 1) with <k0|x_i> = exp(-i k0 x_i) sqrt(dx / 2 pi) in k-density units.
      Eigen::MatrixXcd projector = Eigen::MatrixXcd::Zero(2, 2 * n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const Complex bra = std::polar(std::sqrt(dx / two_pi), -ps.k0 * position(i, n, dx));
        projector(kH, 2 * i + kH) = bra;
        projector(kV, 2 * i + kV) = bra;
      }
      const Eigen::Vector2cd pointer = projector * joint;
      rho = pointer * pointer.adjoint() * dk;
      break;
    }
    case PostSelectionKind::Window: {
      // Dense unitary DFT on the system factor, tensored with the pointer identity.
      Eigen::MatrixXcd dft(n, n);
      for (Eigen::Index m = 0; m < n; ++m) {
        const double k = static_cast<double>(m - n / 2) * dk;
        for (Eigen::Index i = 0; i < n; ++i) {
          dft(m, i) = std::polar(1.0 / std::sqrt(static_cast<double>(n)), -k * position(i, n, dx));
        }
      }
      const Eigen::MatrixXcd full = Eigen::kroneckerProduct(dft, Eigen::Matrix2cd::Identity());
      const Eigen::VectorXcd momentum = full * joint;
      for (Eigen::Index m = 0; m < n; ++m) {
        const double k = static_cast<double>(m - n / 2) * dk;
        if (std::abs(k - ps.k0) > 0.5 * ps.width + 1e-9 * dk) continue;
        const Eigen::Vector2cd pointer(momentum(2 * m + kH), momentum(2 * m + kV));
        rho += pointer * pointer.adjoint();
      }
      break;
    }
    case PostSelectionKind::None: {
      const Eigen::MatrixXcd full_density = joint * joint.adjoint();
      for (Eigen::Index i = 0; i < n; ++i) {
        rho += full_density.block<2, 2>(2 * i, 2 * i);
      }
      break;
    }
  }

  OracleResult result;
  result.pass_probability = rho.trace().real();
  if (!(result.pass_probability >= 1e-30)) return result;
  rho /= rho.trace();

  Eigen::Matrix2cd sigma_x;
  sigma_x << 0.0, 1.0, 1.0, 0.0;
  Eigen::Matrix2cd sigma_y;
  sigma_y << Complex(0.0, 0.0), Complex(0.0, -1.0), Complex(0.0, 1.0), Complex(0.0, 0.0);
  if (options.flip_sigma_y) sigma_y = -sigma_y;
  result.sigma_x = (rho * sigma_x).trace().real();
  result.sigma_y = (rho * sigma_y).trace().real();

  if (!(cfg.phi > 0.0)) return result;
  const Complex readout =
      cfg.visibility * Complex(result.sigma_x, -result.sigma_y) / std::sin(cfg.phi);
  result.weak_value = readout / (2.0 * static_cast<double>(cfg.span) * dx);
  return result;
}

}  // namespace directwf
