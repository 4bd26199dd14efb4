#include "catsim/analysis.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace catsim {

double fidelity(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw DimensionError("fidelity: dimension mismatch");
  return std::min(1.0, std::norm(a.inner(b)));
}

cplx expectation(const StateVector& psi, const OperatorMatrix& op) {
  if (psi.dim() != op.dim()) throw DimensionError("expectation: dimension mismatch");
  return psi.amplitudes().dot(op.entries() * psi.amplitudes());
}

double von_neumann_entropy(const Eigen::VectorXd& eigenvalues) {
  double s = 0.0;
  for (double p : eigenvalues)
    if (p > 0.0) s -= p * std::log(p);
  return s;
}

QubitReducedState qubit_reduced(const StateVector& state) {
  if (state.dim() < 4 || state.dim() % 2 != 0) throw DimensionError("qubit_reduced: not a qubit (x) oscillator state");
  const Eigen::Index n = state.dim() / 2;
  const auto up = state.amplitudes().head(n);
  const auto down = state.amplitudes().tail(n);
  Eigen::Matrix2cd rho;
  rho(0, 0) = up.squaredNorm();
  rho(1, 1) = down.squaredNorm();
  rho(0, 1) = down.dot(up);  // sum_k up_k conj(down_k)
  rho(1, 0) = std::conj(rho(0, 1));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(rho, Eigen::EigenvaluesOnly);
  Eigen::VectorXd w = es.eigenvalues();
  return {rho, {w(0), w(1)}, von_neumann_entropy(w)};
}

double mode_entropy(const CVector& two_mode, int n1, int n2) {
  if (two_mode.size() != static_cast<Eigen::Index>(n1) * n2) throw DimensionError("mode_entropy: dimension mismatch");
  // Row-major reshape: psi(i1, i2) = two_mode[i1 * n2 + i2]; Schmidt weights are squared singular values.
  Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> psi(two_mode.data(), n1, n2);
  const CMatrix dense = psi;
  Eigen::JacobiSVD<CMatrix> svd(dense);
  Eigen::VectorXd w = svd.singularValues().array().square();
  w /= w.sum();
  return von_neumann_entropy(w);
}

DetectionCoefficients detection_coefficients(double eps_d, double shift) {
  if (!(eps_d > 0.0)) throw ValidationError("eps_d", "must be > 0");
  const double eps_bar = std::hypot(eps_d, shift);
  const double phase = std::numbers::pi * eps_bar / (2.0 * eps_d);
  const double s = std::sin(phase);
  const cplx c_up(0.0, -s * eps_d / eps_bar);
  const cplx c_down(std::cos(phase), -s * shift / eps_bar);
  return {c_up, c_down, eps_bar};
}

std::pair<double, double> analytic_detection_probabilities(const DetectionCoefficients& c) {
  const double p_plus = 0.5 * std::norm(c.c_up);
  const double p_minus = 0.5 * (1.0 + std::norm(c.c_down));
  return {p_plus, p_minus};
}

std::vector<double> hermite_functions(int count, double xi) {
  std::vector<double> psi(static_cast<std::size_t>(std::max(count, 0)));
  if (count <= 0) return psi;
  psi[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * xi * xi);
  if (count > 1) psi[1] = std::numbers::sqrt2 * xi * psi[0];
  for (int k = 2; k < count; ++k) {
    const double kd = static_cast<double>(k);
    psi[k] = std::sqrt(2.0 / kd) * xi * psi[k - 1] - std::sqrt((kd - 1.0) / kd) * psi[k - 2];
  }
  return psi;
}

PositionDensity position_density(const StateVector& state, const std::vector<double>& grid) {
  if (state.dim() < 4 || state.dim() % 2 != 0) throw DimensionError("position_density: not a qubit (x) oscillator state");
  const int n = state.dim() / 2;
  const FockSpace space(n);
  // Weight in the guard band signals a state the truncation cannot represent.
  double tail = 0.0;
  for (int k = space.interior(); k < n; ++k) tail += std::norm(state[k]) + std::norm(state[n + k]);
  if (tail > 1e-10) throw TruncationError("position_density: " + std::to_string(tail) + " of the norm lies in the truncation guard band");

  PositionDensity out;
  out.up.reserve(grid.size());
  out.down.reserve(grid.size());
  // x = a + a^dag = sqrt(2) xi, so rho_x(x) = |phi(x / sqrt 2)|^2 / sqrt 2.
  for (double x : grid) {
    if (!std::isfinite(x)) throw ValidationError("grid", "positions must be finite");
    const auto h = hermite_functions(n, x / std::numbers::sqrt2);
    cplx up = 0.0, down = 0.0;
    for (int k = 0; k < n; ++k) {
      up += state[k] * h[k];
      down += state[n + k] * h[k];
    }
    out.up.push_back(std::norm(up) / std::numbers::sqrt2);
    out.down.push_back(std::norm(down) / std::numbers::sqrt2);
  }
  return out;
}

double decoherence_estimate(int n, const SystemParams& params) {
  params.validate();
  const double amplitude = 2.0 * n * params.alpha0();
  return amplitude * amplitude * params.temperature / params.q_factor;
}

}  // namespace catsim
