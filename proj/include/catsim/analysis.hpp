#pragma once

#include <array>
#include <vector>

#include "catsim/fock.hpp"
#include "catsim/spin_boson.hpp"

namespace catsim {

/// |<a|b>|^2
double fidelity(const StateVector& a, const StateVector& b);

cplx expectation(const StateVector& psi, const OperatorMatrix& op);

/// -sum p ln p over the given probabilities, with 0 ln 0 = 0.
double von_neumann_entropy(const Eigen::VectorXd& eigenvalues);

struct QubitReducedState {
  Eigen::Matrix2cd rho;
  /// Ascending.
  std::array<double, 2> eigenvalues;
  /// Natural-log units; ln 2 is maximal.
  double entropy;
};

/// Partial trace over the oscillator of a qubit (x) oscillator state.
QubitReducedState qubit_reduced(const StateVector& state);

/// Entropy of the first mode of a two-mode pure state stored as index = i1 * n2 + i2.
double mode_entropy(const CVector& two_mode, int n1, int n2);

struct DetectionCoefficients {
  cplx c_up;
  cplx c_down;
  double eps_bar;
};

/// Closed-form amplitudes after the detection drive on the off-resonant branch:
/// c_up = -i sin(pi e/2 eps_d)(eps_d/e), c_down = cos(pi e/2 eps_d) - i sin(pi e/2 eps_d)(shift/e),
/// with e = sqrt(eps_d^2 + shift^2) and shift = 8 n alpha0 lambda0.
DetectionCoefficients detection_coefficients(double eps_d, double shift);

/// Analytic sigma_x outcome probabilities p_minus = (1 + |c_down|^2)/2, p_plus = |c_up|^2/2.
std::pair<double, double> analytic_detection_probabilities(const DetectionCoefficients& c);

/// Normalized harmonic-oscillator eigenfunctions psi_0..psi_{count-1} at xi, by the
/// normalized three-term recurrence.
std::vector<double> hermite_functions(int count, double xi);

struct PositionDensity {
  std::vector<double> up;
  std::vector<double> down;
};

/// Position densities of each qubit branch. Positions are in units of delta_x0 with
/// x = a + a^dagger, so a coherent state |alpha> is centred at 2 Re(alpha) with unit variance.
/// Each branch integrates to its qubit probability.
PositionDensity position_density(const StateVector& state, const std::vector<double>& grid);

/// (2 n alpha0)^2 k_B T / Q, in units of omega0.
double decoherence_estimate(int n, const SystemParams& params);

// Unit conversions used by the CLI and the reported-value checks.
namespace units {

/// k_B / h in MHz per millikelvin.
inline constexpr double kBoltzmannMHzPerMilliKelvin = 20.836619123;

/// k_B T / h in MHz.
inline double kbt_mhz(double temperature_mk) { return kBoltzmannMHzPerMilliKelvin * temperature_mk; }

}  // namespace units

}  // namespace catsim
