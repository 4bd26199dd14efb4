#pragma once

#include <optional>
#include <utility>

#include "catsim/analysis.hpp"
#include "catsim/evolve.hpp"

namespace catsim {

struct AmplifyResult {
  StateVector final_state;
  int n_pulses = 0;
  /// <a> conditioned on the qubit being |up> and |down>; NaN for an empty branch.
  std::pair<cplx, cplx> conditional_amplitudes;
  double fidelity_vs_ideal = 1.0;
};

struct DetectResult {
  double p_plus = 0.0;
  double p_minus = 0.0;
  double analytic_p_plus = 0.0;
  double analytic_p_minus = 0.0;
};

struct SaturationModel {
  double q_factor;
  double alpha0;
  /// 2 Q / pi
  double n_s;
};

struct SaturationResult {
  SaturationModel model;
  /// Steady amplitude of the kicked damped oscillator divided by 2 alpha0; infinite when
  /// the amplitude never stops growing within the horizon.
  double simulated_n_s;
  /// Kicks taken to settle to the steady amplitude (horizon if it never settles).
  long kicks;
  bool saturated;
};

struct MrfmResult {
  double amplitude;
  double resolution;
  double q_threshold;
  double n_s;
  bool single_spin_resolvable;
};

struct SigmaXMeasurement {
  double p_plus;
  double p_minus;
  /// Oscillator factor left behind by each outcome; empty when its probability is below 1e-12.
  std::optional<StateVector> collapsed_plus;
  std::optional<StateVector> collapsed_minus;
};

enum class PulseAlignment {
  /// Pulse centred on k tau0.
  centered,
  /// Pulse starts at k tau0.
  leading,
};

enum class DurationConvention {
  /// pi / eps_d, the full-flip time of the resonant drive.
  calibrated_pi_over_eps_d,
  /// pi / omega_d.
  pi_over_omega_d,
};

/// (|up> + |down>)/sqrt 2 (x) |0>.
StateVector standard_initial_state(const SystemParams& params);

/// (|up>|-2 n alpha0> + |down>|2 n alpha0>)/sqrt 2 built from coherent states.
StateVector ideal_cat(int n, const SystemParams& params);

/// ((-i sigma_x) U_1)^n with U_1 = exp(-i H_rot tau0) on the space of `params`.
OperatorMatrix flip_sequence_operator(int n, const SystemParams& params);

/// (D^dagger)^{2n} for even n and sigma_x exp(-i pi a^dag a)(D^dagger)^{2n} for odd n.
OperatorMatrix closed_form_flip_operator(int n, const SystemParams& params);

/// Phase-aligned deviation between the two operators above on the interior block of
/// `params.n_trunc`. Both sides are evaluated on a padded space large enough that the
/// truncation edge cannot reach the compared block.
double flip_identity_deviation(int n, const SystemParams& params);

/// Same comparison for U_1 against D exp(-i pi a^dag a) D^dagger.
double free_evolution_identity_deviation(const SystemParams& params);

AmplifyResult amplify_ideal(int n, const SystemParams& params, const StateVector& initial);

AmplifyResult amplify_finite(int n, double eps_perp, const SystemParams& params, const StateVector& initial,
                             PulseAlignment alignment = PulseAlignment::centered);

std::pair<cplx, cplx> conditional_amplitudes(const StateVector& state);

SigmaXMeasurement measure_sigma_x(const StateVector& state);

/// Drive duration for the chosen convention.
double detection_duration(const SystemParams& params, int n, DurationConvention convention);

/// Drive frequency resonant with the |-2 n alpha0> branch: eps_z - 4 n alpha0 lambda0.
double detection_frequency(const SystemParams& params, int n);

DetectResult detect_spectroscopy(const StateVector& state, const SystemParams& params, int n,
                                 DurationConvention convention = DurationConvention::calibrated_pi_over_eps_d);

/// Half flip, n ideal flips, then a sigma_x measurement. With coherent_input unset the two
/// qubit branches of `state` are run separately and their statistics averaged.
DetectResult coherence_probe(const StateVector& state, const SystemParams& params, int n, bool coherent_input);

struct TwoModeResult {
  int n1;
  int n2;
  double p_plus;
  double p_minus;
  /// Post-measurement two-mode states, index = i1 * n2 + i2.
  std::optional<StateVector> post_plus;
  std::optional<StateVector> post_minus;
  /// <a_i> conditioned on |down> before the measurement (the |up> branch is the negative).
  cplx alpha1;
  cplx alpha2;
  double mode1_entropy_plus;
};

inline constexpr int kMaxTwoModeDim = 8192;

/// Ideal flip protocol with one qubit coupled to two oscillators through
/// sum_i (lambda_i / 2)(a_i + a_i^dag) sigma_z, followed by a sigma_x measurement.
/// params.n_trunc is ignored; each mode is sized by the truncation rule for n lambda_i / omega0.
TwoModeResult two_mode_cat(int n, double lambda01, double lambda02, const SystemParams& params);

struct CoherenceDecay {
  /// Cat amplitude 2 n alpha0.
  double amplitude;
  /// Least-squares slope of -ln C(t).
  double fitted_rate;
  /// (2 n alpha0)^2 k_B T / Q.
  double estimate;
  std::vector<double> times;
  std::vector<double> coherence;
};

/// Damps the cat (|A> + |-A>)/norm, A = 2 n alpha0, with the thermal bath of `params` and fits
/// the decay of C(t) = |<-a|rho|a>| / sqrt(<a|rho|a><-a|rho|-a>), a = A exp(-gamma t / 2).
/// Evolution runs in the frame rotating at omega0, where the oscillator Hamiltonian vanishes.
/// The window spans one predicted e-fold of the coherence, sampled at `samples` points.
CoherenceDecay cat_coherence_decay(int n, const SystemParams& params, int samples = 9);

MrfmResult mrfm_amplitude(int n, int m, const SystemParams& params);

SaturationResult saturation(const SystemParams& params, long max_kicks = 100'000'000);

}  // namespace catsim
