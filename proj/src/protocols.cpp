#include "catsim/protocols.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace catsim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

CVector flip_blocks(const CVector& v) {
  const Eigen::Index n = v.size() / 2;
  CVector out(v.size());
  out.head(n) = cplx(0, -1) * v.tail(n);
  out.tail(n) = cplx(0, -1) * v.head(n);
  return out;
}

CVector half_flip_blocks(const CVector& v) {
  const Eigen::Index n = v.size() / 2;
  CVector out(v.size());
  out.head(n) = (v.head(n) + v.tail(n)) / std::numbers::sqrt2;
  out.tail(n) = (v.head(n) - v.tail(n)) / std::numbers::sqrt2;
  return out;
}

void require_composite(const StateVector& s, const SystemParams& p, const char* what) {
  if (s.dim() != 2 * p.n_trunc) throw DimensionError(std::string(what) + ": state is not on the composite space of n_trunc " + std::to_string(p.n_trunc));
}

// Closed-form flip sequence applied to a state: each branch displaced by -/+ 2 n alpha0,
// followed by parity and sigma_x for odd n.
CVector closed_form_apply(int n, const SystemParams& params, const CVector& v) {
  const FockSpace space = params.fock();
  const int dim = space.n_trunc();
  const double shift = 2.0 * n * params.alpha0();
  CVector out(v.size());
  out.head(dim) = displacement(-shift, space).entries() * v.head(dim);
  out.tail(dim) = displacement(shift, space).entries() * v.tail(dim);
  if (n % 2 != 0) {
    for (int k = 1; k < dim; k += 2) {
      out(k) = -out(k);
      out(dim + k) = -out(dim + k);
    }
    CVector swapped(v.size());
    swapped.head(dim) = out.tail(dim);
    swapped.tail(dim) = out.head(dim);
    out = std::move(swapped);
  }
  return out;
}

std::vector<int> requested_interior_in(int requested, int padded) {
  const FockSpace req(requested);
  std::vector<int> keep;
  for (int b = 0; b < 2; ++b)
    for (int k = 0; k < req.interior(); ++k) keep.push_back(b * padded + k);
  return keep;
}

int padded_dimension(const SystemParams& params, double amplitude) {
  const FockSpace req = params.fock();
  // Fock level k sits on a phase-space ring of radius sqrt(k); the truncation rule for that
  // radius shifted by the displacement keeps the edge away from the compared block.
  const double reach = std::sqrt(static_cast<double>(req.interior() - 1)) + std::abs(amplitude);
  return std::max(req.n_trunc(), truncation_requirement(reach));
}

}  // namespace

StateVector standard_initial_state(const SystemParams& params) {
  return product_state(1.0, 1.0, StateVector::basis(params.n_trunc, 0));
}

StateVector ideal_cat(int n, const SystemParams& params) {
  const FockSpace space = params.fock();
  const double a = 2.0 * n * params.alpha0();
  const auto minus = coherent_state(-a, space);
  const auto plus = coherent_state(a, space);
  CVector v(2 * space.n_trunc());
  v.head(space.n_trunc()) = minus.amplitudes();
  v.tail(space.n_trunc()) = plus.amplitudes();
  return StateVector::normalized(std::move(v));
}

OperatorMatrix flip_sequence_operator(int n, const SystemParams& params) {
  if (n < 0) throw ValidationError("n_pulses", "must be >= 0");
  const CompositeSpace space(params.fock());
  const OperatorMatrix u1 = matrix_exponential(build_h_rot(params, false), cplx(0.0, -params.tau0()));
  const OperatorMatrix step = instant_flip(space) * u1;
  OperatorMatrix total = OperatorMatrix::identity(space.dim());
  for (int k = 0; k < n; ++k) total = step * total;
  return total;
}

OperatorMatrix closed_form_flip_operator(int n, const SystemParams& params) {
  if (n < 0) throw ValidationError("n_pulses", "must be >= 0");
  const CompositeSpace space(params.fock());
  const int dim = space.n_trunc();
  const double shift = 2.0 * n * params.alpha0();
  CMatrix d = CMatrix::Zero(space.dim(), space.dim());
  d.block(0, 0, dim, dim) = displacement(-shift, space.fock()).entries();
  d.block(dim, dim, dim, dim) = displacement(shift, space.fock()).entries();
  OperatorMatrix result(std::move(d), false, true);
  if (n % 2 != 0) {
    result = embed(pauli_x(), OperatorMatrix::identity(dim), space) *
             embed(qubit_identity(), parity(space.fock()), space) * result;
  }
  return result;
}

double flip_identity_deviation(int n, const SystemParams& params) {
  SystemParams padded = params;
  padded.n_trunc = padded_dimension(params, 2.0 * n * params.alpha0());
  const auto numeric = flip_sequence_operator(n, padded);
  const auto closed = closed_form_flip_operator(n, padded);
  return phase_aligned_deviation(numeric.entries(), closed.entries(), requested_interior_in(params.n_trunc, padded.n_trunc));
}

double free_evolution_identity_deviation(const SystemParams& params) {
  SystemParams padded = params;
  padded.n_trunc = padded_dimension(params, 2.0 * params.alpha0());
  const CompositeSpace space(padded.fock());
  const OperatorMatrix u1 = matrix_exponential(build_h_rot(padded, false), cplx(0.0, -padded.tau0()));
  const OperatorMatrix d = conditional_displacement(padded, space);
  const OperatorMatrix rotated = d * embed(qubit_identity(), parity(space.fock()), space) * d.adjoint();
  return phase_aligned_deviation(u1.entries(), rotated.entries(), requested_interior_in(params.n_trunc, padded.n_trunc));
}

std::pair<cplx, cplx> conditional_amplitudes(const StateVector& state) {
  if (state.dim() % 2 != 0) throw DimensionError("conditional_amplitudes: odd dimension");
  const Eigen::Index n = state.dim() / 2;
  auto branch = [&](const auto& block) -> cplx {
    const double w = block.squaredNorm();
    if (w < 1e-12) return {kNaN, kNaN};
    cplx acc = 0.0;
    for (Eigen::Index k = 1; k < n; ++k) acc += std::conj(block(k - 1)) * std::sqrt(static_cast<double>(k)) * block(k);
    return acc / w;
  };
  return {branch(state.amplitudes().head(n)), branch(state.amplitudes().tail(n))};
}

AmplifyResult amplify_ideal(int n, const SystemParams& params, const StateVector& initial) {
  if (n < 0) throw ValidationError("n_pulses", "must be >= 0");
  params.validate();
  check_truncation(2.0 * n * params.alpha0(), params.fock());
  require_composite(initial, params, "amplify_ideal");

  CVector v = initial.amplitudes();
  if (n > 0) {
    const SpectralPropagator free(build_h_rot(params, false));
    const CMatrix u1 = free.unitary(params.tau0()).entries();
    for (int k = 0; k < n; ++k) v = flip_blocks(u1 * v);
  }
  AmplifyResult r;
  r.final_state = StateVector::adopt(std::move(v));
  r.n_pulses = n;
  r.conditional_amplitudes = conditional_amplitudes(r.final_state);
  const StateVector ideal = StateVector::normalized(closed_form_apply(n, params, initial.amplitudes()));
  r.fidelity_vs_ideal = fidelity(ideal, r.final_state);
  return r;
}

AmplifyResult amplify_finite(int n, double eps_perp, const SystemParams& params, const StateVector& initial,
                             PulseAlignment alignment) {
  if (n < 0) throw ValidationError("n_pulses", "must be >= 0");
  if (!(eps_perp > 0.0)) throw ValidationError("eps_perp", "must be > 0");
  params.validate();
  check_truncation(2.0 * n * params.alpha0(), params.fock());
  require_composite(initial, params, "amplify_finite");

  const double tau0 = params.tau0();
  const double width = std::numbers::pi / eps_perp;
  if (width >= tau0)
    throw ScheduleOverlapError("pulse duration pi/eps_perp = " + std::to_string(width) + " is not shorter than tau0");

  const double offset = alignment == PulseAlignment::centered ? -0.5 * width : 0.0;
  const double total = n == 0 ? 0.0 : n * tau0 + offset + width;
  PulseSchedule finite(total);
  PulseSchedule ideal(total);
  for (int k = 1; k <= n; ++k) {
    finite.add(RectPulse{k * tau0 + offset, width, eps_perp});
    ideal.add(InstantFlip{k * tau0});
  }
  AmplifyResult r;
  r.final_state = apply_schedule(finite, params, initial);
  r.n_pulses = n;
  r.conditional_amplitudes = conditional_amplitudes(r.final_state);
  r.fidelity_vs_ideal = fidelity(apply_schedule(ideal, params, initial), r.final_state);
  return r;
}

SigmaXMeasurement measure_sigma_x(const StateVector& state) {
  if (state.dim() % 2 != 0) throw DimensionError("measure_sigma_x: odd dimension");
  const Eigen::Index n = state.dim() / 2;
  const CVector plus = (state.amplitudes().head(n) + state.amplitudes().tail(n)) / std::numbers::sqrt2;
  const CVector minus = (state.amplitudes().head(n) - state.amplitudes().tail(n)) / std::numbers::sqrt2;
  const double total = plus.squaredNorm() + minus.squaredNorm();
  SigmaXMeasurement m;
  m.p_plus = plus.squaredNorm() / total;
  m.p_minus = minus.squaredNorm() / total;
  if (m.p_plus >= 1e-12) m.collapsed_plus = StateVector::normalized(plus);
  if (m.p_minus >= 1e-12) m.collapsed_minus = StateVector::normalized(minus);
  return m;
}

double detection_frequency(const SystemParams& params, int n) {
  const double w = params.eps_z - 4.0 * n * params.alpha0() * params.lambda0;
  if (!(w > 0.0)) throw ValidationError("eps_z", "must exceed 4 n alpha0 lambda0 so the drive frequency is positive");
  return w;
}

double detection_duration(const SystemParams& params, int n, DurationConvention convention) {
  if (convention == DurationConvention::calibrated_pi_over_eps_d) {
    if (!(params.eps_d > 0.0)) throw ValidationError("eps_d", "must be > 0");
    return std::numbers::pi / params.eps_d;
  }
  return std::numbers::pi / detection_frequency(params, n);
}

DetectResult detect_spectroscopy(const StateVector& state, const SystemParams& params, int n,
                                 DurationConvention convention) {
  if (n < 0) throw ValidationError("n_pulses", "must be >= 0");
  params.validate();
  check_truncation(2.0 * n * params.alpha0(), params.fock());
  require_composite(state, params, "detect_spectroscopy");

  SystemParams drive = params;
  drive.omega_d = detection_frequency(params, n);
  const double duration = detection_duration(drive, n, convention);
  const StateVector driven = propagate_driven(drive, 0.0, duration, state);
  const auto m = measure_sigma_x(StateVector::adopt(half_flip_blocks(driven.amplitudes())));

  const double shift = 8.0 * n * params.alpha0() * params.lambda0;
  const auto [ap, am] = analytic_detection_probabilities(detection_coefficients(params.eps_d, shift));
  return {m.p_plus, m.p_minus, ap, am};
}

DetectResult coherence_probe(const StateVector& state, const SystemParams& params, int n, bool coherent_input) {
  if (n < 0) throw ValidationError("n_pulses", "must be >= 0");
  params.validate();
  check_truncation(4.0 * n * params.alpha0(), params.fock());
  require_composite(state, params, "coherence_probe");

  const SpectralPropagator free(build_h_rot(params, false));
  const CMatrix u1 = free.unitary(params.tau0()).entries();
  auto run = [&](const CVector& v0) {
    CVector v = half_flip_blocks(v0);
    for (int k = 0; k < n; ++k) v = flip_blocks(u1 * v);
    return measure_sigma_x(StateVector::adopt(std::move(v)));
  };

  const double a = 2.0 * n * params.alpha0();
  DetectResult r;
  if (coherent_input) {
    const auto m = run(state.amplitudes());
    r.p_plus = m.p_plus;
    r.p_minus = m.p_minus;
    r.analytic_p_plus = 0.75 - 0.25 * std::exp(-8.0 * a * a);
  } else {
    const Eigen::Index dim = params.n_trunc;
    double p_plus = 0.0, weight = 0.0;
    for (int b = 0; b < 2; ++b) {
      CVector branch = CVector::Zero(2 * dim);
      branch.segment(b * dim, dim) = state.amplitudes().segment(b * dim, dim);
      const double w = branch.squaredNorm();
      if (w < 1e-15) continue;
      p_plus += w * run(branch / std::sqrt(w)).p_plus;
      weight += w;
    }
    r.p_plus = p_plus / weight;
    r.p_minus = 1.0 - r.p_plus;
    r.analytic_p_plus = 0.5;
  }
  r.analytic_p_minus = 1.0 - r.analytic_p_plus;
  return r;
}

TwoModeResult two_mode_cat(int n, double lambda01, double lambda02, const SystemParams& params) {
  if (n < 0) throw ValidationError("n_pulses", "must be >= 0");
  params.validate();
  const double alpha1 = n * lambda01 / params.omega0;
  const double alpha2 = n * lambda02 / params.omega0;
  const int n1 = std::max(2, truncation_requirement(alpha1));
  const int n2 = std::max(2, truncation_requirement(alpha2));
  if (2L * n1 * n2 > kMaxTwoModeDim)
    throw DimensionError("two_mode_cat: joint dimension " + std::to_string(2L * n1 * n2) + " exceeds " + std::to_string(kMaxTwoModeDim));

  // Free evolution is diagonal in sigma_z and separable per mode within each sector.
  auto mode_unitary = [&](int dim, double lambda, double sigma, double bias) {
    const auto ops = ladder_ops(FockSpace(dim));
    CMatrix h = params.omega0 * ops.number.entries() -
                0.5 * lambda * sigma * (ops.lower.entries() + ops.raise.entries()) -
                0.5 * bias * sigma * CMatrix::Identity(dim, dim);
    return matrix_exponential(OperatorMatrix::hermitian(std::move(h)), cplx(0.0, -params.tau0())).entries();
  };
  const CMatrix u1_up = mode_unitary(n1, lambda01, 1.0, params.eps_z);
  const CMatrix u1_down = mode_unitary(n1, lambda01, -1.0, params.eps_z);
  const CMatrix u2_up = mode_unitary(n2, lambda02, 1.0, 0.0);
  const CMatrix u2_down = mode_unitary(n2, lambda02, -1.0, 0.0);

  // psi(i1, i2) per qubit sector; the second mode acts from the right.
  CMatrix up = CMatrix::Zero(n1, n2);
  CMatrix down = CMatrix::Zero(n1, n2);
  up(0, 0) = down(0, 0) = 1.0 / std::numbers::sqrt2;
  for (int k = 0; k < n; ++k) {
    CMatrix next_up = u1_up * up * u2_up.transpose();
    CMatrix next_down = u1_down * down * u2_down.transpose();
    up = cplx(0, -1) * next_down;
    down = cplx(0, -1) * next_up;
  }

  const auto a1 = ladder_ops(FockSpace(n1)).lower.entries();
  const auto a2 = ladder_ops(FockSpace(n2)).lower.entries();
  const double wd = down.squaredNorm();
  TwoModeResult r{};
  r.n1 = n1;
  r.n2 = n2;
  r.alpha1 = (down.conjugate().cwiseProduct(a1 * down)).sum() / wd;
  r.alpha2 = (down.conjugate().cwiseProduct(down * a2.transpose())).sum() / wd;

  auto flatten = [&](const CMatrix& m) {
    CVector v(static_cast<Eigen::Index>(n1) * n2);
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) v(static_cast<Eigen::Index>(i) * n2 + j) = m(i, j);
    return v;
  };
  const CMatrix plus = (up + down) / std::numbers::sqrt2;
  const CMatrix minus = (up - down) / std::numbers::sqrt2;
  const double total = plus.squaredNorm() + minus.squaredNorm();
  r.p_plus = plus.squaredNorm() / total;
  r.p_minus = minus.squaredNorm() / total;
  r.mode1_entropy_plus = kNaN;
  if (r.p_plus >= 1e-12) {
    r.post_plus = StateVector::normalized(flatten(plus));
    r.mode1_entropy_plus = mode_entropy(r.post_plus->amplitudes(), n1, n2);
  }
  if (r.p_minus >= 1e-12) r.post_minus = StateVector::normalized(flatten(minus));
  return r;
}

CoherenceDecay cat_coherence_decay(int n, const SystemParams& params, int samples) {
  if (n < 1) throw ValidationError("n_pulses", "must be >= 1");
  if (samples < 3) throw ValidationError("samples", "need at least 3 points for a fit");
  params.validate();
  const double a = 2.0 * n * params.alpha0();
  if (!(a > 0.0)) throw ValidationError("lambda0", "cat amplitude must be positive");
  const FockSpace space = params.fock();
  check_truncation(a, space);
  const BathParams bath = BathParams::from_system(params);
  if (!(bath.gamma > 0.0)) throw ValidationError("q_factor", "coherence decay needs finite Q");

  CoherenceDecay r;
  r.amplitude = a;
  r.estimate = decoherence_estimate(n, params);
  const double window = 1.0 / (2.0 * bath.gamma * (2.0 * bath.nbar + 1.0) * a * a);
  const double dt = window / (samples - 1);

  const OperatorMatrix h = OperatorMatrix::hermitian(CMatrix::Zero(space.dim(), space.dim()));
  const CVector cat = coherent_state(a, space).amplitudes() + coherent_state(-a, space).amplitudes();
  DensityMatrix rho = DensityMatrix::pure(StateVector::normalized(cat));
  for (int k = 0; k < samples; ++k) {
    if (k > 0) rho = lindblad_evolve(h, bath, rho, dt);
    const double t = k * dt;
    const double centre = a * std::exp(-0.5 * bath.gamma * t);
    const CVector plus = coherent_state(centre, space).amplitudes();
    const CVector minus = coherent_state(-centre, space).amplitudes();
    const CMatrix& m = rho.entries();
    const double off = std::abs(minus.dot(m * plus));
    const double diag = std::sqrt(std::abs(plus.dot(m * plus)) * std::abs(minus.dot(m * minus)));
    r.times.push_back(t);
    r.coherence.push_back(off / diag);
  }

  double mt = 0.0, my = 0.0;
  for (int k = 0; k < samples; ++k) {
    mt += r.times[k];
    my += std::log(r.coherence[k]);
  }
  mt /= samples;
  my /= samples;
  double sxy = 0.0, sxx = 0.0;
  for (int k = 0; k < samples; ++k) {
    sxy += (r.times[k] - mt) * (std::log(r.coherence[k]) - my);
    sxx += (r.times[k] - mt) * (r.times[k] - mt);
  }
  r.fitted_rate = -sxy / sxx;
  return r;
}

MrfmResult mrfm_amplitude(int n, int m, const SystemParams& params) {
  if (n < 1) throw ValidationError("n_pulses", "must be >= 1");
  if (m < 1) throw ValidationError("m", "spin multiplicity must be >= 1");
  params.validate();
  const double a0 = params.alpha0();
  MrfmResult r;
  r.amplitude = 2.0 * n * m * a0;
  r.resolution = 2.0 * n * a0;
  r.q_threshold = std::numbers::pi / (4.0 * a0);
  r.n_s = 2.0 * params.q_factor / std::numbers::pi;
  r.single_spin_resolvable = r.resolution > 1.0 && r.n_s >= n;
  return r;
}

SaturationResult saturation(const SystemParams& params, long max_kicks) {
  params.validate();
  const double a0 = params.alpha0();
  if (!(a0 > 0.0)) throw ValidationError("lambda0", "saturation needs a positive coupling");
  SaturationResult r{};
  r.model = {params.q_factor, a0, 2.0 * params.q_factor / std::numbers::pi};

  // Each half period the oscillator turns by pi about the spin-dependent centre +-alpha0
  // while the distance from the centre decays by exp(-pi / 2Q); the spin then flips.
  const double retain = std::exp(-std::numbers::pi / (2.0 * params.q_factor));
  double z = 0.0;
  double centre = a0;
  double previous = 0.0;
  for (long k = 1; k <= max_kicks; ++k) {
    z = centre - (z - centre) * retain;
    centre = -centre;
    const double amplitude = std::abs(z);
    if (std::abs(amplitude - previous) <= 1e-13 * amplitude) {
      r.simulated_n_s = amplitude / (2.0 * a0);
      r.kicks = k;
      r.saturated = true;
      return r;
    }
    previous = amplitude;
  }
  r.simulated_n_s = std::numeric_limits<double>::infinity();
  r.kicks = max_kicks;
  r.saturated = false;
  return r;
}

}  // namespace catsim
