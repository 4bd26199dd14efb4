#include "catsim/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>

#include <Eigen/Eigenvalues>

namespace catsim {

double event_start(const PulseEvent& e) {
  return std::visit(
      [](const auto& ev) -> double {
        using T = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<T, InstantFlip> || std::is_same_v<T, InstantHalfFlip>)
          return ev.time;
        else
          return ev.start;
      },
      e);
}

double event_end(const PulseEvent& e) {
  return std::visit(
      [](const auto& ev) -> double {
        using T = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<T, InstantFlip> || std::is_same_v<T, InstantHalfFlip>)
          return ev.time;
        else
          return ev.start + ev.duration;
      },
      e);
}

PulseSchedule::PulseSchedule(double total_time) : total_time_(total_time) {
  if (!(total_time >= 0.0)) throw ScheduleOverlapError("schedule total_time must be >= 0");
}

PulseSchedule& PulseSchedule::add(PulseEvent event) {
  const double s = event_start(event);
  auto it = std::upper_bound(events_.begin(), events_.end(), s,
                             [](double t, const PulseEvent& e) { return t < event_start(e); });
  events_.insert(it, std::move(event));
  return *this;
}

void PulseSchedule::validate() const {
  // Tolerance for events that end exactly where the next begins after floating-point sums.
  const double eps = 1e-12 * std::max(1.0, total_time_);
  double busy_until = 0.0;
  for (const auto& e : events_) {
    const double s = event_start(e);
    const double f = event_end(e);
    if (s < -eps || f > total_time_ + eps || f < s)
      throw ScheduleOverlapError("event [" + std::to_string(s) + ", " + std::to_string(f) +
                                 "] lies outside [0, " + std::to_string(total_time_) + "]");
    if (s < busy_until - eps)
      throw ScheduleOverlapError("event starting at " + std::to_string(s) + " overlaps a segment ending at " +
                                 std::to_string(busy_until));
    busy_until = std::max(busy_until, f);
  }
}

SpectralPropagator::SpectralPropagator(const OperatorMatrix& h) {
  if (!h.is_hermitian()) throw DimensionError("SpectralPropagator: Hamiltonian must be flagged hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.entries());
  energies_ = es.eigenvalues();
  vectors_ = es.eigenvectors();
}

CVector SpectralPropagator::apply(const CVector& psi, double duration) const {
  if (psi.size() != energies_.size()) throw DimensionError("SpectralPropagator::apply: dimension mismatch");
  CVector c = vectors_.adjoint() * psi;
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::exp(cplx(0.0, -energies_(i) * duration));
  return vectors_ * c;
}

OperatorMatrix SpectralPropagator::unitary(double duration) const {
  CVector phases(energies_.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::exp(cplx(0.0, -energies_(i) * duration));
  return OperatorMatrix(vectors_ * phases.asDiagonal() * vectors_.adjoint(), false, true);
}

OperatorMatrix instant_flip(const CompositeSpace& space) {
  CMatrix q = cplx(0, -1) * pauli_x().entries();
  return embed(OperatorMatrix(q, false, true), OperatorMatrix::identity(space.n_trunc()), space);
}

OperatorMatrix half_flip(const CompositeSpace& space) {
  CMatrix q(2, 2);
  q << 1, 1, 1, -1;
  q /= std::numbers::sqrt2;
  return embed(OperatorMatrix(q, true, true), OperatorMatrix::identity(space.n_trunc()), space);
}

StateVector propagate_static(const OperatorMatrix& h, double duration, const StateVector& psi) {
  if (h.dim() != psi.dim()) throw DimensionError("propagate_static: dimension mismatch");
  if (duration < 0.0) throw ValidationError("duration", "must be >= 0");
  if (duration == 0.0) return psi;
  return StateVector::adopt(SpectralPropagator(h).apply(psi.amplitudes(), duration));
}

namespace {

// -i sigma_x and the |up>,|down> -> |+>,|-> map act blockwise on the two qubit halves.
CVector apply_flip(const CVector& v) {
  const Eigen::Index n = v.size() / 2;
  CVector out(v.size());
  out.head(n) = cplx(0, -1) * v.tail(n);
  out.tail(n) = cplx(0, -1) * v.head(n);
  return out;
}

CVector apply_half_flip(const CVector& v) {
  const Eigen::Index n = v.size() / 2;
  CVector out(v.size());
  out.head(n) = (v.head(n) + v.tail(n)) / std::numbers::sqrt2;
  out.tail(n) = (v.head(n) - v.tail(n)) / std::numbers::sqrt2;
  return out;
}

}  // namespace

StateVector apply_schedule(const PulseSchedule& schedule, const SystemParams& params, const StateVector& psi) {
  schedule.validate();
  params.validate();
  if (psi.dim() != 2 * params.n_trunc) throw DimensionError("apply_schedule: state is not on the composite space");

  std::optional<SpectralPropagator> free;
  std::map<double, SpectralPropagator> pulsed;
  auto free_prop = [&]() -> const SpectralPropagator& {
    if (!free) free.emplace(build_h_rot(params, false));
    return *free;
  };

  CVector v = psi.amplitudes();
  double t = 0.0;
  auto advance_to = [&](double target) {
    if (target > t) v = free_prop().apply(v, target - t);
    t = std::max(t, target);
  };

  for (const auto& e : schedule.events()) {
    advance_to(event_start(e));
    std::visit(
        [&](const auto& ev) {
          using T = std::decay_t<decltype(ev)>;
          if constexpr (std::is_same_v<T, InstantFlip>) {
            v = apply_flip(v);
          } else if constexpr (std::is_same_v<T, InstantHalfFlip>) {
            v = apply_half_flip(v);
          } else if constexpr (std::is_same_v<T, RectPulse>) {
            auto it = pulsed.find(ev.amplitude);
            if (it == pulsed.end()) {
              SystemParams p = params;
              p.eps_perp_amp = ev.amplitude;
              it = pulsed.emplace(ev.amplitude, SpectralPropagator(build_h_rot(p, true))).first;
            }
            v = it->second.apply(v, ev.duration);
          } else {
            SystemParams p = params;
            p.eps_d = ev.amplitude;
            p.omega_d = ev.frequency;
            v = propagate_driven(p, ev.start, ev.duration, StateVector::adopt(v)).amplitudes();
          }
        },
        e);
    t = std::max(t, event_end(e));
  }
  advance_to(schedule.total_time());
  return StateVector::adopt(std::move(v));
}

namespace {

// Fourth-order triple-jump weights for composing a symmetric second-order step.
const double kYoshidaOuter = 1.0 / (2.0 - std::cbrt(2.0));
const double kYoshidaInner = -std::cbrt(2.0) / (2.0 - std::cbrt(2.0));

double drive_area(double amplitude, double frequency, double t1, double t2) {
  if (frequency == 0.0) return amplitude * (t2 - t1);
  // sin(w t2) - sin(w t1) written to avoid cancellation for short intervals
  return amplitude / frequency * 2.0 * std::cos(0.5 * frequency * (t1 + t2)) * std::sin(0.5 * frequency * (t2 - t1));
}

}  // namespace

StateVector propagate_driven(const SystemParams& params, double start, double duration, const StateVector& psi,
                             const DriveOptions& options) {
  params.validate();
  if (duration < 0.0) throw ValidationError("duration", "must be >= 0");
  if (start < 0.0) throw ValidationError("start", "must be >= 0");
  if (psi.dim() != 2 * params.n_trunc) throw DimensionError("propagate_driven: state is not on the composite space");
  if (duration == 0.0) return psi;

  const SpectralPropagator stat(build_h_rot(params, false));
  if (params.eps_d == 0.0) return StateVector::adopt(stat.apply(psi.amplitudes(), duration));

  // Split H(t) = H_static + c(t) X with X = sigma_x (x) 1. Work in the eigenbasis of H_static,
  // where the static flow is a phase and the drive flow is exp(-i theta X) with exact area theta.
  const CMatrix& vecs = stat.vectors();
  const Eigen::Index n = vecs.rows() / 2;
  CMatrix x_vecs(vecs.rows(), vecs.cols());
  x_vecs.topRows(n) = vecs.bottomRows(n);
  x_vecs.bottomRows(n) = vecs.topRows(n);
  const CMatrix x_eig = vecs.adjoint() * x_vecs;
  const CVector start_coeffs = vecs.adjoint() * psi.amplitudes();
  const Eigen::VectorXd& e = stat.energies();

  auto half_phase = [&](double tau) {
    CVector ph(e.size());
    for (Eigen::Index i = 0; i < e.size(); ++i) ph(i) = std::exp(cplx(0.0, -0.5 * tau * e(i)));
    return ph;
  };

  auto integrate = [&](long steps) {
    const double h = duration / static_cast<double>(steps);
    const double weights[3] = {kYoshidaOuter, kYoshidaInner, kYoshidaOuter};
    const CVector ph_outer = half_phase(kYoshidaOuter * h);
    const CVector ph_inner = half_phase(kYoshidaInner * h);
    CVector c = start_coeffs;
    CVector tmp(c.size());
    for (long k = 0; k < steps; ++k) {
      double t = start + static_cast<double>(k) * h;
      for (int s = 0; s < 3; ++s) {
        const double tau = weights[s] * h;
        const CVector& ph = (s == 1) ? ph_inner : ph_outer;
        c.array() *= ph.array();
        const double theta = drive_area(params.eps_d, params.omega_d, t, t + tau);
        tmp.noalias() = x_eig * c;
        c = std::cos(theta) * c - cplx(0.0, std::sin(theta)) * tmp;
        c.array() *= ph.array();
        t += tau;
      }
    }
    return c;
  };

  const double rate = std::max({params.eps_d, params.omega_d, std::abs(params.eps_z), params.omega0});
  long steps = std::max<long>(8, static_cast<long>(std::ceil(2.0 * duration * rate)));
  CVector prev = integrate(steps);
  for (int halving = 0; halving < options.max_halvings; ++halving) {
    steps *= 2;
    CVector next = integrate(steps);
    if ((next - prev).norm() < options.tolerance) return StateVector::adopt(vecs * next);
    prev = std::move(next);
  }
  throw ConvergenceError("propagate_driven: no convergence to " + std::to_string(options.tolerance) + " after " +
                         std::to_string(options.max_halvings) + " step halvings");
}

DensityMatrix DensityMatrix::from_matrix(CMatrix entries) {
  if (entries.rows() != entries.cols() || entries.rows() == 0) throw DimensionError("DensityMatrix: must be square and non-empty");
  const cplx tr = entries.trace();
  if (std::abs(tr - 1.0) > 1e-10) throw DimensionError("DensityMatrix: trace differs from one by " + std::to_string(std::abs(tr - 1.0)));
  if (hermiticity_defect(entries) > 1e-10) throw DimensionError("DensityMatrix: not hermitian");
  CMatrix sym = 0.5 * (entries + entries.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sym, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-8) throw DimensionError("DensityMatrix: negative eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
  return DensityMatrix(std::move(sym));
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  const CVector& v = psi.amplitudes();
  return from_matrix(v * v.adjoint());
}

double bose_occupation(double omega, double kt) {
  if (kt <= 0.0) return 0.0;
  return 1.0 / std::expm1(omega / kt);
}

BathParams BathParams::from_system(const SystemParams& params) {
  params.validate();
  return {params.omega0 / params.q_factor, bose_occupation(params.omega0, params.temperature)};
}

double trace_norm(const CMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (hermitian + hermitian.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

DensityMatrix lindblad_evolve(const OperatorMatrix& h, const OperatorMatrix& lower, const BathParams& bath,
                              const DensityMatrix& rho, double duration, const LindbladOptions& options) {
  if (h.dim() != rho.dim() || lower.dim() != rho.dim()) throw DimensionError("lindblad_evolve: dimension mismatch");
  if (rho.dim() > kMaxDensityDim) throw DimensionError("lindblad_evolve: dimension exceeds " + std::to_string(kMaxDensityDim));
  if (duration < 0.0) throw ValidationError("duration", "must be >= 0");
  if (bath.gamma < 0.0 || bath.nbar < 0.0) throw ValidationError("bath", "gamma and nbar must be >= 0");
  if (duration == 0.0) return rho;

  const CMatrix& a = lower.entries();
  const CMatrix ad = a.adjoint();
  const double down = bath.gamma * (bath.nbar + 1.0);
  const double up = bath.gamma * bath.nbar;
  // -i[H, rho] - 1/2 {K, rho} = -i (H_eff rho - rho H_eff^dag), K = down a^dag a + up a a^dag
  const CMatrix h_eff = h.entries() - cplx(0.0, 0.5) * (down * ad * a + up * a * ad);

  auto rhs = [&](const CMatrix& r) {
    CMatrix m = cplx(0.0, -1.0) * (h_eff * r);
    CMatrix out = m + m.adjoint();
    if (down > 0.0) out.noalias() += down * (a * r * ad);
    if (up > 0.0) out.noalias() += up * (ad * r * a);
    return out;
  };

  auto integrate = [&](long steps) {
    const double dt = duration / static_cast<double>(steps);
    CMatrix r = rho.entries();
    for (long k = 0; k < steps; ++k) {
      const CMatrix k1 = rhs(r);
      const CMatrix k2 = rhs(r + 0.5 * dt * k1);
      const CMatrix k3 = rhs(r + 0.5 * dt * k2);
      const CMatrix k4 = rhs(r + dt * k3);
      r += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return r;
  };

  // RK4 is stable for dt * |lambda| below ~2.7; start under that bound.
  const double scale = h_eff.cwiseAbs().rowwise().sum().maxCoeff() + (down + up) * static_cast<double>(rho.dim());
  long steps = std::max<long>(1, static_cast<long>(std::ceil(duration * scale)));
  CMatrix prev = integrate(steps);
  for (int halving = 0; halving < options.max_halvings; ++halving) {
    steps *= 2;
    CMatrix next = integrate(steps);
    if (trace_norm(next - prev) < options.tolerance) {
      // Renormalize the roundoff-level trace drift.
      next /= next.trace();
      return DensityMatrix::from_matrix(std::move(next));
    }
    prev = std::move(next);
  }
  throw ConvergenceError("lindblad_evolve: no convergence to " + std::to_string(options.tolerance) + " after " +
                         std::to_string(options.max_halvings) + " step halvings");
}

DensityMatrix lindblad_evolve(const OperatorMatrix& h, const BathParams& bath, const DensityMatrix& rho,
                              double duration, const LindbladOptions& options) {
  return lindblad_evolve(h, ladder_ops(FockSpace(h.dim())).lower, bath, rho, duration, options);
}

}  // namespace catsim
