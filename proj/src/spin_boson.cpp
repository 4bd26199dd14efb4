#include "catsim/spin_boson.hpp"

#include <cmath>
#include <numbers>

namespace catsim {

namespace {

constexpr double kHbar = 1.054571817e-34;           // J s
constexpr double kElementaryCharge = 1.602176634e-19;  // C

}  // namespace

double SystemParams::tau0() const { return std::numbers::pi / omega0; }

void SystemParams::validate() const {
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw ValidationError("omega0", "must be > 0");
  if (!std::isfinite(lambda0)) throw ValidationError("lambda0", "must be finite");
  if (!std::isfinite(eps_z)) throw ValidationError("eps_z", "must be finite");
  if (!std::isfinite(eps_perp_amp) || eps_perp_amp < 0.0) throw ValidationError("eps_perp", "must be >= 0");
  if (!std::isfinite(eps_d) || eps_d < 0.0) throw ValidationError("eps_d", "must be >= 0");
  if (!std::isfinite(omega_d) || omega_d < 0.0) throw ValidationError("omega_d", "must be >= 0");
  if (!(q_factor > 0.0)) throw ValidationError("q_factor", "must be > 0");
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) throw ValidationError("temperature", "must be >= 0");
  if (n_trunc < 2) throw ValidationError("n_trunc", "must be >= 2");
}

double PhysicalDeviceParams::delta_x0() const { return std::sqrt(kHbar / (2.0 * mass * omega0)); }

DerivedCouplings coupling_from_physical(const PhysicalDeviceParams& dev) {
  const double positive[] = {dev.e_j0, dev.e_c, dev.c_x0, dev.d0, dev.mass, dev.omega0};
  for (double v : positive)
    if (!(v > 0.0)) throw ValidationError("device", "E_J0, E_c, C_x0, d0, mass and omega0 must be > 0");
  if (dev.c_g < 0.0 || dev.v_x0 < 0.0 || dev.v_g0 < 0.0) throw ValidationError("device", "capacitances and voltages must be >= 0");
  const double two_e = 2.0 * kElementaryCharge;
  const double lambda0 = 4.0 * dev.e_c * (dev.v_x0 * dev.c_x0 / two_e) * (dev.delta_x0() / dev.d0);
  const double eps_z = 8.0 * dev.e_c * (dev.c_g * dev.v_g0 + dev.c_x0 * dev.v_x0) / two_e;
  return {lambda0, eps_z};
}

OperatorMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return OperatorMatrix(m, true, true);
}

OperatorMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return OperatorMatrix(m, true, true);
}

OperatorMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return OperatorMatrix(m, true, true);
}

OperatorMatrix qubit_identity() { return OperatorMatrix::identity(2); }

OperatorMatrix embed(const OperatorMatrix& qubit_op, const OperatorMatrix& osc_op, const CompositeSpace& space) {
  if (qubit_op.dim() != 2) throw DimensionError("embed: qubit operator must be 2x2");
  if (osc_op.dim() != space.n_trunc()) throw DimensionError("embed: oscillator operator does not match the space");
  const int n = space.n_trunc();
  CMatrix out = CMatrix::Zero(2 * n, 2 * n);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const cplx q = qubit_op.entries()(i, j);
      if (q != cplx(0.0)) out.block(i * n, j * n, n, n) = q * osc_op.entries();
    }
  return OperatorMatrix(std::move(out), qubit_op.is_hermitian() && osc_op.is_hermitian(),
                        qubit_op.is_unitary() && osc_op.is_unitary());
}

namespace {

CMatrix static_hamiltonian(const SystemParams& p, const CompositeSpace& space) {
  const auto ops = ladder_ops(space.fock());
  const OperatorMatrix x(ops.lower.entries() + ops.raise.entries(), true, false);
  const auto one = OperatorMatrix::identity(space.n_trunc());
  CMatrix h = p.omega0 * embed(qubit_identity(), ops.number, space).entries();
  h -= 0.5 * p.lambda0 * embed(pauli_z(), x, space).entries();
  h -= 0.5 * p.eps_z * embed(pauli_z(), one, space).entries();
  return h;
}

}  // namespace

OperatorMatrix build_h_rot(const SystemParams& params, bool include_pulse) {
  params.validate();
  const CompositeSpace space(params.fock());
  CMatrix h = static_hamiltonian(params, space);
  if (include_pulse)
    h += 0.5 * params.eps_perp_amp *
         embed(pauli_x(), OperatorMatrix::identity(space.n_trunc()), space).entries();
  return OperatorMatrix::hermitian(std::move(h));
}

OperatorMatrix build_h_detect(const SystemParams& params, double t) {
  params.validate();
  if (t < 0.0) throw ValidationError("t", "must be >= 0");
  const CompositeSpace space(params.fock());
  CMatrix h = static_hamiltonian(params, space);
  h += params.eps_d * std::cos(params.omega_d * t) *
       embed(pauli_x(), OperatorMatrix::identity(space.n_trunc()), space).entries();
  return OperatorMatrix::hermitian(std::move(h));
}

OperatorMatrix conditional_displacement(const SystemParams& params, const CompositeSpace& space) {
  const double a0 = params.alpha0();
  const int n = space.n_trunc();
  CMatrix d = CMatrix::Zero(2 * n, 2 * n);
  d.block(0, 0, n, n) = displacement(a0, space.fock()).entries();
  d.block(n, n, n, n) = displacement(-a0, space.fock()).entries();
  return OperatorMatrix(std::move(d), false, true);
}

StateVector product_state(cplx c_up, cplx c_down, const StateVector& osc) {
  const int n = osc.dim();
  CVector v(2 * n);
  v.head(n) = c_up * osc.amplitudes();
  v.tail(n) = c_down * osc.amplitudes();
  return StateVector::normalized(std::move(v));
}

}  // namespace catsim
