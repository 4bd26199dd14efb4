#pragma once

#include "catsim/fock.hpp"

namespace catsim {

/// Rotating-frame model parameters. Energies in units of omega0 (hbar = 1); times in 1/omega0.
struct SystemParams {
  double omega0 = 1.0;
  double lambda0 = 0.2;
  double eps_z = 0.0;
  double eps_perp_amp = 60.0;
  double eps_d = 1.9;
  double omega_d = 0.0;
  double q_factor = 1.0e4;
  /// k_B T in the same energy units.
  double temperature = 0.0;
  int n_trunc = 64;

  /// Dimensionless coupling lambda0 / (2 omega0).
  double alpha0() const { return lambda0 / (2.0 * omega0); }
  /// Half oscillator period pi / omega0.
  double tau0() const;
  FockSpace fock() const { return FockSpace(n_trunc); }

  /// Throws ValidationError on the first violated invariant.
  void validate() const;
};

/// Device values in SI units (energies in any unit; the derived couplings inherit it).
struct PhysicalDeviceParams {
  double e_j0 = 10.0e9;
  double e_c = 50.0e9;
  double c_x0 = 20.0e-18;   // F
  double c_g = 0.0;         // F
  double v_x0 = 1.0;        // V
  double v_g0 = 0.0;        // V
  double d0 = 1.0e-6;       // m
  double mass = 1.0e-17;    // kg
  double omega0 = 2.0 * 3.141592653589793 * 100.0e6;  // rad/s

  /// Zero-point width sqrt(hbar / (2 m omega0)) in metres.
  double delta_x0() const;
};

struct DerivedCouplings {
  double lambda0;
  double eps_z;
};

/// lambda0 = 4 E_c (V_x0 C_x0 / 2e)(dx0 / d0) and eps_z = 8 E_c (C_g V_g0 + C_x0 V_x0) / 2e,
/// in the energy unit of E_c.
DerivedCouplings coupling_from_physical(const PhysicalDeviceParams& dev);

/// Qubit (x) oscillator. Index = qubit * n_trunc + fock; qubit 0 is |up> (sigma_z = +1).
class CompositeSpace {
 public:
  explicit CompositeSpace(FockSpace fock) : fock_(fock) {}
  const FockSpace& fock() const { return fock_; }
  int n_trunc() const { return fock_.n_trunc(); }
  int dim() const { return 2 * fock_.n_trunc(); }
  int index(int qubit, int fock_index) const { return qubit * fock_.n_trunc() + fock_index; }

 private:
  FockSpace fock_;
};

inline constexpr int kUp = 0;
inline constexpr int kDown = 1;

OperatorMatrix pauli_x();
OperatorMatrix pauli_y();
OperatorMatrix pauli_z();
OperatorMatrix qubit_identity();

/// Kronecker product qubit_op (x) osc_op in the composite ordering.
OperatorMatrix embed(const OperatorMatrix& qubit_op, const OperatorMatrix& osc_op, const CompositeSpace& space);

/// omega0 a^dag a - (lambda0/2)(a + a^dag) sigma_z - (eps_z/2) sigma_z [+ (eps_perp/2) sigma_x].
OperatorMatrix build_h_rot(const SystemParams& params, bool include_pulse);

/// Static part of the detection Hamiltonian plus eps_d cos(omega_d t) sigma_x.
OperatorMatrix build_h_detect(const SystemParams& params, double t);

/// sigma_z-conditional displacement D = exp(alpha0 sigma_z (a^dag - a)): block diagonal with
/// D(+alpha0) on |up> and D(-alpha0) on |down>.
OperatorMatrix conditional_displacement(const SystemParams& params, const CompositeSpace& space);

/// Product state qubit (x) oscillator.
StateVector product_state(cplx c_up, cplx c_down, const StateVector& osc);

}  // namespace catsim
