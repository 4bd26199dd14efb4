#pragma once

#include <variant>
#include <vector>

#include "catsim/fock.hpp"
#include "catsim/spin_boson.hpp"

namespace catsim {

/// Ideal pi flip: exactly -i sigma_x.
struct InstantFlip {
  double time;
};

/// Ideal pulse mapping |up> -> |+> and |down> -> |->.
struct InstantHalfFlip {
  double time;
};

/// Rectangular sigma_x pulse: (amplitude / 2) sigma_x added to H_rot for `duration`.
struct RectPulse {
  double start;
  double duration;
  double amplitude;
};

/// Continuous drive amplitude * cos(frequency * t) sigma_x, t measured from time zero.
struct Drive {
  double start;
  double duration;
  double amplitude;
  double frequency;
};

using PulseEvent = std::variant<InstantFlip, InstantHalfFlip, RectPulse, Drive>;

double event_start(const PulseEvent& e);
double event_end(const PulseEvent& e);

class PulseSchedule {
 public:
  explicit PulseSchedule(double total_time);

  /// Inserts keeping events ordered by start time (stable for ties).
  PulseSchedule& add(PulseEvent event);

  /// Throws ScheduleOverlapError when events leave [0, total_time] or extended events overlap.
  void validate() const;

  const std::vector<PulseEvent>& events() const { return events_; }
  double total_time() const { return total_time_; }

 private:
  double total_time_;
  std::vector<PulseEvent> events_;
};

/// Eigendecomposition of a hermitian H, reused for exp(-i H t) at any t.
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const OperatorMatrix& h);

  CVector apply(const CVector& psi, double duration) const;
  OperatorMatrix unitary(double duration) const;
  int dim() const { return static_cast<int>(energies_.size()); }
  const Eigen::VectorXd& energies() const { return energies_; }
  const CMatrix& vectors() const { return vectors_; }

 private:
  Eigen::VectorXd energies_;
  CMatrix vectors_;
};

OperatorMatrix instant_flip(const CompositeSpace& space);
OperatorMatrix half_flip(const CompositeSpace& space);

StateVector propagate_static(const OperatorMatrix& h, double duration, const StateVector& psi);

StateVector apply_schedule(const PulseSchedule& schedule, const SystemParams& params, const StateVector& psi);

struct DriveOptions {
  double tolerance = 1e-9;
  int max_halvings = 20;
};

/// Integrates i d(psi)/dt = H_detect(t) psi from `start` to `start + duration`.
StateVector propagate_driven(const SystemParams& params, double start, double duration, const StateVector& psi,
                             const DriveOptions& options = {});

class DensityMatrix {
 public:
  /// Checks trace, hermiticity and positivity; throws DimensionError otherwise.
  static DensityMatrix from_matrix(CMatrix entries);
  static DensityMatrix pure(const StateVector& psi);

  const CMatrix& entries() const { return rho_; }
  int dim() const { return static_cast<int>(rho_.rows()); }
  cplx expectation(const CMatrix& op) const { return (rho_ * op).trace(); }

 private:
  explicit DensityMatrix(CMatrix rho) : rho_(std::move(rho)) {}
  CMatrix rho_;
};

struct BathParams {
  double gamma = 0.0;
  double nbar = 0.0;

  /// gamma = omega0 / Q and nbar from the Bose factor at k_B T = params.temperature.
  static BathParams from_system(const SystemParams& params);
};

/// 1 / (exp(omega / kT) - 1); zero at kT = 0.
double bose_occupation(double omega, double kt);

struct LindbladOptions {
  double tolerance = 1e-8;
  int max_halvings = 20;
};

inline constexpr int kMaxDensityDim = 256;

/// d(rho)/dt = -i[H, rho] + gamma (nbar + 1) D[a] rho + gamma nbar D[a^dag] rho, fixed-step RK4
/// with step halving until successive results agree in trace norm.
DensityMatrix lindblad_evolve(const OperatorMatrix& h, const OperatorMatrix& lower, const BathParams& bath,
                              const DensityMatrix& rho, double duration, const LindbladOptions& options = {});

/// Oscillator-only overload: the jump operator is the ladder operator of H's space.
DensityMatrix lindblad_evolve(const OperatorMatrix& h, const BathParams& bath, const DensityMatrix& rho,
                              double duration, const LindbladOptions& options = {});

double trace_norm(const CMatrix& hermitian);

}  // namespace catsim
