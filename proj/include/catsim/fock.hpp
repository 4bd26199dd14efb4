#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "catsim/errors.hpp"

namespace catsim {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Oscillator Hilbert space spanned by Fock states |0> .. |n_trunc - 1>.
class FockSpace {
 public:
  explicit FockSpace(int n_trunc);

  int n_trunc() const { return n_trunc_; }
  int dim() const { return n_trunc_; }

  /// Top Fock indices excluded from unitarity checks: 10% of the space, at least one.
  int guard_band() const;
  /// Fock indices below this value form the interior block.
  int interior() const { return n_trunc_ - guard_band(); }

  bool operator==(const FockSpace&) const = default;

 private:
  int n_trunc_;
};

/// Complex amplitude vector. Normalized on construction through `normalized`.
class StateVector {
 public:
  StateVector() = default;

  static StateVector normalized(CVector amplitudes);
  /// Adopts amplitudes as they are; for results of norm-preserving maps.
  static StateVector adopt(CVector amplitudes);
  static StateVector basis(int dim, int index);

  const CVector& amplitudes() const { return amps_; }
  int dim() const { return static_cast<int>(amps_.size()); }
  double norm() const { return amps_.norm(); }
  cplx operator[](int i) const { return amps_(i); }

  /// <this|other>
  cplx inner(const StateVector& other) const;

 private:
  explicit StateVector(CVector amps) : amps_(std::move(amps)) {}
  CVector amps_;
};

/// Dense square operator with declarative hermitian/unitary flags.
class OperatorMatrix {
 public:
  OperatorMatrix() = default;
  explicit OperatorMatrix(CMatrix entries, bool hermitian = false, bool unitary = false);

  /// Flags the matrix hermitian after checking max |M - M^dagger| < 1e-12.
  static OperatorMatrix hermitian(CMatrix entries);
  static OperatorMatrix identity(int dim);

  const CMatrix& entries() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  bool is_hermitian() const { return hermitian_; }
  bool is_unitary() const { return unitary_; }

  OperatorMatrix adjoint() const;
  OperatorMatrix operator*(const OperatorMatrix& rhs) const;
  CVector operator*(const CVector& v) const { return m_ * v; }
  StateVector apply_unitary(const StateVector& psi) const;

 private:
  CMatrix m_;
  bool hermitian_ = false;
  bool unitary_ = false;
};

struct LadderOps {
  OperatorMatrix lower;
  OperatorMatrix raise;
  OperatorMatrix number;
};

LadderOps ladder_ops(const FockSpace& space);

/// Parity exp(i pi n) = diag((-1)^n).
OperatorMatrix parity(const FockSpace& space);

/// Smallest n_trunc allowed for amplitudes up to |alpha_max|: ceil(|a|^2 + 8|a| + 20).
int truncation_requirement(double alpha_max);

/// Throws TruncationError when `space` is too small for |alpha_max|.
void check_truncation(double alpha_max, const FockSpace& space);

StateVector coherent_state(cplx alpha, const FockSpace& space);

/// exp(alpha a^dagger - conj(alpha) a) on the truncated space.
OperatorMatrix displacement(cplx alpha, const FockSpace& space);

/// exp(scale * M). Hermitian inputs are diagonalized; others use scaling and squaring
/// with a Pade approximant.
OperatorMatrix matrix_exponential(const OperatorMatrix& m, cplx scale);

inline constexpr int kMaxExponentialDim = 4096;

// Comparison helpers shared by the operator-identity checks.

double max_abs_diff(const CMatrix& a, const CMatrix& b);
double hermiticity_defect(const CMatrix& m);

/// Indices whose Fock label (index mod n_trunc) is below the interior limit, for a
/// space made of `blocks` stacked copies of the oscillator.
std::vector<int> interior_indices(const FockSpace& space, int blocks = 1);

/// max |(M^dagger M - I)_ij| over i, j in `keep`.
double unitarity_defect(const CMatrix& m, const std::vector<int>& keep);

/// Max deviation between the `keep` blocks of a and b after removing the global phase,
/// estimated from the largest-magnitude element of b's block.
double phase_aligned_deviation(const CMatrix& a, const CMatrix& b, const std::vector<int>& keep);

}  // namespace catsim
