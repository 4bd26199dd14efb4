#include "catsim/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace catsim {

FockSpace::FockSpace(int n_trunc) : n_trunc_(n_trunc) {
  if (n_trunc < 2) throw DimensionError("FockSpace: n_trunc must be >= 2, got " + std::to_string(n_trunc));
}

int FockSpace::guard_band() const {
  return std::max(1, static_cast<int>(std::ceil(0.1 * n_trunc_)));
}

StateVector StateVector::normalized(CVector amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw DimensionError("StateVector: cannot normalize a zero or non-finite vector");
  amplitudes /= n;
  return StateVector(std::move(amplitudes));
}

StateVector StateVector::adopt(CVector amplitudes) { return StateVector(std::move(amplitudes)); }

StateVector StateVector::basis(int dim, int index) {
  if (index < 0 || index >= dim) throw DimensionError("StateVector::basis: index out of range");
  CVector v = CVector::Zero(dim);
  v(index) = 1.0;
  return StateVector(std::move(v));
}

cplx StateVector::inner(const StateVector& other) const {
  if (dim() != other.dim()) throw DimensionError("StateVector::inner: dimension mismatch");
  return amps_.dot(other.amps_);  // Eigen's dot conjugates the left operand
}

OperatorMatrix::OperatorMatrix(CMatrix entries, bool hermitian, bool unitary)
    : m_(std::move(entries)), hermitian_(hermitian), unitary_(unitary) {
  if (m_.rows() != m_.cols()) throw DimensionError("OperatorMatrix: matrix must be square");
}

OperatorMatrix OperatorMatrix::hermitian(CMatrix entries) {
  const double defect = hermiticity_defect(entries);
  if (defect >= 1e-12) throw DimensionError("OperatorMatrix::hermitian: matrix is not hermitian (defect " + std::to_string(defect) + ")");
  return OperatorMatrix(std::move(entries), true, false);
}

OperatorMatrix OperatorMatrix::identity(int dim) {
  return OperatorMatrix(CMatrix::Identity(dim, dim), true, true);
}

OperatorMatrix OperatorMatrix::adjoint() const {
  return OperatorMatrix(m_.adjoint(), hermitian_, unitary_);
}

OperatorMatrix OperatorMatrix::operator*(const OperatorMatrix& rhs) const {
  if (dim() != rhs.dim()) throw DimensionError("OperatorMatrix product: dimension mismatch");
  return OperatorMatrix(m_ * rhs.m_, false, unitary_ && rhs.unitary_);
}

StateVector OperatorMatrix::apply_unitary(const StateVector& psi) const {
  if (dim() != psi.dim()) throw DimensionError("OperatorMatrix::apply_unitary: dimension mismatch");
  return StateVector::adopt(m_ * psi.amplitudes());
}

LadderOps ladder_ops(const FockSpace& space) {
  const int n = space.n_trunc();
  CMatrix lower = CMatrix::Zero(n, n);
  for (int k = 1; k < n; ++k) lower(k - 1, k) = std::sqrt(static_cast<double>(k));
  CMatrix raise = lower.adjoint();
  CMatrix number = CMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) number(k, k) = static_cast<double>(k);
  return {OperatorMatrix(std::move(lower)), OperatorMatrix(std::move(raise)),
          OperatorMatrix(std::move(number), true, false)};
}

OperatorMatrix parity(const FockSpace& space) {
  CMatrix p = CMatrix::Zero(space.dim(), space.dim());
  for (int k = 0; k < space.dim(); ++k) p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  return OperatorMatrix(std::move(p), true, true);
}

int truncation_requirement(double alpha_max) {
  const double a = std::abs(alpha_max);
  return static_cast<int>(std::ceil(a * a + 8.0 * a + 20.0));
}

void check_truncation(double alpha_max, const FockSpace& space) {
  const int need = truncation_requirement(alpha_max);
  if (space.n_trunc() < need) {
    throw TruncationError("amplitude " + std::to_string(std::abs(alpha_max)) + " needs n_trunc >= " +
                          std::to_string(need) + ", have " + std::to_string(space.n_trunc()));
  }
}

StateVector coherent_state(cplx alpha, const FockSpace& space) {
  check_truncation(std::abs(alpha), space);
  const int n = space.n_trunc();
  CVector v(n);
  // c_k = c_{k-1} alpha / sqrt(k); avoids forming k! explicitly
  v(0) = std::exp(-0.5 * std::norm(alpha));
  for (int k = 1; k < n; ++k) v(k) = v(k - 1) * alpha / std::sqrt(static_cast<double>(k));
  return StateVector::normalized(std::move(v));
}

OperatorMatrix displacement(cplx alpha, const FockSpace& space) {
  check_truncation(std::abs(alpha), space);
  const auto ops = ladder_ops(space);
  // generator G = alpha a^dag - conj(alpha) a is anti-hermitian; exp(G) = exp(i * (-iG))
  CMatrix k = cplx(0, -1) * (alpha * ops.raise.entries() - std::conj(alpha) * ops.lower.entries());
  k = 0.5 * (k + k.adjoint()).eval();
  auto d = matrix_exponential(OperatorMatrix(std::move(k), true, false), cplx(0, 1));
  return OperatorMatrix(d.entries(), false, true);
}

OperatorMatrix matrix_exponential(const OperatorMatrix& m, cplx scale) {
  if (m.dim() > kMaxExponentialDim) {
    throw DimensionError("matrix_exponential: dimension " + std::to_string(m.dim()) + " exceeds " +
                         std::to_string(kMaxExponentialDim));
  }
  const bool unitary_result = m.is_hermitian() && std::abs(scale.real()) == 0.0;
  if (m.is_hermitian()) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m.entries());
    const Eigen::VectorXd& w = es.eigenvalues();
    CVector phases(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) phases(i) = std::exp(scale * w(i));
    const CMatrix& v = es.eigenvectors();
    CMatrix result = v * phases.asDiagonal() * v.adjoint();
    const bool herm_result = scale.imag() == 0.0;
    return OperatorMatrix(std::move(result), herm_result, unitary_result);
  }
  CMatrix scaled = scale * m.entries();
  CMatrix result = scaled.exp();
  return OperatorMatrix(std::move(result), false, false);
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("max_abs_diff: shape mismatch");
  return (a - b).cwiseAbs().maxCoeff();
}

double hermiticity_defect(const CMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("hermiticity_defect: matrix must be square");
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

std::vector<int> interior_indices(const FockSpace& space, int blocks) {
  std::vector<int> keep;
  keep.reserve(static_cast<std::size_t>(blocks * space.interior()));
  for (int b = 0; b < blocks; ++b)
    for (int k = 0; k < space.interior(); ++k) keep.push_back(b * space.n_trunc() + k);
  return keep;
}

namespace {

CMatrix restrict_block(const CMatrix& m, const std::vector<int>& keep) {
  const auto n = static_cast<Eigen::Index>(keep.size());
  CMatrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = m(keep[i], keep[j]);
  return out;
}

}  // namespace

double unitarity_defect(const CMatrix& m, const std::vector<int>& keep) {
  const CMatrix g = m.adjoint() * m;
  const CMatrix block = restrict_block(g, keep);
  return (block - CMatrix::Identity(block.rows(), block.cols())).cwiseAbs().maxCoeff();
}

double phase_aligned_deviation(const CMatrix& a, const CMatrix& b, const std::vector<int>& keep) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("phase_aligned_deviation: shape mismatch");
  const CMatrix ab = restrict_block(a, keep);
  const CMatrix bb = restrict_block(b, keep);
  Eigen::Index r = 0, c = 0;
  bb.cwiseAbs().maxCoeff(&r, &c);
  cplx phase = 1.0;
  if (std::abs(bb(r, c)) > 0.0 && std::abs(ab(r, c)) > 0.0) {
    phase = ab(r, c) / bb(r, c);
    phase /= std::abs(phase);
  }
  return (ab - phase * bb).cwiseAbs().maxCoeff();
}

}  // namespace catsim
