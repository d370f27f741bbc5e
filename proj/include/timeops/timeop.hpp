#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "timeops/types.hpp"

namespace timeops {

/// Direct: entries i / (E_n - E_k), a time operator of diag(E).
/// InverseConjugate: entries i E_n E_k / (E_k - E_n), a time operator of diag(1/E).
enum class TimeOperatorKind { Direct, InverseConjugate };

/// Time-operator matrix on one simple channel, in the channel eigenbasis.
template <typename Scalar>
struct TimeOperatorMatrix {
  MatrixXc<Scalar> data;
  VectorX<Scalar> eigenvalues;
  TimeOperatorKind kind = TimeOperatorKind::Direct;

  Index dimension() const { return data.rows(); }

  /// Diagonal of the operator this matrix is canonically conjugate to:
  /// E for Direct, 1/E for InverseConjugate.
  VectorX<Scalar> generator() const {
    if (kind == TimeOperatorKind::Direct) return eigenvalues;
    return eigenvalues.cwiseInverse();
  }

  Scalar max_abs_entry() const { return dimension() ? data.cwiseAbs().maxCoeff() : Scalar(0); }
};

using TimeOperatorMatrixd = TimeOperatorMatrix<double>;

/// Galapon-type matrix on the channel eigenvalues E (pairwise distinct, basis
/// order = order of E). Throws on repeated values, on a zero value for
/// InverseConjugate, and on channels larger than kMaxDenseDimension.
template <typename Scalar>
TimeOperatorMatrix<Scalar> galapon_matrix(const VectorX<Scalar>& eigenvalues,
                                          TimeOperatorKind kind = TimeOperatorKind::Direct) {
  using C = std::complex<Scalar>;
  const Index n = eigenvalues.size();
  if (n == 0) throw std::invalid_argument("galapon_matrix: empty eigenvalue list");
  if (n > kMaxDenseDimension)
    throw std::invalid_argument("galapon_matrix: channel exceeds the dense size limit");
  for (Index a = 0; a < n; ++a) {
    if (!std::isfinite(eigenvalues[a]))
      throw std::invalid_argument("galapon_matrix: non-finite eigenvalue");
    if (kind == TimeOperatorKind::InverseConjugate && eigenvalues[a] == Scalar(0))
      throw std::invalid_argument("galapon_matrix: zero eigenvalue has no inverse");
  }

  TimeOperatorMatrix<Scalar> t;
  t.eigenvalues = eigenvalues;
  t.kind = kind;
  t.data = MatrixXc<Scalar>::Zero(n, n);
  const C i(0, 1);
  for (Index r = 0; r < n; ++r) {
    for (Index c = r + 1; c < n; ++c) {
      const Scalar er = eigenvalues[r], ec = eigenvalues[c];
      if (er == ec) throw std::invalid_argument("galapon_matrix: repeated eigenvalue");
      const C entry = kind == TimeOperatorKind::Direct ? i / (er - ec) : i * (er * ec) / (ec - er);
      t.data(r, c) = entry;
      t.data(c, r) = std::conj(entry);
    }
  }
  return t;
}

/// Whether sum_n v_n vanishes to 1e-10 ||v||, i.e. v lies in the span of
/// eigenvector differences.
template <typename Derived>
bool in_difference_span(const Eigen::MatrixBase<Derived>& v, double rel_tol = 1e-10) {
  return std::abs(v.sum()) <= rel_tol * v.norm();
}

/// || [H, T] v + i v || with H = diag(generator). Throws std::domain_error
/// when v is outside the difference span.
template <typename Scalar>
Scalar ccr_residual(const VectorX<Scalar>& generator, const MatrixXc<Scalar>& t,
                    const VectorXc<Scalar>& v) {
  if (t.rows() != generator.size() || t.cols() != generator.size() || v.size() != generator.size())
    throw std::invalid_argument("ccr_residual: dimension mismatch");
  if (!in_difference_span(v))
    throw std::domain_error("ccr_residual: vector is not in the span of eigenvector differences");
  const VectorXc<Scalar> h = generator.template cast<std::complex<Scalar>>();
  const VectorXc<Scalar> tv = t * v;
  const VectorXc<Scalar> thv = t * h.cwiseProduct(v);
  const VectorXc<Scalar> r = h.cwiseProduct(tv) - thv + std::complex<Scalar>(0, 1) * v;
  return r.norm();
}

template <typename Scalar>
Scalar ccr_residual(const TimeOperatorMatrix<Scalar>& t, const VectorXc<Scalar>& v) {
  return ccr_residual<Scalar>(t.generator(), t.data, v);
}

/// Block-diagonal assembly of per-channel time operators.
struct BlockOperator {
  std::vector<TimeOperatorMatrixd> blocks;
  std::vector<Index> offsets;

  Index dimension() const;
  std::size_t block_count() const { return blocks.size(); }
  VectorXd generator() const;
  MatrixXcd dense() const;
};

/// Concatenates blocks over one basis; each block keeps its own CCR domain.
BlockOperator direct_sum(std::vector<TimeOperatorMatrixd> blocks);

/// Residual of the commutator identity on the algebraic direct sum of the
/// per-block difference spans. Throws std::domain_error if any block of v is
/// outside its own span.
double ccr_residual(const BlockOperator& op, const VectorXcd& v);

/// Hermitian Toeplitz truncation with entries (i/omega) / (n - m).
template <typename Scalar>
MatrixXc<Scalar> oscillator_toeplitz(Scalar omega, Index n) {
  if (!(omega > Scalar(0))) throw std::invalid_argument("oscillator_toeplitz: omega must be positive");
  if (n < 2) throw std::invalid_argument("oscillator_toeplitz: size must be at least 2");
  if (n > kMaxDenseDimension) throw std::invalid_argument("oscillator_toeplitz: size too large");
  MatrixXc<Scalar> t = MatrixXc<Scalar>::Zero(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c)
      if (r != c) t(r, c) = std::complex<Scalar>(0, 1) / (omega * static_cast<Scalar>(r - c));
  return t;
}

template <typename Scalar>
struct ToeplitzSpectrum {
  VectorX<Scalar> eigenvalues;  // ascending
  Scalar min;
  Scalar max;
};

template <typename Scalar>
ToeplitzSpectrum<Scalar> osc_timeop_spectrum(Scalar omega, Index n) {
  Eigen::SelfAdjointEigenSolver<MatrixXc<Scalar>> solver(oscillator_toeplitz(omega, n),
                                                         Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("osc_timeop_spectrum: eigensolve failed");
  ToeplitzSpectrum<Scalar> out{solver.eigenvalues(), Scalar(0), Scalar(0)};
  out.min = out.eigenvalues[0];
  out.max = out.eigenvalues[n - 1];
  return out;
}

}  // namespace timeops
