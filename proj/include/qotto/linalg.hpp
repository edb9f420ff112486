// linalg.hpp — Dense complex Hermitian linear algebra: validated operator
// types, eigendecomposition, Gibbs states, unitary propagators, expectations.

#pragma once

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qotto {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace tol {
inline constexpr double kHermiticity = 1e-12;
inline constexpr double kUnitTrace = 1e-10;
inline constexpr double kPositivity = 1e-10;  // eigenvalues >= -kPositivity
inline constexpr double kUnitarity = 1e-10;
inline constexpr double kImagResidue = 1e-10;
}  // namespace tol

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const Matrix& m, double eps = tol::kHermiticity) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.adjoint()) <= eps;
}

inline bool is_unitary(const Matrix& u, double eps = tol::kUnitarity) {
  if (u.rows() != u.cols()) return false;
  Matrix gram = u.adjoint() * u;
  gram.diagonal().array() -= 1.0;
  return max_abs(gram) <= eps;
}

// Square matrix asserted Hermitian (element-wise, 1e-12) at construction.
class HermitianOperator {
 public:
  explicit HermitianOperator(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() == 0 || entries_.rows() != entries_.cols())
      throw std::invalid_argument("HermitianOperator: matrix must be square and non-empty");
    if (!is_hermitian(entries_))
      throw std::invalid_argument("HermitianOperator: matrix is not Hermitian");
  }

  Eigen::Index dim() const { return entries_.rows(); }
  const Matrix& matrix() const { return entries_; }

 private:
  Matrix entries_;
};

// Hermitian, unit-trace matrix. Hermiticity and trace are validated on every
// construction; positive semidefiniteness costs a full eigendecomposition and
// is left to is_positive_semidefinite (the unitary maps applied by the engines
// preserve it).
class DensityOperator {
 public:
  explicit DensityOperator(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() == 0 || entries_.rows() != entries_.cols())
      throw std::invalid_argument("DensityOperator: matrix must be square and non-empty");
    if (!is_hermitian(entries_))
      throw std::invalid_argument("DensityOperator: matrix is not Hermitian");
    const Complex tr = entries_.trace();
    if (std::abs(tr - Complex(1.0, 0.0)) > tol::kUnitTrace)
      throw std::invalid_argument("DensityOperator: trace differs from 1 by more than 1e-10");
  }

  Eigen::Index dim() const { return entries_.rows(); }
  const Matrix& matrix() const { return entries_; }

 private:
  Matrix entries_;
};

struct Spectrum {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // corresponding columns, unitary
};

namespace detail {
// LAPACK divide-and-conquer pays off only beyond small dimensions; below the
// threshold Eigen's solver avoids the call overhead.
inline constexpr Eigen::Index kLapackMinDim = 32;
}  // namespace detail

inline Spectrum eigh(const HermitianOperator& op) {
  const Matrix& h = op.matrix();
  const Eigen::Index n = h.rows();
  if (n >= detail::kLapackMinDim) {
    Spectrum s;
    s.eigenvectors = h;
    s.eigenvalues.resize(n);
    const lapack_int info =
        LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n),
                       s.eigenvectors.data(), static_cast<lapack_int>(n),
                       s.eigenvalues.data());
    if (info == 0) return s;
    // fall through to the Eigen solver if LAPACK did not converge
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigh: eigensolver failed to converge");
  return Spectrum{es.eigenvalues(), es.eigenvectors()};
}

// Reusable Hermitian eigensolver: keeps the matrix, eigenvalue, and LAPACK
// scratch buffers alive across calls, so tight stepping loops do not pay an
// allocation per step.
class EighWorkspace {
 public:
  void compute(const Matrix& h) {
    const Eigen::Index n = h.rows();
    if (h.cols() != n || n == 0)
      throw std::invalid_argument("EighWorkspace: matrix must be square");
    if (n < detail::kLapackMinDim) {
      small_.compute(h);
      if (small_.info() != Eigen::Success)
        throw std::runtime_error("EighWorkspace: eigensolver failed to converge");
      vals_ = small_.eigenvalues();
      vecs_ = small_.eigenvectors();
      return;
    }
    if (n != query_dim_) prepare(n);
    vecs_ = h;
    vals_.resize(n);
    const lapack_int info = LAPACKE_zheevd_work(
        LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n), vecs_.data(),
        static_cast<lapack_int>(n), vals_.data(), work_.data(),
        static_cast<lapack_int>(work_.size()), rwork_.data(),
        static_cast<lapack_int>(rwork_.size()), iwork_.data(),
        static_cast<lapack_int>(iwork_.size()));
    if (info != 0)
      throw std::runtime_error("EighWorkspace: zheevd failed");
  }

  const RealVector& eigenvalues() const { return vals_; }
  const Matrix& eigenvectors() const { return vecs_; }

 private:
  void prepare(Eigen::Index n) {
    Complex work_query;
    double rwork_query;
    lapack_int iwork_query;
    Matrix probe(n, n);
    RealVector evals(n);
    const lapack_int info = LAPACKE_zheevd_work(
        LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n), probe.data(),
        static_cast<lapack_int>(n), evals.data(), &work_query, -1,
        &rwork_query, -1, &iwork_query, -1);
    if (info != 0)
      throw std::runtime_error("EighWorkspace: zheevd workspace query failed");
    work_.resize(static_cast<std::size_t>(work_query.real()));
    rwork_.resize(static_cast<std::size_t>(rwork_query));
    iwork_.resize(static_cast<std::size_t>(iwork_query));
    query_dim_ = n;
  }

  Matrix vecs_;
  RealVector vals_;
  std::vector<Complex> work_;
  std::vector<double> rwork_;
  std::vector<lapack_int> iwork_;
  Eigen::Index query_dim_ = -1;
  Eigen::SelfAdjointEigenSolver<Matrix> small_;
};

inline bool is_positive_semidefinite(const DensityOperator& rho,
                                     double eps = tol::kPositivity) {
  const Spectrum s = eigh(HermitianOperator(rho.matrix()));
  return s.eigenvalues(0) >= -eps;
}

// exp(-H/T)/Z, computed in the eigenbasis with the spectrum shifted by its
// minimum so that beta*eps up to ~1e6 cannot underflow the partition function.
// T = 0 returns the uniform mixture over the (numerically) degenerate ground
// eigenspace; T = +infinity gives the maximally mixed state.
inline DensityOperator gibbs_state(const HermitianOperator& h, double temperature) {
  if (std::isnan(temperature) || temperature < 0.0)
    throw std::domain_error("gibbs_state: temperature must be >= 0");
  const Spectrum s = eigh(h);
  const Eigen::Index n = s.eigenvalues.size();
  const double e0 = s.eigenvalues(0);
  RealVector w(n);
  if (temperature == 0.0) {
    const double gap_tol = 1e-9 * std::max(1.0, std::abs(e0));
    for (Eigen::Index i = 0; i < n; ++i)
      w(i) = (s.eigenvalues(i) - e0 <= gap_tol) ? 1.0 : 0.0;
  } else {
    w = (-(s.eigenvalues.array() - e0) / temperature).exp().matrix();
  }
  w /= w.sum();
  Matrix rho = s.eigenvectors * w.asDiagonal() * s.eigenvectors.adjoint();
  return DensityOperator(std::move(rho));
}

inline Matrix propagator_from_spectrum(const Spectrum& s, double t) {
  const Eigen::ArrayXcd phases =
      (Complex(0.0, -1.0) * t * s.eigenvalues.array().cast<Complex>()).exp();
  return s.eigenvectors * phases.matrix().asDiagonal() * s.eigenvectors.adjoint();
}

// U = exp(-i H t) via eigendecomposition; unitary to ~1e-14.
inline Matrix propagator(const HermitianOperator& h, double t) {
  if (!std::isfinite(t))
    throw std::invalid_argument("propagator: time must be finite");
  return propagator_from_spectrum(eigh(h), t);
}

// Tr(H rho). The imaginary residue is a pure-roundoff quantity for Hermitian
// arguments; anything above 1e-10 signals corrupted inputs.
inline double expectation(const HermitianOperator& h, const DensityOperator& rho) {
  if (h.dim() != rho.dim())
    throw std::invalid_argument("expectation: dimension mismatch");
  const Complex tr = h.matrix().cwiseProduct(rho.matrix().transpose()).sum();
  if (std::abs(tr.imag()) > tol::kImagResidue)
    throw std::runtime_error("expectation: imaginary residue exceeds 1e-10");
  return tr.real();
}

// Tr(rho^2) — for Hermitian rho this is the squared Frobenius norm.
inline double purity(const DensityOperator& rho) {
  return rho.matrix().squaredNorm();
}

inline DensityOperator unitary_conjugate(const Matrix& u, const DensityOperator& rho) {
  if (u.rows() != rho.dim() || u.cols() != rho.dim())
    throw std::invalid_argument("unitary_conjugate: dimension mismatch");
  return DensityOperator(u * rho.matrix() * u.adjoint());
}

}  // namespace qotto
