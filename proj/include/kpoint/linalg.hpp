#pragma once

#include <Eigen/Dense>
#include <optional>

#include "kpoint/interval.hpp"
#include "kpoint/numerics.hpp"

namespace kpoint {

template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

// Dense symmetric matrices are plain Eigen matrices whose builders write
// (i, j) and (j, i) from the same value.
template <class T>
using SymMatrix = Matrix<T>;

inline bool certainly_positive(double x) { return x > 0; }
inline bool certainly_positive(const HighReal& x) { return x > 0; }
inline bool certainly_positive(const Interval& x) { return x.lo() > 0; }

using std::sqrt;
using boost::multiprecision::sqrt;

// Lower-triangular L with L L^T = m. For intervals the factor encloses the
// exact factor of every symmetric member of m; any pivot whose lower bound is
// not positive raises NotPositiveDefinite.
template <class T>
Matrix<T> cholesky(const Matrix<T>& m) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n) throw DimensionMismatch("cholesky of a non-square matrix");
  Matrix<T> L = Matrix<T>::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    T pivot = m(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= L(j, k) * L(j, k);
    if (!certainly_positive(pivot))
      throw NotPositiveDefinite("pivot " + std::to_string(j) + " is not positive");
    T d = sqrt(pivot);
    L(j, j) = d;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      T s = m(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / d;
    }
  }
  return L;
}

// Solves L x = b for lower-triangular L.
template <class T>
Vector<T> forward_solve(const Matrix<T>& L, const Vector<T>& b) {
  const Eigen::Index n = L.rows();
  Vector<T> x(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    T s = b(i);
    for (Eigen::Index k = 0; k < i; ++k) s -= L(i, k) * x(k);
    x(i) = s / L(i, i);
  }
  return x;
}

template <class T>
T min_eig_estimate(const Matrix<T>& m) {
  if (m.rows() == 0) throw DimensionMismatch("empty matrix");
  Eigen::SelfAdjointEigenSolver<Matrix<T>> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceFailure("symmetric eigensolver did not converge");
  return es.eigenvalues()(0);
}

Matrix<HighReal> midpoint(const Matrix<Interval>& m);
Matrix<Interval> to_interval(const Matrix<HighReal>& m);

// Returns a shift delta >= 0 such that the interval Cholesky factorization of
// m - delta I succeeds, which proves every symmetric member of m is PSD.
// nullopt means the test was inconclusive.
std::optional<HighReal> interval_psd_certify(const Matrix<Interval>& m);

}  // namespace kpoint
