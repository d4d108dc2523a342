#include "kpoint/linalg.hpp"

namespace kpoint {

Matrix<HighReal> midpoint(const Matrix<Interval>& m) {
  Matrix<HighReal> out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).mid();
  return out;
}

Matrix<Interval> to_interval(const Matrix<HighReal>& m) {
  Matrix<Interval> out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = Interval::point(m(i, j));
  return out;
}

std::optional<HighReal> interval_psd_certify(const Matrix<Interval>& m) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n) throw DimensionMismatch("psd certification of a non-square matrix");
  if (n == 0) return HighReal(0);

  unsigned bits = m(0, 0).precision();
  HighReal lambda;
  {
    PrecisionScope scope(bits);
    lambda = min_eig_estimate(midpoint(m));
  }

  std::vector<HighReal> shifts;
  if (lambda > 0) {
    HighReal step = lambda / 2;
    for (int i = 0; i < 4; ++i) {
      shifts.push_back(step);
      step /= 16;
    }
  }
  shifts.push_back(HighReal(0));

  for (const HighReal& delta : shifts) {
    Matrix<Interval> shifted = m;
    Interval d = Interval::point(delta);
    for (Eigen::Index i = 0; i < n; ++i) shifted(i, i) -= d;
    try {
      cholesky(shifted);
      return delta;
    } catch (const NotPositiveDefinite&) {
    } catch (const NegativeSqrt&) {
    }
  }
  return std::nullopt;
}

}  // namespace kpoint
