#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "kpoint/linalg.hpp"

namespace kpoint {

// Gegenbauer polynomials P_l^n normalized by P_l^n(1) = 1, i.e. Jacobi
// polynomials with alpha = beta = (n-3)/2 divided by their value at 1.
//   P_0 = 1, P_1 = t,
//   (l+n-2) P_{l+1} = (2l+n-2) t P_l - l P_{l-1}.
class GegenbauerEvaluator {
 public:
  GegenbauerEvaluator(int n, int max_degree);

  int dimension() const { return n_; }
  int max_degree() const { return max_degree_; }

  // P_0(t), ..., P_max(t).
  template <class T>
  std::vector<T> values(const T& t) const {
    return homogeneous_values(t, T(1));
  }

  // H_l(s, w) = w^{l/2} P_l(s / sqrt(w)), which is a polynomial in (s, w):
  //   (l+n-2) H_{l+1} = (2l+n-2) s H_l - l w H_{l-1}.
  // At w = 0 it reduces to lead_l s^l without any division by w.
  template <class T>
  std::vector<T> homogeneous_values(const T& s, const T& w) const {
    std::vector<T> h;
    h.reserve(max_degree_ + 1);
    h.push_back(T(1));
    if (max_degree_ >= 1) h.push_back(s);
    for (int l = 1; l < max_degree_; ++l) {
      T next = T(2 * l + n_ - 2) * s * h[l] - T(l) * w * h[l - 1];
      next /= T(l + n_ - 2);
      h.push_back(std::move(next));
    }
    return h;
  }

 private:
  int n_;
  int max_degree_;
};

template <class T>
T gegenbauer(int n, int l, const T& t) {
  if (n < 2 || l < 0) throw DomainError("gegenbauer needs n >= 2 and l >= 0");
  if (std::abs(to_double(t)) > 1 + 1e-12) throw DomainError("gegenbauer argument outside [-1, 1]");
  return GegenbauerEvaluator(n, l).values(t)[l];
}

template <class T>
T dot(std::span<const T> u, std::span<const T> v) {
  T s(0);
  for (size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

// P_l^{n,m}(t, u, v) = ((1-|u|^2)(1-|v|^2))^{l/2}
//                      * P_l^{n-m}((t - u.v) / sqrt((1-|u|^2)(1-|v|^2))),
// evaluated through the homogeneous recurrence so it stays polynomial on the
// whole closed ball, including |u| = 1.
template <class T>
std::vector<T> gegenbauer_multivariate_all(int n, int m, int max_l, const T& t,
                                           std::span<const T> u, std::span<const T> v) {
  if (m < 0 || m > n - 2) throw DomainError("multivariate Gegenbauer needs 0 <= m <= n-2");
  if (static_cast<int>(u.size()) != m || static_cast<int>(v.size()) != m)
    throw DimensionMismatch("coordinate vectors must have length m");
  T s = t - dot(u, v);
  T w = (T(1) - dot(u, u)) * (T(1) - dot(v, v));
  return GegenbauerEvaluator(n - m, max_l).homogeneous_values(s, w);
}

template <class T>
T gegenbauer_multivariate(int n, int m, int l, const T& t, std::span<const T> u,
                          std::span<const T> v) {
  if (l < 0) throw DomainError("negative degree");
  return gegenbauer_multivariate_all(n, m, l, t, u, v)[l];
}

// Monomials in m variables of total degree <= degree, graded and, within a
// degree, lexicographic with the first variable's exponent decreasing:
// 1, x, y, x^2, xy, y^2, ... The basis of a lower degree is a prefix.
class MonomialBasis {
 public:
  MonomialBasis(int m, int degree);

  int variables() const { return m_; }
  int degree() const { return degree_; }
  size_t size() const { return exponents_.size(); }
  const std::vector<std::vector<int>>& exponents() const { return exponents_; }
  // Number of leading entries spanning the monomials of degree <= g.
  size_t prefix_size(int g) const;

  template <class T>
  std::vector<T> evaluate(std::span<const T> u) const {
    if (static_cast<int>(u.size()) != m_) throw DimensionMismatch("monomial vector arity");
    std::vector<std::vector<T>> powers(m_);
    for (int i = 0; i < m_; ++i) {
      powers[i].push_back(T(1));
      for (int e = 1; e <= degree_; ++e) powers[i].push_back(powers[i].back() * u[i]);
    }
    std::vector<T> z;
    z.reserve(exponents_.size());
    for (const auto& ex : exponents_) {
      T p(1);
      for (int i = 0; i < m_; ++i)
        if (ex[i] > 0) p *= powers[i][ex[i]];
      z.push_back(std::move(p));
    }
    return z;
  }

 private:
  int m_;
  int degree_;
  std::vector<std::vector<int>> exponents_;
};

size_t binomial(int n, int k);

// Y_l^{n,m}(t, u, v) = P_l^{n,m}(t, u, v) z_{d-l}(u) z_{d-l}(v)^T.
template <class T>
Matrix<T> y_matrix(int n, int m, int l, int d, const T& t, std::span<const T> u,
                   std::span<const T> v) {
  if (l < 0 || l > d) throw DomainError("y_matrix needs 0 <= l <= d");
  T p = gegenbauer_multivariate(n, m, l, t, u, v);
  MonomialBasis basis(m, d - l);
  std::vector<T> zu = basis.evaluate(u);
  std::vector<T> zv = basis.evaluate(v);
  const Eigen::Index N = static_cast<Eigen::Index>(zu.size());
  Matrix<T> y(N, N);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < N; ++j) y(i, j) = p * (zu[i] * zv[j]);
  return y;
}

}  // namespace kpoint
