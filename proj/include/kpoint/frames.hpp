#pragma once

#include <span>
#include <vector>

#include "kpoint/configs.hpp"
#include "kpoint/linalg.hpp"
#include "kpoint/polybasis.hpp"

namespace kpoint {

// Orthonormal coordinates on span(R) derived from the Cholesky factor B of
// Gram(R): a unit vector x with inner products g against the points of R has
// projection coordinates u = B^{-1} g.
template <class T>
class Frame {
 public:
  Frame(const OrbitRep& rep, const InnerProductSet& D) : rep_(&rep) {
    const int m = rep.size();
    auto g = rep.pattern.gram(D);
    Matrix<T> gram(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) gram(i, j) = from_rational<T>(g[i][j]);
    chol_ = cholesky(gram);
  }

  const OrbitRep& rep() const { return *rep_; }
  int size() const { return rep_->size(); }
  const Matrix<T>& chol() const { return chol_; }

  std::vector<T> coords(std::span<const T> g) const {
    const int m = size();
    if (static_cast<int>(g.size()) != m) throw DimensionMismatch("frame coordinate arity");
    std::vector<T> u(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
      T s = g[static_cast<size_t>(i)];
      for (int k = 0; k < i; ++k) s -= chol_(i, k) * u[static_cast<size_t>(k)];
      u[static_cast<size_t>(i)] = s / chol_(i, i);
    }
    return u;
  }

 private:
  const OrbitRep* rep_;
  Matrix<T> chol_;
};

template <class T>
Frame<T> frame_of(const OrbitRep& rep, const InnerProductSet& D) {
  return Frame<T>(rep, D);
}

// (sigma . g)[i] = g[sigma[i]]
template <class T>
std::vector<T> permute_entries(std::span<const T> g, const Permutation& sigma) {
  std::vector<T> out;
  out.reserve(g.size());
  for (int i : sigma) out.push_back(g[static_cast<size_t>(i)]);
  return out;
}

// (1/|S_R|) sum over sigma in S_R of Y_l^{n,m}(t, B^{-1} sigma.g_x, B^{-1} sigma.g_y).
template <class T>
Matrix<T> averaged_y(const Frame<T>& f, int n, int l, int d, const T& t, std::span<const T> g_x,
                     std::span<const T> g_y) {
  const int m = f.size();
  const auto& stab = f.rep().stabilizer;
  const Eigen::Index N = static_cast<Eigen::Index>(binomial(d - l + m, m));
  Matrix<T> acc = Matrix<T>::Zero(N, N);
  for (const Permutation& sigma : stab) {
    std::vector<T> u = f.coords(permute_entries(g_x, sigma));
    std::vector<T> v = f.coords(permute_entries(g_y, sigma));
    acc += y_matrix<T>(n, m, l, d, t, u, v);
  }
  T inv = T(1) / T(static_cast<long>(stab.size()));
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < N; ++j) acc(i, j) *= inv;
  return acc;
}

}  // namespace kpoint
