#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>

#include "kpoint/frames.hpp"

using namespace kpoint;

namespace {

std::shared_ptr<const OrbitCatalog> catalog_15() {
  static auto cat = std::make_shared<const OrbitCatalog>(
      enumerate_orbits(InnerProductSet::equiangular(Rational(1, 5)), 5, 60));
  return cat;
}

}  // namespace

TEST_CASE("frame coordinates reproduce the representative") {
  auto D = InnerProductSet::equiangular(Rational(1, 5));
  for (int m = 1; m <= 3; ++m)
    for (const OrbitRep& r : catalog_15()->reps(m)) {
      Frame<double> f(r, D);
      auto g = r.pattern.gram(D);
      for (int i = 0; i < m; ++i) {
        std::vector<double> gi;
        for (int j = 0; j < m; ++j) gi.push_back(g[i][j].convert_to<double>());
        auto u = f.coords(gi);
        CHECK(dot<double>(u, u) == doctest::Approx(1).epsilon(1e-13));
        for (int j = 0; j < m; ++j) CHECK(u[j] == doctest::Approx(f.chol()(i, j)).epsilon(1e-13));
      }
    }
}

TEST_CASE("frame coordinates are projections of an explicit point") {
  auto D = InnerProductSet::equiangular(Rational(1, 5));
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  for (const OrbitRep& r : catalog_15()->reps(3)) {
    Frame<double> f(r, D);
    const int m = 3, n = 6;
    // rows of the Cholesky factor embedded in R^n
    std::vector<std::vector<double>> pts(m, std::vector<double>(n, 0.0));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j <= i; ++j) pts[i][j] = f.chol()(i, j);
    std::vector<double> x(n);
    double s = 0;
    for (double& v : x) {
      v = nd(rng);
      s += v * v;
    }
    for (double& v : x) v /= std::sqrt(s);
    std::vector<double> g(m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) g[i] += pts[i][j] * x[j];
    auto u = f.coords(g);
    for (int i = 0; i < m; ++i) CHECK(u[i] == doctest::Approx(x[i]).epsilon(1e-12));
  }
}

TEST_CASE("stabilizer averaging is invariant under the stabilizer") {
  auto D = InnerProductSet::equiangular(Rational(1, 5));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-0.2, 0.2);
  for (int m = 2; m <= 3; ++m)
    for (const OrbitRep& r : catalog_15()->reps(m)) {
      Frame<double> f(r, D);
      std::vector<double> gx(m), gy(m);
      for (int i = 0; i < m; ++i) {
        gx[i] = U(rng);
        gy[i] = U(rng);
      }
      for (int l = 0; l <= 3; ++l) {
        Matrix<double> base = averaged_y<double>(f, 12, l, 3, 0.1, gx, gy);
        for (const Permutation& sigma : r.stabilizer) {
          auto px = permute_entries<double>(gx, sigma);
          auto py = permute_entries<double>(gy, sigma);
          Matrix<double> moved = averaged_y<double>(f, 12, l, 3, 0.1, px, py);
          CHECK((moved - base).cwiseAbs().maxCoeff() <= 1e-12);
        }
      }
    }
}

TEST_CASE("frame arity and degenerate representatives") {
  auto D = InnerProductSet::equiangular(Rational(1, 3));
  OrbitCatalog cat = enumerate_orbits(D, 5, 3);
  for (const OrbitRep& r : cat.reps(4)) {
    if (r.full_rank()) continue;
    CHECK_THROWS_AS(Frame<double>(r, D), NotPositiveDefinite);
  }
  Frame<double> f(cat.reps(2)[0], D);
  CHECK_THROWS_AS(f.coords(std::vector<double>{0.1}), DimensionMismatch);
}
