#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <random>

#include "kpoint/polybasis.hpp"

using namespace kpoint;
using Quad = boost::multiprecision::cpp_bin_float_50;

namespace {

std::vector<double> random_unit(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd;
  std::vector<double> x(static_cast<size_t>(n));
  double s = 0;
  for (double& v : x) {
    v = nd(rng);
    s += v * v;
  }
  for (double& v : x) v /= std::sqrt(s);
  return x;
}

// Definition with the square root, used as an independent check away from
// the singular surface.
double multivariate_by_definition(int n, int m, int l, double t, const std::vector<double>& u,
                                  const std::vector<double>& v) {
  double uu = 0, vv = 0, uv = 0;
  for (int i = 0; i < m; ++i) {
    uu += u[i] * u[i];
    vv += v[i] * v[i];
    uv += u[i] * v[i];
  }
  double w = (1 - uu) * (1 - vv);
  double r = std::sqrt(w);
  return std::pow(r, l) * gegenbauer(n - m, l, (t - uv) / r);
}

}  // namespace

TEST_CASE("gegenbauer examples") {
  CHECK(gegenbauer(8, 0, 0.37) == doctest::Approx(1));
  CHECK(gegenbauer(5, 1, 0.3) == doctest::Approx(0.3));
  CHECK(gegenbauer(5, 2, 0.0) == doctest::Approx(-0.25));
  CHECK_THROWS_AS(gegenbauer(5, 2, 1.1), DomainError);
  CHECK_THROWS_AS(gegenbauer(1, 2, 0.5), DomainError);
}

TEST_CASE("gegenbauer second degree matches Gram-Schmidt closed form") {
  for (int n = 3; n <= 12; ++n)
    for (double t : {-0.9, -0.3, 0.0, 0.25, 0.8})
      CHECK(gegenbauer(n, 2, t) == doctest::Approx((n * t * t - 1) / (n - 1)).epsilon(1e-13));
}

TEST_CASE("normalization at t = 1") {
  PrecisionScope scope(256);
  HighReal tol = boost::multiprecision::ldexp(HighReal(1), 4 - 256);
  for (int n = 2; n <= 32; ++n) {
    auto vals = GegenbauerEvaluator(n, 12).values(HighReal(1));
    for (const HighReal& v : vals) CHECK(boost::multiprecision::abs(v - 1) <= tol);
  }
}

TEST_CASE("orthogonality against quadrature") {
  boost::math::quadrature::tanh_sinh<Quad> integrator;
  const Quad tol("1e-20");
  for (int n = 4; n <= 12; ++n) {
    GegenbauerEvaluator ev(n, 8);
    Quad expo = Quad(n - 3) / 2;
    for (int l = 0; l <= 8; ++l) {
      for (int lp = l + 1; lp <= 8; ++lp) {
        auto f = [&](const Quad& t) {
          auto p = ev.values(t);
          return p[l] * p[lp] * boost::multiprecision::pow(1 - t * t, expo);
        };
        Quad val = integrator.integrate(f, Quad(-1), Quad(1), Quad("1e-35"));
        CHECK(boost::multiprecision::abs(val) <= tol);
      }
    }
  }
}

TEST_CASE("multivariate polynomial special cases") {
  std::vector<double> none;
  for (int l = 0; l <= 6; ++l)
    CHECK(gegenbauer_multivariate<double>(7, 0, l, 0.3, none, none) ==
          doctest::Approx(gegenbauer(7, l, 0.3)));

  std::vector<double> u = {0.3, -0.4};
  double nu = 0.25;
  for (int l = 0; l <= 5; ++l)
    CHECK(gegenbauer_multivariate<double>(9, 2, l, 1.0, u, u) ==
          doctest::Approx(std::pow(1 - nu, l)).epsilon(1e-12));

  std::vector<double> unit = {0.6, 0.8};
  std::vector<double> v = {0.1, 0.2};
  double t = unit[0] * v[0] + unit[1] * v[1];
  for (int l = 1; l <= 5; ++l) {
    CHECK(gegenbauer_multivariate<double>(9, 2, l, t, unit, v) == doctest::Approx(0).epsilon(1e-14));
    // approach the unit sphere from inside along u -> unit
    double scale = 1 - 1e-7;
    std::vector<double> near = {unit[0] * scale, unit[1] * scale};
    CHECK(std::abs(multivariate_by_definition(9, 2, l, t, near, v)) < 1e-3);
  }
  CHECK_THROWS_AS(gegenbauer_multivariate<double>(4, 3, 1, 0.0, std::vector<double>(3),
                                                  std::vector<double>(3)),
                  DomainError);
}

TEST_CASE("multivariate agrees with the square-root definition inside the ball") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 5 + trial % 6;
    int m = trial % 4;
    if (m > n - 2) continue;
    std::vector<double> u(m), v(m);
    for (int i = 0; i < m; ++i) {
      u[i] = U(rng) / std::sqrt(m + 1.0);
      v[i] = U(rng) / std::sqrt(m + 1.0);
    }
    double uv = 0;
    for (int i = 0; i < m; ++i) uv += u[i] * v[i];
    double t = uv + 0.2 * U(rng);
    for (int l = 0; l <= 6; ++l)
      CHECK(gegenbauer_multivariate<double>(n, m, l, t, u, v) ==
            doctest::Approx(multivariate_by_definition(n, m, l, t, u, v)).epsilon(1e-10));
  }
}

TEST_CASE("polynomial evaluation stays finite on the unit sphere") {
  PrecisionScope scope(256);
  std::vector<HighReal> u = {HighReal(1), HighReal(0)};
  std::vector<HighReal> v = {HighReal(0), HighReal(1)};
  for (int l = 0; l <= 6; ++l) {
    HighReal val = gegenbauer_multivariate<HighReal>(8, 2, l, HighReal("0.3"), u, v);
    CHECK(is_finite(val));
  }
}

TEST_CASE("monomial vectors") {
  MonomialBasis b0(0, 4);
  CHECK(b0.size() == 1);
  CHECK(b0.evaluate<double>(std::vector<double>{}) == std::vector<double>{1.0});

  MonomialBasis b1(1, 2);
  CHECK(b1.evaluate<double>(std::vector<double>{0.5}) == std::vector<double>{1.0, 0.5, 0.25});

  MonomialBasis b2(2, 1);
  CHECK(b2.evaluate<double>(std::vector<double>{2.0, 3.0}) == std::vector<double>{1.0, 2.0, 3.0});

  MonomialBasis b22(2, 2);
  CHECK(b22.evaluate<double>(std::vector<double>{2.0, 3.0}) ==
        std::vector<double>{1.0, 2.0, 3.0, 4.0, 6.0, 9.0});

  for (int m = 0; m <= 4; ++m)
    for (int l = 0; l <= 6; ++l) {
      MonomialBasis b(m, l);
      CHECK(b.size() == binomial(l + m, m));
      for (int g = 0; g <= l; ++g) {
        MonomialBasis low(m, g);
        CHECK(b.prefix_size(g) == low.size());
        for (size_t i = 0; i < low.size(); ++i) CHECK(low.exponents()[i] == b.exponents()[i]);
      }
    }
}

TEST_CASE("y matrix examples") {
  std::vector<double> one = {1.0};
  Matrix<double> y0 = y_matrix<double>(10, 1, 0, 5, 1.0, one, one);
  CHECK(y0.rows() == 6);
  CHECK(y0 == Matrix<double>::Ones(6, 6));
  Matrix<double> y3 = y_matrix<double>(10, 1, 3, 5, 1.0, one, one);
  CHECK(y3.rows() == 3);
  CHECK(y3 == Matrix<double>::Zero(3, 3));
  std::vector<double> u = {0.1, 0.2}, v = {-0.3, 0.4};
  CHECK(y_matrix<double>(10, 2, 2, 5, 0.1, u, v).rows() == 10);
}

TEST_CASE("y matrix transpose symmetry") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  for (int trial = 0; trial < 50; ++trial) {
    int m = trial % 4;
    std::vector<double> u(m), v(m);
    for (int i = 0; i < m; ++i) {
      u[i] = U(rng);
      v[i] = U(rng);
    }
    double t = U(rng);
    for (int l = 0; l <= 5; ++l) {
      Matrix<double> a = y_matrix<double>(12, m, l, 5, t, u, v);
      Matrix<double> b = y_matrix<double>(12, m, l, 5, t, v, u);
      CHECK(a == b.transpose());
    }
  }
}

TEST_CASE("positivity of the multivariate kernel") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 5 + trial % 6;
    int m = trial % 4;
    int l = trial % 7;
    int size = 2 + trial % 11;
    // random orthonormal rows E via Gram-Schmidt
    std::vector<std::vector<double>> E;
    while (static_cast<int>(E.size()) < m) {
      auto r = random_unit(rng, n);
      for (const auto& e : E) {
        double d = 0;
        for (int i = 0; i < n; ++i) d += r[i] * e[i];
        for (int i = 0; i < n; ++i) r[i] -= d * e[i];
      }
      double s = 0;
      for (double x : r) s += x * x;
      for (double& x : r) x /= std::sqrt(s);
      E.push_back(r);
    }
    std::vector<std::vector<double>> C, proj;
    for (int c = 0; c < size; ++c) {
      C.push_back(random_unit(rng, n));
      std::vector<double> p(m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) p[i] += E[i][j] * C.back()[j];
      proj.push_back(p);
    }
    Matrix<double> K(size, size);
    for (int a = 0; a < size; ++a)
      for (int b = 0; b < size; ++b) {
        double t = 0;
        for (int j = 0; j < n; ++j) t += C[a][j] * C[b][j];
        K(a, b) = gegenbauer_multivariate<double>(n, m, l, t, proj[a], proj[b]);
      }
    CHECK(min_eig_estimate(K) >= -1e-9);
  }
}
