#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kpoint/interval.hpp"
#include "kpoint/linalg.hpp"

using namespace kpoint;

namespace {

HighReal exact(double x) { return make_high(x, 4096); }

}  // namespace

TEST_CASE("interval arithmetic on exact integers") {
  PrecisionScope scope(256);
  Interval s = Interval(1) + Interval(2);
  CHECK(s.lo() == 3);
  CHECK(s.hi() == 3);
  Interval z = Interval(0) * Interval(HighReal(-5), HighReal(7));
  CHECK(z.lo() == 0);
  CHECK(z.hi() == 0);
}

TEST_CASE("interval sqrt encloses sqrt(2) tightly") {
  PrecisionScope scope(256);
  Interval r = sqrt(Interval(2));
  HighReal oracle = make_high(Rational(2), 2048);
  mpfr_sqrt(oracle.backend().data(), oracle.backend().data(), MPFR_RNDN);
  CHECK(r.lo() <= oracle);
  CHECK(oracle <= r.hi());
  HighReal bound = make_high(Rational(Integer(1), Integer(1) << 254), 64);
  CHECK(r.width() <= bound);
  CHECK_FALSE(r.partial());
}

TEST_CASE("interval errors") {
  PrecisionScope scope(128);
  Interval a(1);
  CHECK_THROWS_AS(a / Interval(HighReal(-1), HighReal(1)), DivisionByIntervalContainingZero);
  CHECK_THROWS_AS(sqrt(Interval(HighReal(-3), HighReal(-1))), NegativeSqrt);
  Interval p = sqrt(Interval(HighReal(-1), HighReal(4)));
  CHECK(p.partial());
  CHECK(p.lo() == 0);
  CHECK(p.hi() == 2);
}

TEST_CASE("enclosure of random double operations") {
  PrecisionScope scope(64);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-10, 10);
  for (int trial = 0; trial < 500; ++trial) {
    double a0 = dist(rng), a1 = dist(rng), b0 = dist(rng), b1 = dist(rng);
    if (a0 > a1) std::swap(a0, a1);
    if (b0 > b1) std::swap(b0, b1);
    Interval a(make_high(a0, 64), make_high(a1, 64));
    Interval b(make_high(b0, 64), make_high(b1, 64));
    std::uniform_real_distribution<double> ta(a0, a1), tb(b0, b1);
    double x = ta(rng), y = tb(rng);
    HighReal ex = exact(x), ey = exact(y);
    CHECK((a + b).contains(ex + ey));
    CHECK((a - b).contains(ex - ey));
    CHECK((a * b).contains(ex * ey));
    if (!b.contains_zero()) CHECK((a / b).contains(ex / ey));
    if (a0 >= 0) CHECK(sqrt(a).contains(boost::multiprecision::sqrt(ex)));
  }
}

TEST_CASE("cholesky examples") {
  PrecisionScope scope(256);
  Matrix<HighReal> id = Matrix<HighReal>::Identity(3, 3);
  CHECK(cholesky(id) == id);

  Matrix<HighReal> m(2, 2);
  HighReal a = make_high(Rational(1, 5), 256);
  m << HighReal(1), a, a, HighReal(1);
  Matrix<HighReal> L = cholesky(m);
  CHECK(L(0, 0) == 1);
  CHECK(L(0, 1) == 0);
  CHECK(boost::multiprecision::abs(L(1, 0) - a) < HighReal("1e-70"));
  HighReal expected = boost::multiprecision::sqrt(HighReal(24)) / 5;
  CHECK(boost::multiprecision::abs(L(1, 1) - expected) < HighReal("1e-70"));

  Matrix<HighReal> ones = Matrix<HighReal>::Ones(2, 2);
  CHECK_THROWS_AS(cholesky(ones), NotPositiveDefinite);
  Matrix<double> onesd = Matrix<double>::Ones(2, 2);
  CHECK_THROWS_AS(cholesky(onesd), NotPositiveDefinite);
}

TEST_CASE("cholesky reconstructs random positive definite matrices") {
  PrecisionScope scope(256);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    int n = 2 + trial % 7;
    Matrix<HighReal> A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = HighReal(nd(rng));
    Matrix<HighReal> m = A * A.transpose() + Matrix<HighReal>::Identity(n, n) / 10;
    Matrix<HighReal> L = cholesky(m);
    Matrix<HighReal> diff = L * L.transpose() - m;
    HighReal maxdiff = 0, maxm = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        maxdiff = std::max(maxdiff, HighReal(boost::multiprecision::abs(diff(i, j))));
        maxm = std::max(maxm, HighReal(boost::multiprecision::abs(m(i, j))));
      }
    HighReal tol = boost::multiprecision::ldexp(maxm, 10 - 256);
    CHECK(maxdiff <= tol);
    for (int i = 0; i < n; ++i) CHECK(L(i, i) > 0);
  }
}

TEST_CASE("min eigenvalue estimates") {
  PrecisionScope scope(128);
  CHECK(min_eig_estimate<double>(Matrix<double>::Identity(3, 3)) == doctest::Approx(1));
  Matrix<double> d = Matrix<double>::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = -2;
  CHECK(min_eig_estimate(d) == doctest::Approx(-2));
  Matrix<HighReal> ones = Matrix<HighReal>::Ones(5, 5);
  CHECK(boost::multiprecision::abs(min_eig_estimate(ones)) < HighReal("1e-30"));
}

TEST_CASE("interval psd certification") {
  PrecisionScope scope(256);
  auto id = to_interval(Matrix<HighReal>::Identity(4, 4));
  auto delta = interval_psd_certify(id);
  REQUIRE(delta.has_value());
  CHECK(*delta > 0);
  CHECK(*delta <= 1);

  Matrix<HighReal> d = Matrix<HighReal>::Zero(2, 2);
  d(0, 0) = 1;
  d(1, 1) = HighReal("-1e-3");
  CHECK_FALSE(interval_psd_certify(to_interval(d)).has_value());

  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  Matrix<HighReal> A(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) A(i, j) = HighReal(nd(rng));
  Matrix<HighReal> m = A * A.transpose();
  Matrix<Interval> mi(5, 5);
  HighReal half_width("5e-31");
  for (int i = 0; i < 5; ++i)
    for (int j = i; j < 5; ++j) {
      mi(i, j) = Interval(m(i, j) - half_width, m(i, j) + half_width);
      mi(j, i) = mi(i, j);
    }
  CHECK(interval_psd_certify(mi).has_value());
}

TEST_CASE("psd certification never accepts clearly indefinite matrices") {
  PrecisionScope scope(128);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    int n = 2 + trial % 5;
    Matrix<HighReal> m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) m(i, j) = m(j, i) = HighReal(nd(rng));
    HighReal width("1e-20");
    Matrix<Interval> mi(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) mi(i, j) = Interval(m(i, j) - width / 2, m(i, j) + width / 2);
    if (min_eig_estimate(m) < -10 * width) CHECK_FALSE(interval_psd_certify(mi).has_value());
  }
}

TEST_CASE("rational parsing") {
  CHECK(parse_rational("1/5") == Rational(1, 5));
  CHECK(parse_rational("-5/13") == Rational(-5, 13));
  CHECK(parse_rational("3") == Rational(3));
  CHECK_THROWS_AS(parse_rational("0.2"), ParseError);
  CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
  CHECK(format_rational(Rational(-2, 6)) == "-1/3");
}

TEST_CASE("precision scopes nest and restore") {
  unsigned outer = PrecisionScope::current_bits();
  {
    PrecisionScope a(512);
    CHECK(PrecisionScope::current_bits() == 512);
    {
      PrecisionScope b(128);
      CHECK(PrecisionScope::current_bits() == 128);
      HighReal x(1);
      CHECK(precision_of(x) >= 128);
      CHECK(precision_of(x) < 140);
    }
    CHECK(PrecisionScope::current_bits() == 512);
  }
  CHECK(PrecisionScope::current_bits() == outer);
}
