#include "kpoint/interval.hpp"

#include <algorithm>
#include <ostream>

namespace kpoint {

namespace {

mpfr_ptr raw(HighReal& x) { return x.backend().data(); }
mpfr_srcptr raw(const HighReal& x) { return x.backend().data(); }

HighReal blank(unsigned bits) {
  HighReal x;
  mpfr_set_prec(raw(x), bits);
  return x;
}

void ensure_finite(const Interval& x, const char* op) {
  if (!is_finite(x.lo()) || !is_finite(x.hi()))
    throw NumericalError(std::string("interval overflow in ") + op);
}

}  // namespace

Interval::Interval() : Interval(0L) {}

Interval::Interval(long v) {
  unsigned bits = PrecisionScope::current_bits();
  lo_ = blank(bits);
  hi_ = blank(bits);
  mpfr_set_si(raw(lo_), v, MPFR_RNDD);
  mpfr_set_si(raw(hi_), v, MPFR_RNDU);
}

Interval::Interval(const Rational& q, unsigned bits) : lo_(blank(bits)), hi_(blank(bits)) {
  mpfr_set_q(raw(lo_), q.backend().data(), MPFR_RNDD);
  mpfr_set_q(raw(hi_), q.backend().data(), MPFR_RNDU);
}

Interval::Interval(const HighReal& lo, const HighReal& hi) : lo_(lo), hi_(hi) {
  if (!is_finite(lo) || !is_finite(hi)) throw NumericalError("non-finite interval endpoint");
  if (lo > hi) throw DomainError("interval with lo > hi");
}

Interval Interval::point(const HighReal& x) { return Interval(x, x); }

Interval Interval::from_double(double x, unsigned bits) {
  HighReal v = make_high(x, std::max(bits, 53u));
  return Interval(v, v);
}

unsigned Interval::precision() const {
  return std::max(precision_of(lo_), precision_of(hi_));
}

HighReal Interval::mid() const {
  HighReal m = blank(precision());
  mpfr_add(raw(m), raw(lo_), raw(hi_), MPFR_RNDN);
  mpfr_div_2ui(raw(m), raw(m), 1, MPFR_RNDN);
  return m;
}

HighReal Interval::width() const {
  HighReal w = blank(precision());
  mpfr_sub(raw(w), raw(hi_), raw(lo_), MPFR_RNDU);
  return w;
}

bool Interval::contains(double x) const {
  return mpfr_cmp_d(raw(lo_), x) <= 0 && mpfr_cmp_d(raw(hi_), x) >= 0;
}

Interval& Interval::operator+=(const Interval& b) {
  unsigned bits = std::max(precision(), b.precision());
  HighReal lo = blank(bits), hi = blank(bits);
  mpfr_add(raw(lo), raw(lo_), raw(b.lo_), MPFR_RNDD);
  mpfr_add(raw(hi), raw(hi_), raw(b.hi_), MPFR_RNDU);
  lo_ = std::move(lo);
  hi_ = std::move(hi);
  partial_ = partial_ || b.partial_;
  ensure_finite(*this, "add");
  return *this;
}

Interval& Interval::operator-=(const Interval& b) {
  unsigned bits = std::max(precision(), b.precision());
  HighReal lo = blank(bits), hi = blank(bits);
  mpfr_sub(raw(lo), raw(lo_), raw(b.hi_), MPFR_RNDD);
  mpfr_sub(raw(hi), raw(hi_), raw(b.lo_), MPFR_RNDU);
  lo_ = std::move(lo);
  hi_ = std::move(hi);
  partial_ = partial_ || b.partial_;
  ensure_finite(*this, "sub");
  return *this;
}

Interval& Interval::operator*=(const Interval& b) {
  unsigned bits = std::max(precision(), b.precision());
  HighReal lo = blank(bits), hi = blank(bits), t = blank(bits);
  const HighReal* xs[2] = {&lo_, &hi_};
  const HighReal* ys[2] = {&b.lo_, &b.hi_};
  bool first = true;
  for (const HighReal* x : xs) {
    for (const HighReal* y : ys) {
      mpfr_mul(raw(t), raw(*x), raw(*y), MPFR_RNDD);
      if (first || mpfr_less_p(raw(t), raw(lo))) mpfr_set(raw(lo), raw(t), MPFR_RNDD);
      mpfr_mul(raw(t), raw(*x), raw(*y), MPFR_RNDU);
      if (first || mpfr_greater_p(raw(t), raw(hi))) mpfr_set(raw(hi), raw(t), MPFR_RNDU);
      first = false;
    }
  }
  lo_ = std::move(lo);
  hi_ = std::move(hi);
  partial_ = partial_ || b.partial_;
  ensure_finite(*this, "mul");
  return *this;
}

Interval& Interval::operator/=(const Interval& b) {
  if (b.contains_zero()) throw DivisionByIntervalContainingZero("divisor straddles zero");
  unsigned bits = std::max(precision(), b.precision());
  HighReal lo = blank(bits), hi = blank(bits), t = blank(bits);
  const HighReal* xs[2] = {&lo_, &hi_};
  const HighReal* ys[2] = {&b.lo_, &b.hi_};
  bool first = true;
  for (const HighReal* x : xs) {
    for (const HighReal* y : ys) {
      mpfr_div(raw(t), raw(*x), raw(*y), MPFR_RNDD);
      if (first || mpfr_less_p(raw(t), raw(lo))) mpfr_set(raw(lo), raw(t), MPFR_RNDD);
      mpfr_div(raw(t), raw(*x), raw(*y), MPFR_RNDU);
      if (first || mpfr_greater_p(raw(t), raw(hi))) mpfr_set(raw(hi), raw(t), MPFR_RNDU);
      first = false;
    }
  }
  lo_ = std::move(lo);
  hi_ = std::move(hi);
  partial_ = partial_ || b.partial_;
  ensure_finite(*this, "div");
  return *this;
}

Interval operator-(const Interval& a) {
  Interval r = a;
  mpfr_neg(raw(r.lo_), raw(a.hi_), MPFR_RNDD);
  mpfr_neg(raw(r.hi_), raw(a.lo_), MPFR_RNDU);
  return r;
}

Interval sqrt(const Interval& a) {
  if (a.hi_ < 0) throw NegativeSqrt("sqrt of a negative interval");
  unsigned bits = a.precision();
  Interval r = a;
  if (a.lo_ < 0) {
    mpfr_set_zero(raw(r.lo_), 1);
    r.partial_ = true;
  } else {
    mpfr_sqrt(raw(r.lo_), raw(a.lo_), MPFR_RNDD);
  }
  r.hi_ = blank(bits);
  mpfr_sqrt(raw(r.hi_), raw(a.hi_), MPFR_RNDU);
  return r;
}

Interval square(const Interval& a) {
  Interval r = a;
  unsigned bits = a.precision();
  HighReal lo = blank(bits), hi = blank(bits);
  if (a.lo_ >= 0) {
    mpfr_sqr(raw(lo), raw(a.lo_), MPFR_RNDD);
    mpfr_sqr(raw(hi), raw(a.hi_), MPFR_RNDU);
  } else if (a.hi_ <= 0) {
    mpfr_sqr(raw(lo), raw(a.hi_), MPFR_RNDD);
    mpfr_sqr(raw(hi), raw(a.lo_), MPFR_RNDU);
  } else {
    mpfr_set_zero(raw(lo), 1);
    HighReal t = blank(bits);
    mpfr_sqr(raw(hi), raw(a.lo_), MPFR_RNDU);
    mpfr_sqr(raw(t), raw(a.hi_), MPFR_RNDU);
    if (t > hi) hi = t;
  }
  r.lo_ = std::move(lo);
  r.hi_ = std::move(hi);
  ensure_finite(r, "square");
  return r;
}

Interval hull(const Interval& a, const Interval& b) {
  Interval r = a;
  if (b.lo_ < r.lo_) r.lo_ = b.lo_;
  if (b.hi_ > r.hi_) r.hi_ = b.hi_;
  r.partial_ = a.partial_ || b.partial_;
  return r;
}

std::ostream& operator<<(std::ostream& os, const Interval& x) {
  return os << "[" << format_decimal(x.lo(), 20) << ", " << format_decimal(x.hi(), 20) << "]";
}

}  // namespace kpoint
