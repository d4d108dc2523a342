#pragma once

#include <iosfwd>
#include <string>

#include "kpoint/numerics.hpp"

namespace kpoint {

// Closed interval [lo, hi] with outward (directed) rounding on every
// operation. The precision of a result is the larger of its operands'.
class Interval {
 public:
  Interval();
  Interval(long v);  // NOLINT: exact small integers are convenient as literals
  Interval(int v) : Interval(static_cast<long>(v)) {}  // NOLINT
  Interval(const Rational& q, unsigned bits);
  Interval(const HighReal& lo, const HighReal& hi);

  static Interval point(const HighReal& x);
  static Interval from_double(double x, unsigned bits);

  const HighReal& lo() const { return lo_; }
  const HighReal& hi() const { return hi_; }
  unsigned precision() const;
  // Set when a sqrt argument straddled zero and was clipped.
  bool partial() const { return partial_; }

  HighReal mid() const;
  HighReal width() const;
  bool contains(const HighReal& x) const { return lo_ <= x && x <= hi_; }
  bool contains(double x) const;
  bool contains_zero() const { return lo_ <= 0 && hi_ >= 0; }

  Interval& operator+=(const Interval& b);
  Interval& operator-=(const Interval& b);
  Interval& operator*=(const Interval& b);
  Interval& operator/=(const Interval& b);

  friend Interval operator+(Interval a, const Interval& b) { return a += b; }
  friend Interval operator-(Interval a, const Interval& b) { return a -= b; }
  friend Interval operator*(Interval a, const Interval& b) { return a *= b; }
  friend Interval operator/(Interval a, const Interval& b) { return a /= b; }
  friend Interval operator-(const Interval& a);
  friend Interval sqrt(const Interval& a);
  friend Interval square(const Interval& a);
  friend Interval hull(const Interval& a, const Interval& b);

 private:
  HighReal lo_;
  HighReal hi_;
  bool partial_ = false;
};

std::ostream& operator<<(std::ostream& os, const Interval& x);

template <>
inline Interval from_rational<Interval>(const Rational& q) {
  return Interval(q, PrecisionScope::current_bits());
}

inline double to_double(const Interval& x) { return to_double(x.mid()); }
inline bool is_finite(const Interval& x) { return is_finite(x.lo()) && is_finite(x.hi()); }

}  // namespace kpoint

namespace Eigen {
template <>
struct NumTraits<kpoint::Interval> : GenericNumTraits<kpoint::Interval> {
  using Real = kpoint::Interval;
  using NonInteger = kpoint::Interval;
  using Literal = kpoint::Interval;
  using Nested = kpoint::Interval;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 8,
    MulCost = 32
  };
  static int digits10() { return 0; }
};
}  // namespace Eigen
