#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <Eigen/Core>
#include <cmath>
#include <limits>
#include <string>

#include "kpoint/errors.hpp"

namespace kpoint {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;
using HighReal = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<0>,
    boost::multiprecision::et_off>;

constexpr unsigned kDefaultGenerationBits = 256;
constexpr unsigned kDefaultCertificationBits = 512;

// MPFR-backed HighReal values take their precision from a process default at
// construction. A PrecisionScope pins that default for the duration of a
// computation. Scopes requesting different precisions from different threads
// serialize; nested scopes on one thread may change the precision freely.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

  static unsigned current_bits();

 private:
  unsigned previous_bits_;
};

// Parses "p/q", "p" or "-p/q". Decimal points are rejected.
Rational parse_rational(const std::string& text);
std::string format_rational(const Rational& q);

HighReal make_high(const Rational& q, unsigned bits);
HighReal make_high(double x, unsigned bits);
HighReal parse_high(const std::string& text, unsigned bits);
unsigned precision_of(const HighReal& x);

// Scientific notation with `digits` significant digits, e.g. "-1.25e-01".
std::string format_decimal(const HighReal& x, int digits);
std::string format_decimal(double x, int digits);

template <class T>
T from_rational(const Rational& q);

template <>
inline double from_rational<double>(const Rational& q) {
  return q.convert_to<double>();
}

template <>
inline HighReal from_rational<HighReal>(const Rational& q) {
  return make_high(q, PrecisionScope::current_bits());
}

inline double to_double(double x) { return x; }
inline double to_double(const HighReal& x) { return x.convert_to<double>(); }

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(const HighReal& x) {
  return mpfr_number_p(x.backend().data()) != 0;
}

template <class T>
inline const T& check_finite(const T& x, const char* where) {
  if (!is_finite(x)) throw NumericalError(std::string("non-finite value in ") + where);
  return x;
}

inline int floor_to_int(const HighReal& x) {
  return static_cast<int>(boost::multiprecision::floor(x).convert_to<long>());
}

}  // namespace kpoint

namespace Eigen {
template <>
struct NumTraits<kpoint::HighReal> : GenericNumTraits<kpoint::HighReal> {
  using Real = kpoint::HighReal;
  using NonInteger = kpoint::HighReal;
  using Literal = kpoint::HighReal;
  using Nested = kpoint::HighReal;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 4,
    MulCost = 8
  };
  static Real epsilon() { return std::numeric_limits<Real>::epsilon(); }
  static Real dummy_precision() { return 1000 * epsilon(); }
  static Real highest() { return (std::numeric_limits<Real>::max)(); }
  static Real lowest() { return -(std::numeric_limits<Real>::max)(); }
  static Real infinity() { return std::numeric_limits<Real>::infinity(); }
  static Real quiet_NaN() { return std::numeric_limits<Real>::quiet_NaN(); }
  static int digits10() { return static_cast<int>(Real::default_precision()); }
};
}  // namespace Eigen
