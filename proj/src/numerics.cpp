#include "kpoint/numerics.hpp"

#include <charconv>
#include <condition_variable>
#include <mutex>
#include <regex>
#include <sstream>

namespace kpoint {

namespace {

std::mutex g_mutex;
std::condition_variable g_cv;
int g_active = 0;
unsigned g_bits = kDefaultGenerationBits;
thread_local int t_depth = 0;

unsigned digits10_for_bits(unsigned bits) {
  unsigned d10 = 1;
  while (boost::multiprecision::detail::digits10_2_2(d10) < bits) ++d10;
  return d10;
}

void apply_bits(unsigned bits) {
  HighReal::default_precision(digits10_for_bits(bits));
  g_bits = bits;
}

struct InitialPrecision {
  InitialPrecision() { apply_bits(kDefaultGenerationBits); }
} g_initial_precision;

}  // namespace

PrecisionScope::PrecisionScope(unsigned bits) {
  if (bits < 32) throw InvalidParameters("precision below 32 bits");
  std::unique_lock lock(g_mutex);
  g_cv.wait(lock, [&] { return g_bits == bits || g_active == t_depth; });
  previous_bits_ = g_bits;
  if (g_bits != bits) apply_bits(bits);
  ++g_active;
  ++t_depth;
}

PrecisionScope::~PrecisionScope() {
  std::unique_lock lock(g_mutex);
  if (previous_bits_ != g_bits) {
    if (t_depth > 1) {
      // An enclosing scope on this thread needs its precision back.
      g_cv.wait(lock, [&] { return g_active == t_depth; });
      apply_bits(previous_bits_);
    } else if (g_active == 1) {
      apply_bits(previous_bits_);
    }
    // Otherwise other threads still run at the current precision; an
    // outermost scope never waits, so scopes on different threads cannot
    // block one another while exiting.
  }
  --g_active;
  --t_depth;
  g_cv.notify_all();
}

unsigned PrecisionScope::current_bits() {
  std::lock_guard lock(g_mutex);
  return g_bits;
}

Rational parse_rational(const std::string& text) {
  static const std::regex pattern(R"(\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*)");
  std::smatch m;
  if (!std::regex_match(text, m, pattern))
    throw ParseError("expected a rational of the form p/q, got '" + text + "'");
  Integer num(m[1].str());
  Integer den(m[2].matched ? m[2].str() : std::string("1"));
  if (den == 0) throw ParseError("zero denominator in '" + text + "'");
  return Rational(num, den);
}

std::string format_rational(const Rational& q) {
  if (boost::multiprecision::denominator(q) == 1)
    return boost::multiprecision::numerator(q).str();
  return boost::multiprecision::numerator(q).str() + "/" +
         boost::multiprecision::denominator(q).str();
}

HighReal make_high(const Rational& q, unsigned bits) {
  HighReal x;
  mpfr_set_prec(x.backend().data(), bits);
  mpfr_set_q(x.backend().data(), q.backend().data(), MPFR_RNDN);
  return x;
}

HighReal make_high(double v, unsigned bits) {
  if (!std::isfinite(v)) throw NumericalError("non-finite double");
  HighReal x;
  mpfr_set_prec(x.backend().data(), bits);
  mpfr_set_d(x.backend().data(), v, MPFR_RNDN);
  return x;
}

HighReal parse_high(const std::string& text, unsigned bits) {
  HighReal x;
  mpfr_set_prec(x.backend().data(), bits);
  if (mpfr_set_str(x.backend().data(), text.c_str(), 10, MPFR_RNDN) != 0)
    throw ParseError("bad real '" + text + "'");
  if (!is_finite(x)) throw ParseError("non-finite real '" + text + "'");
  return x;
}

unsigned precision_of(const HighReal& x) {
  return static_cast<unsigned>(mpfr_get_prec(x.backend().data()));
}

std::string format_decimal(const HighReal& x, int digits) {
  if (!is_finite(x)) throw NumericalError("formatting non-finite value");
  char* buf = nullptr;
  std::string fmt = "%." + std::to_string(digits - 1) + "Re";
  if (mpfr_asprintf(&buf, fmt.c_str(), x.backend().data()) < 0)
    throw NumericalError("mpfr_asprintf failed");
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

std::string format_decimal(double x, int digits) {
  if (!std::isfinite(x)) throw NumericalError("formatting non-finite value");
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific, digits - 1);
  if (res.ec != std::errc()) throw NumericalError("formatting failed");
  return std::string(buf, res.ptr);
}

}  // namespace kpoint
