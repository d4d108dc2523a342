#include "kpoint/reference_bounds.hpp"

#include <algorithm>

#include "kpoint/errors.hpp"

namespace kpoint {

namespace {

void check(int n, const Rational& a) {
  if (n < 1) throw InvalidParameters("n must be positive");
  if (a <= 0 || a >= 1) throw InvalidParameters("a must lie in (0, 1)");
}

// 1/a when it is an integer.
std::optional<long> inverse_integer(const Rational& a) {
  Rational inv = 1 / a;
  if (denominator(inv) != 1) return std::nullopt;
  return numerator(inv).convert_to<long>();
}

}  // namespace

Rational gerzon(int n) {
  if (n < 1) throw InvalidParameters("n must be positive");
  return Rational(static_cast<long>(n) * (n + 1), 2);
}

std::optional<Rational> lint_seidel(int n, const Rational& a) {
  check(n, a);
  if (Rational(n) * a * a >= 1) return std::nullopt;
  return Rational(n) * (1 - a * a) / (1 - Rational(n) * a * a);
}

Rational yu(const Rational& a) {
  Rational t = 1 / (a * a);
  return (t - 2) * (t - 1) / 2;
}

std::optional<Rational> yu_bound(int n, const Rational& a) {
  check(n, a);
  if (a > Rational(1, 3) || Rational(n) > 3 / (a * a) - 16) return std::nullopt;
  return yu(a);
}

std::optional<Rational> okuda_yu(int n, const Rational& a) {
  check(n, a);
  const Rational ia = 1 / a;
  const Rational N(n);
  if (N < 3 * ia * ia - 16 || N > 3 * ia * ia + 6 * ia + 1) return std::nullopt;
  // +6/a in the denominator; -6/a would disagree with the k = 3 optima.
  const Rational den = 3 * ia * ia + 6 * ia + 2 - N;
  if (den <= 0) return std::nullopt;
  // Near the lower end of the window the expression drops below the Yu value,
  // which a realizable code attains; the k = 3 program gives the maximum.
  return std::max<Rational>(yu(a), 2 + (N - 2) * (ia + 1) * (ia + 1) * (ia + 1) / den);
}

std::optional<Rational> glazyrin_yu_two_distance(int n, const Rational& a, const Rational& b) {
  if (n < 2) throw InvalidParameters("n must be at least 2");
  const Rational N(n);
  const Rational den = 1 - (N - 1) / (N * (1 - a) * (1 - b));
  if (den <= 0) return std::nullopt;
  return (N + 2) / den;
}

std::optional<Rational> glazyrin_yu_linear(int n, const Rational& a) {
  check(n, a);
  if (a > Rational(1, 3)) return std::nullopt;
  const Rational ia = 1 / a;
  // 3/a - 5 in the second denominator keeps the value below the relaxed
  // form n(2/(3a^2) + 4/7) + 2.
  const Rational c = (ia - 1) * (ia + 2) * (ia + 2) / (3 * ia + 5) + (ia + 1) * (ia - 2) * (ia - 2) / (3 * ia - 5) + 2;
  return Rational(n) * c + 2;
}

std::optional<Rational> larman(int n, const Rational& a) {
  check(n, a);
  auto m = inverse_integer(a);
  if (m && *m % 2 == 1 && static_cast<long>(*m) * *m <= 2L * n) return std::nullopt;
  return Rational(2L * n + 3);
}

std::optional<Rational> lin_yu(int n, const Rational& a, const Rational& pillar_bound) {
  check(n, a);
  if (a != Rational(1, 5) || n < 63) return std::nullopt;
  // A is an integer, so its bound may be floored first.
  Integer f = numerator(pillar_bound) / denominator(pillar_bound);
  if (Rational(f) > pillar_bound) f -= 1;
  return 100 + 3 * Rational(f);
}

std::optional<Rational> block_construction_size(int n, const Rational& a) {
  check(n, a);
  auto m = inverse_integer(a);
  if (!m || *m % 2 == 0 || *m < 3) return std::nullopt;
  const long r = (*m + 1) / 2;
  const long t = (n - 1) / (r - 1);
  const long s = (n - 1) - (r - 1) * t;
  return Rational(r * t + s);
}

std::vector<ReferenceBound> reference_bounds(int n, const Rational& a, const std::optional<Rational>& pillar_bound) {
  check(n, a);
  std::vector<ReferenceBound> out;
  out.push_back({"gerzon", gerzon(n)});
  auto add = [&](const char* name, const std::optional<Rational>& v, bool lower = false) {
    if (v) out.push_back({name, *v, lower});
  };
  add("lint_seidel", lint_seidel(n, a));
  add("yu", yu_bound(n, a));
  add("okuda_yu", okuda_yu(n, a));
  add("glazyrin_yu_two_distance", glazyrin_yu_two_distance(n, a, -a));
  add("glazyrin_yu_linear", glazyrin_yu_linear(n, a));
  add("larman", larman(n, a));
  if (pillar_bound) add("lin_yu", lin_yu(n, a, *pillar_bound));
  add("block_construction", block_construction_size(n, a), true);
  return out;
}

}  // namespace kpoint
