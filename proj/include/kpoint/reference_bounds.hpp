#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kpoint/numerics.hpp"

namespace kpoint {

struct ReferenceBound {
  std::string name;
  Rational value;
  bool lower = false;  // a construction size rather than an upper bound
};

// Closed forms evaluated exactly; each returns nullopt outside its window.
Rational gerzon(int n);
std::optional<Rational> lint_seidel(int n, const Rational& a);
Rational yu(const Rational& a);
std::optional<Rational> yu_bound(int n, const Rational& a);
std::optional<Rational> okuda_yu(int n, const Rational& a);
std::optional<Rational> glazyrin_yu_two_distance(int n, const Rational& a, const Rational& b);
std::optional<Rational> glazyrin_yu_linear(int n, const Rational& a);
// 2n + 3 whenever 1/a is not an odd integer at most sqrt(2n).
std::optional<Rational> larman(int n, const Rational& a);
// 100 + 3 A with A an upper bound for A(n - 4, {1/13, -5/13}); a = 1/5, n >= 63.
std::optional<Rational> lin_yu(int n, const Rational& a, const Rational& pillar_bound);
// Largest rt + s with (r - 1)t + s + 1 <= n for a = 1/(2r - 1).
std::optional<Rational> block_construction_size(int n, const Rational& a);

// All applicable bounds for M_a(n) = A(n, {a, -a}); Lin-Yu only when the
// pillar bound is supplied.
std::vector<ReferenceBound> reference_bounds(int n, const Rational& a,
                                             const std::optional<Rational>& pillar_bound = std::nullopt);

}  // namespace kpoint
