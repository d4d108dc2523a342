#include "kpoint/polybasis.hpp"

namespace kpoint {

GegenbauerEvaluator::GegenbauerEvaluator(int n, int max_degree) : n_(n), max_degree_(max_degree) {
  if (n < 2) throw DomainError("Gegenbauer dimension must be >= 2");
  if (max_degree < 0) throw DomainError("negative degree");
}

namespace {

void append_degree(int m, int remaining, int var, std::vector<int>& cur,
                   std::vector<std::vector<int>>& out) {
  if (var == m - 1) {
    cur[var] = remaining;
    out.push_back(cur);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[var] = e;
    append_degree(m, remaining - e, var + 1, cur, out);
  }
}

}  // namespace

MonomialBasis::MonomialBasis(int m, int degree) : m_(m), degree_(degree) {
  if (m < 0 || degree < 0) throw DomainError("monomial basis needs m >= 0 and degree >= 0");
  if (m == 0) {
    exponents_.push_back({});
    return;
  }
  std::vector<int> cur(m, 0);
  for (int g = 0; g <= degree; ++g) append_degree(m, g, 0, cur, exponents_);
}

size_t MonomialBasis::prefix_size(int g) const {
  if (g < 0 || g > degree_) throw DomainError("prefix degree out of range");
  return binomial(g + m_, m_);
}

size_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<size_t>(n - k + i) / static_cast<size_t>(i);
  return r;
}

}  // namespace kpoint
