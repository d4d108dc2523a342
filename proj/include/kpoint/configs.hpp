#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kpoint/numerics.hpp"

namespace kpoint {

// Sorted list of distinct rationals in [-1, 1).
class InnerProductSet {
 public:
  InnerProductSet() = default;
  explicit InnerProductSet(std::vector<Rational> values);
  // {-a, a}
  static InnerProductSet equiangular(const Rational& a);
  // Comma or whitespace separated list of p/q values.
  static InnerProductSet parse(const std::string& text);

  size_t size() const { return values_.size(); }
  const Rational& operator[](size_t i) const { return values_[i]; }
  const std::vector<Rational>& values() const { return values_; }
  std::optional<int> index_of(const Rational& q) const;
  std::string to_string() const;

 private:
  std::vector<Rational> values_;
};

using Permutation = std::vector<int>;

// Gram matrix of a small configuration, stored as indices into an
// InnerProductSet. Diagonal entries are implicitly 1.
class GramPattern {
 public:
  GramPattern() = default;
  explicit GramPattern(int size, int fill = 0);
  // Row-major upper-triangle entries (i < j).
  GramPattern(int size, const std::vector<int>& upper);

  int size() const { return size_; }
  int entry(int i, int j) const { return cells_[static_cast<size_t>(i * size_ + j)]; }
  void set(int i, int j, int index);
  std::vector<int> upper() const;

  // Pattern whose (i, j) entry is this pattern's (pi[i], pi[j]) entry.
  GramPattern permuted(const Permutation& pi) const;
  // Restriction to the given points, in the given order.
  GramPattern restricted(std::span<const int> points) const;
  std::vector<std::vector<Rational>> gram(const InnerProductSet& D) const;

  bool operator==(const GramPattern& o) const {
    return size_ == o.size_ && cells_ == o.cells_;
  }

 private:
  int size_ = 0;
  std::vector<int8_t> cells_;
};

// All permutations of {0..s-1} in lexicographic order (identity first).
const std::vector<Permutation>& all_permutations(int s);

struct Canonical {
  std::string label;
  Permutation pi;  // pattern.permuted(pi) is the canonical pattern
};

Canonical canonicalize(const GramPattern& p);
std::string canonical_form(const GramPattern& p);
std::vector<Permutation> stabilizer(const GramPattern& p);

struct RankInfo {
  bool psd = false;
  int rank = 0;
};

// Exact symmetric elimination with diagonal pivoting.
RankInfo exact_rank_psd(std::vector<std::vector<Rational>> a);
bool is_realizable(const GramPattern& p, const InnerProductSet& D, int n);

struct OrbitRep {
  GramPattern pattern;
  std::string label;
  std::vector<Permutation> stabilizer;
  int orbit_index = 0;
  int rank = 0;

  int size() const { return pattern.size(); }
  bool full_rank() const { return rank == pattern.size(); }
};

struct Alignment {
  int rep_index;
  Permutation pi;  // q.permuted(pi) equals the representative's pattern
};

class OrbitCatalog {
 public:
  OrbitCatalog(InnerProductSet D, int k, int n, std::vector<std::vector<OrbitRep>> reps);

  const InnerProductSet& D() const { return D_; }
  int k() const { return k_; }
  int n() const { return n_; }
  const std::vector<OrbitRep>& reps(int s) const { return reps_.at(static_cast<size_t>(s)); }
  std::vector<size_t> counts() const;
  std::optional<int> find(const std::string& label, int s) const;
  Alignment align(const GramPattern& q) const;
  const std::vector<std::string>& warnings() const { return warnings_; }

  // One line per rep: size, row-major upper-triangle D-indices, stabilizer size.
  std::string export_text() const;
  static OrbitCatalog import_text(const std::string& text);
  // FNV-1a of export_text, as 16 hex digits.
  std::string hash() const;

 private:
  InnerProductSet D_;
  int k_;
  int n_;
  std::vector<std::vector<OrbitRep>> reps_;
  std::vector<std::map<std::string, int>> index_;
  std::vector<std::string> warnings_;
};

OrbitCatalog enumerate_orbits(const InnerProductSet& D, int k, int n);

// t blocks of r points with -a inside each block, s further points, and a
// between any two points in different blocks; a = 1/(2r-1), D = {-a, a}.
GramPattern block_construction(int r, int t, int s);

}  // namespace kpoint
