#pragma once

#include <memory>
#include <string>
#include <vector>

#include "kpoint/configs.hpp"
#include "kpoint/frames.hpp"

namespace kpoint {

struct DeltaParams {
  InnerProductSet D;
  int n = 0;
  int k = 2;
  int d = 5;
};

void validate(const DeltaParams& p);

struct BlockSpec {
  int rep_size = 0;
  int rep_index = 0;
  int l = 0;
  int dim = 0;
  std::string rep_label;

  bool operator==(const BlockSpec& o) const {
    return rep_size == o.rep_size && rep_index == o.rep_index && l == o.l && dim == o.dim;
  }
};

// Blocks for every representative of size m <= min(k-2, n-2) with full rank,
// and every l = 0..d, ordered by (m, rep index, l).
std::vector<BlockSpec> block_specs(const OrbitCatalog& catalog, int n, int d);

template <class T>
using BlockTerm = std::pair<int, Matrix<T>>;

template <class T>
struct ConstraintRow {
  int orbit_size = 0;
  int orbit_index = 0;
  std::string label;
  std::vector<BlockTerm<T>> coefficients;  // sorted by block id, all symmetric
  Rational rhs;                            // <= rhs
};

template <class T>
struct SdpInstance {
  DeltaParams params;
  unsigned precision = 53;
  std::shared_ptr<const OrbitCatalog> catalog;
  std::vector<BlockSpec> blocks;
  std::vector<ConstraintRow<T>> constraints;
  std::vector<BlockTerm<T>> objective;  // cost matrices; the constant term is 1
  std::vector<std::string> warnings;
};

// Shared state for assembling B_k T(S) coefficients in scalar type T:
// catalog, frames for the block representatives and the block table.
template <class T>
class Assembler {
 public:
  Assembler(const DeltaParams& params, std::shared_ptr<const OrbitCatalog> catalog);

  const DeltaParams& params() const { return params_; }
  const OrbitCatalog& catalog() const { return *catalog_; }
  const std::vector<BlockSpec>& blocks() const { return blocks_; }
  // Block id of (rep size, rep index, l), or -1 when that representative
  // carries no block.
  int block_id(int rep_size, int rep_index, int l) const;

  // Coefficients of sum_{Q subset S, |Q| <= k-2} sum_{x,y: {x,y} u Q = S}
  // <F_{R_Q, l}, F_l(R_Q)(x, y)> for a configuration with the given Gram
  // pattern (any point order).
  std::vector<BlockTerm<T>> assemble(const GramPattern& S) const;

  // Kernel T(x, y, Q) coefficients for one ordered pair and one Q, used to
  // replay the positivity argument on explicit codes.
  std::vector<BlockTerm<T>> pair_kernel(const GramPattern& pattern, int x, int y,
                                        std::span<const int> Q) const;

 private:
  void accumulate(const GramPattern& S, std::span<const int> qpts,
                  const std::vector<std::pair<int, int>>& pairs,
                  std::vector<Matrix<T>>& acc, std::vector<bool>& touched) const;

  DeltaParams params_;
  std::shared_ptr<const OrbitCatalog> catalog_;
  std::vector<BlockSpec> blocks_;
  std::vector<std::vector<int>> first_block_;  // [size][rep] -> id of l = 0, or -1
  std::vector<std::vector<std::unique_ptr<Frame<T>>>> frames_;
  std::vector<T> dvalues_;
};

template <class T>
SdpInstance<T> build_delta_k(const DeltaParams& params, int jobs = 1,
                             std::shared_ptr<const OrbitCatalog> catalog = nullptr);

template <class T>
ConstraintRow<T> assemble_constraint(const OrbitRep& orbit, const Assembler<T>& assembler);

// Constant-free objective cost: 1 on every empty-frame block, J_{d+1} on the
// single-point block with l = 0.
template <class T>
std::vector<BlockTerm<T>> objective_terms(const std::vector<BlockSpec>& blocks, int d);

// Recomputes every coefficient of a k = 3 instance from the closed-form
// expansion with symmetrized S_l^n matrices and compares.
bool reduce_k3_check(const SdpInstance<HighReal>& instance, HighReal* max_deviation = nullptr);
bool reduce_k3_check(const SdpInstance<double>& instance, double* max_deviation = nullptr);

}  // namespace kpoint
