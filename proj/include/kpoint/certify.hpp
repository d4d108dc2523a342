#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kpoint/solver.hpp"

namespace kpoint {

enum class Verdict { Certified, Inconclusive };
std::string to_string(Verdict v);

struct BlockCheck {
  BlockSpec block;
  bool certified = false;
  std::optional<HighReal> margin;  // shift delta that made the interval Cholesky succeed
};

struct ConstraintCheck {
  std::string label;
  int orbit_size = 0;
  Interval value;  // encloses <coefficients, F>
  Rational rhs;
  bool satisfied = false;
  HighReal slack_upper;  // value.hi - rhs
};

struct Certificate {
  DeltaParams params;
  unsigned precision = 0;
  std::string catalog_hash;
  Interval certified_bound;  // encloses 1 + B_k T({e1})
  long floor_bound = 0;
  std::vector<BlockCheck> blocks;
  std::vector<ConstraintCheck> constraints;
  Verdict verdict = Verdict::Inconclusive;
  HighReal solver_objective;

  std::vector<std::string> failures() const;
};

// Rebuilds every coefficient in interval arithmetic at `precision` bits from
// the exact catalog and checks feasibility of the solution blocks.
Certificate verify(const DeltaParams& params, const Solution& solution,
                   unsigned precision = kDefaultCertificationBits, int jobs = 1);

// Exact symmetrization plus psd_shift * I on every block; objective
// recomputed.
Solution round_for_certification(const Solution& solution, const HighReal& psd_shift);

// Default shift: 1e-10 times the largest diagonal entry.
HighReal default_psd_shift(const Solution& solution);

nlohmann::json certificate_json(const Certificate& c);

struct CodeReport {
  size_t code_size = 0;
  size_t replay_points = 0;  // size of the prefix sub-code replayed
  size_t subsets = 0;
  HighReal replay_value;     // sum over subsets S of B_k T(S)
  bool replay_nonnegative = false;
  bool bound_holds = false;  // |C| <= certified bound
};

// Replays the positivity argument on an explicit code: counts the orbit type
// of every subset of size 1..k of (a prefix of) the code and sums the
// certified constraint values; also compares |C| with the certified bound.
// Prefixes are used when the full subset count exceeds `budget`.
CodeReport check_against_code(const Certificate& cert, const GramPattern& code,
                              size_t budget = 2'000'000);

}  // namespace kpoint
