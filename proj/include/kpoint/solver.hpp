#pragma once

#include <string>
#include <vector>

#include "kpoint/sdpa.hpp"
#include "kpoint/sdpgen.hpp"

namespace kpoint {

enum class SolveStatus { Optimal, NearOptimal, Infeasible, MaxIter };
std::string to_string(SolveStatus s);

struct SolverOptions {
  double tol_gap = 1e-9;
  double tol_feas = 1e-9;
  int max_iter = 200;
  unsigned precision = kDefaultGenerationBits;
  // Each orbit right-hand side r is tightened to r - margin * (1 + |r|) so
  // that the returned blocks satisfy the original inequalities with room to
  // spare; the reported objective is always that of the original program.
  double feasibility_margin = 0;
  bool verbose = false;
};

struct IterationRecord {
  int iter = 0;
  double primal_obj = 0;
  double dual_obj = 0;
  double pinf = 0;
  double dinf = 0;
  double gap = 0;
  double mu = 0;
  double step_p = 0;
  double step_d = 0;
};

// min <C, X> s.t. <A_i, X> = b_i, X in the product cone; dual
// max b^T y s.t. C - sum_i y_i A_i = Z in the cone. Blocks with dims[b] > 0
// are PSD; dims[b] < 0 are nonnegative orthants stored as |dims[b]| x 1
// columns. Data matrices are dense and symmetric.
template <class Real>
struct ConicProblem {
  std::vector<int> dims;
  std::vector<Matrix<Real>> cost;                                     // per block, empty = zero
  std::vector<std::vector<std::pair<int, Matrix<Real>>>> constraint;  // per block: (row, data)
  std::vector<Real> b;

  int rows() const { return static_cast<int>(b.size()); }
};

template <class Real>
struct ConicResult {
  SolveStatus status = SolveStatus::MaxIter;
  std::vector<Matrix<Real>> X;
  std::vector<Matrix<Real>> Z;
  std::vector<Real> y;
  Real primal_obj{0};
  Real dual_obj{0};
  double pinf = 0;
  double dinf = 0;
  double gap = 0;
  int iterations = 0;
  std::vector<IterationRecord> log;
};

// Primal-dual path following with Nesterov-Todd scaling and Mehrotra's
// predictor-corrector, from an infeasible start.
template <class Real>
ConicResult<Real> solve_conic(const ConicProblem<Real>& problem, const SolverOptions& opts);

// Inequality form of an instance: X = F blocks (+) diag(slack).
template <class T>
ConicProblem<T> to_conic(const SdpInstance<T>& instance);

struct Solution {
  DeltaParams params;
  std::vector<BlockSpec> blocks;
  std::vector<Matrix<HighReal>> F;
  std::vector<HighReal> dual;  // multipliers of the orbit constraints (<= 0)
  HighReal objective_value;    // 1 + <C, F>
  HighReal dual_value;
  SolveStatus status = SolveStatus::MaxIter;
  double pinf = 0;
  double dinf = 0;
  double gap = 0;
  unsigned precision = 0;
  double feasibility_margin = 0;
  std::string solver;
  std::vector<IterationRecord> log;
  std::string solver_log;
};

template <class T>
Solution solve_embedded(const SdpInstance<T>& instance, const SolverOptions& opts = {});

// Exports to workdir, runs `command <in.dat-s> <out>` and reads the SDPA
// result layout back. A non-empty KPOINT_SDPA_SOLVER environment variable
// replaces the command.
template <class T>
Solution solve_external(const SdpInstance<T>& instance, const std::string& command,
                        const std::string& workdir, int digits = 50);

// Maps an SDPA result for an exported instance back to a Solution.
template <class T>
Solution solution_from_result(const SdpInstance<T>& instance, const SdpaResult& result);

// SDPA result layout for a Solution (yMat = F (+) diag(slack)).
template <class T>
SdpaResult result_from_solution(const SdpInstance<T>& instance, const Solution& s);

template <class T>
HighReal recompute_objective(const SdpInstance<T>& instance, const std::vector<Matrix<HighReal>>& F);

// Solves an SDPA problem with the embedded method and returns the result in
// SDPA layout; the stand-in for an external solver binary.
SdpaResult solve_sdpa_problem(const SdpaProblem& problem, const SolverOptions& opts);

std::vector<int> export_block_struct(const std::vector<BlockSpec>& blocks, size_t constraints);

}  // namespace kpoint
