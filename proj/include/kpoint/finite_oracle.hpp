#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "kpoint/solver.hpp"

namespace kpoint {

class FiniteGraph {
 public:
  explicit FiniteGraph(int vertex_count);

  int vertex_count() const { return n_; }
  void add_edge(int u, int v);
  bool adjacent(int u, int v) const { return (adj_[static_cast<size_t>(u)] >> v) & 1u; }
  uint64_t neighbors(int u) const { return adj_[static_cast<size_t>(u)]; }
  bool independent(uint64_t set) const;
  size_t edge_count() const;
  // Vertex i of the result is vertex perm[i] of this graph.
  FiniteGraph relabeled(const std::vector<int>& perm) const;

 private:
  int n_;
  std::vector<uint64_t> adj_;
};

FiniteGraph cycle_graph(int n);
FiniteGraph complete_graph(int n);
FiniteGraph petersen_graph();
FiniteGraph random_graph(int n, double p, uint64_t seed);

// First meaningful line: vertex count; then one "u v" pair per line; '#'
// starts a comment.
FiniteGraph parse_edge_list(std::istream& in);
FiniteGraph read_edge_list(const std::string& path);

// Exact independence number by branch and bound (at most 40 vertices).
int independence_number(const FiniteGraph& g);

struct FiniteRelaxation {
  double value = 0;
  SolveStatus status = SolveStatus::MaxIter;
  std::map<uint64_t, double> moments;  // nu on independent sets of size 1..k
  int variables = 0;
  int blocks = 0;
};

// Double precision unless opts.precision asks for more.
SolverOptions finite_default_options();

// max 1 + 2 sum_{|S| = 2} nu_S over nu >= 0 on independent sets of size
// 1..k with sum of singletons 1 and M_Q(nu) psd for every independent Q with
// |Q| <= k - 2, where M_Q(nu)(x, y) = nu_{Q u {x, y}}. Solved by the
// embedded method, in HighReal when opts.precision exceeds 53 bits; at most
// 30 vertices.
FiniteRelaxation delta_k_finite_detailed(const FiniteGraph& g, int k,
                                         const SolverOptions& opts = finite_default_options());
HighReal delta_k_finite(const FiniteGraph& g, int k, const SolverOptions& opts = finite_default_options());

// Lovasz theta through the primal program max <J, X>, tr X = 1, X_uv = 0 on
// edges, X psd.
double theta_number(const FiniteGraph& g, const SolverOptions& opts = finite_default_options());

}  // namespace kpoint
