#include "kpoint/finite_oracle.hpp"

#include <bit>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>

namespace kpoint {

FiniteGraph::FiniteGraph(int vertex_count) : n_(vertex_count) {
  if (vertex_count < 0 || vertex_count > 64) throw InvalidParameters("vertex count must lie in 0..64");
  adj_.assign(static_cast<size_t>(n_), 0);
}

void FiniteGraph::add_edge(int u, int v) {
  if (u < 0 || v < 0 || u >= n_ || v >= n_) throw InvalidParameters("edge endpoint out of range");
  if (u == v) throw InvalidParameters("self-loops are not allowed");
  adj_[static_cast<size_t>(u)] |= uint64_t{1} << v;
  adj_[static_cast<size_t>(v)] |= uint64_t{1} << u;
}

bool FiniteGraph::independent(uint64_t set) const {
  for (uint64_t s = set; s; s &= s - 1) {
    int v = std::countr_zero(s);
    if (adj_[static_cast<size_t>(v)] & set) return false;
  }
  return true;
}

size_t FiniteGraph::edge_count() const {
  size_t e = 0;
  for (uint64_t a : adj_) e += static_cast<size_t>(std::popcount(a));
  return e / 2;
}

FiniteGraph FiniteGraph::relabeled(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != n_) throw DimensionMismatch("permutation size");
  FiniteGraph g(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (adjacent(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)])) g.add_edge(i, j);
  return g;
}

FiniteGraph cycle_graph(int n) {
  FiniteGraph g(n);
  for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

FiniteGraph complete_graph(int n) {
  FiniteGraph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
  return g;
}

FiniteGraph petersen_graph() {
  FiniteGraph g(10);
  for (int i = 0; i < 5; ++i) {
    g.add_edge(i, (i + 1) % 5);
    g.add_edge(i, i + 5);
    g.add_edge(5 + i, 5 + (i + 2) % 5);
  }
  return g;
}

FiniteGraph random_graph(int n, double p, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  FiniteGraph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng)) g.add_edge(i, j);
  return g;
}

FiniteGraph parse_edge_list(std::istream& in) {
  std::string line;
  int n = -1;
  std::vector<std::pair<int, int>> edges;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream is(line);
    std::vector<long> nums;
    std::string tok;
    while (is >> tok) {
      try {
        size_t pos = 0;
        long v = std::stol(tok, &pos);
        if (pos != tok.size()) throw ParseError("");
        nums.push_back(v);
      } catch (...) {
        throw ParseError("edge list line " + std::to_string(lineno) + ": bad token '" + tok + "'");
      }
    }
    if (nums.empty()) continue;
    if (n < 0) {
      if (nums.size() != 1 || nums[0] < 0) throw ParseError("edge list must start with the vertex count");
      n = static_cast<int>(nums[0]);
      continue;
    }
    if (nums.size() != 2) throw ParseError("edge list line " + std::to_string(lineno) + ": expected 'u v'");
    edges.emplace_back(static_cast<int>(nums[0]), static_cast<int>(nums[1]));
  }
  if (n < 0) throw ParseError("empty edge list");
  FiniteGraph g(n);
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n || u == v)
      throw ParseError("bad edge " + std::to_string(u) + " " + std::to_string(v));
    g.add_edge(u, v);
  }
  return g;
}

FiniteGraph read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return parse_edge_list(in);
}

namespace {

void branch(const FiniteGraph& g, uint64_t candidates, int size, int& best) {
  if (candidates == 0) {
    best = std::max(best, size);
    return;
  }
  if (size + std::popcount(candidates) <= best) return;
  // pick the candidate of maximum degree within the candidate set
  int pick = -1, deg = -1;
  for (uint64_t s = candidates; s; s &= s - 1) {
    int v = std::countr_zero(s);
    int d = std::popcount(g.neighbors(v) & candidates);
    if (d > deg) {
      deg = d;
      pick = v;
    }
  }
  if (deg == 0) {
    best = std::max(best, size + std::popcount(candidates));
    return;
  }
  const uint64_t bit = uint64_t{1} << pick;
  branch(g, candidates & ~bit & ~g.neighbors(pick), size + 1, best);
  branch(g, candidates & ~bit, size, best);
}

}  // namespace

int independence_number(const FiniteGraph& g) {
  if (g.vertex_count() > 40) throw TooLarge("independence_number supports at most 40 vertices");
  const int n = g.vertex_count();
  uint64_t all = n == 64 ? ~uint64_t{0} : ((uint64_t{1} << n) - 1);
  int best = 0;
  branch(g, all, 0, best);
  return best;
}

namespace {

void collect_independent(const FiniteGraph& g, int k, uint64_t set, int from, std::vector<uint64_t>& out) {
  if (std::popcount(set) == k) return;
  for (int v = from; v < g.vertex_count(); ++v) {
    if (g.neighbors(v) & set) continue;
    uint64_t next = set | (uint64_t{1} << v);
    out.push_back(next);
    collect_independent(g, k, next, v + 1, out);
  }
}

template <class Real>
FiniteRelaxation relaxation(const FiniteGraph& g, int k, const SolverOptions& opts) {
  if (k < 2) throw InvalidParameters("k must be at least 2");
  const int n = g.vertex_count();
  if (n > 30) throw TooLarge("delta_k_finite supports at most 30 vertices");
  FiniteRelaxation out;
  if (n == 0) throw InvalidParameters("empty graph");
  std::vector<uint64_t> sets;
  collect_independent(g, k, 0, 0, sets);
  std::sort(sets.begin(), sets.end(), [](uint64_t a, uint64_t b) {
    int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  // nu_{v0} = 1 - sum of the other singletons
  const uint64_t v0 = 1;
  std::unordered_map<uint64_t, int> var;
  std::vector<uint64_t> vars;
  for (uint64_t s : sets)
    if (s != v0) {
      var[s] = static_cast<int>(vars.size());
      vars.push_back(s);
    }
  const int m = static_cast<int>(vars.size());
  if (m == 0) {
    out.value = 1;
    out.status = SolveStatus::Optimal;
    out.moments[v0] = 1;
    return out;
  }

  // Dual form max b^T y s.t. C - sum y_i A_i psd with y = nu.
  ConicProblem<Real> P;
  P.b.assign(static_cast<size_t>(m), Real(0));
  for (int i = 0; i < m; ++i)
    if (std::popcount(vars[static_cast<size_t>(i)]) == 2) P.b[static_cast<size_t>(i)] = 2;

  // Adds coefficient c of the set S into position (r, s) of a block:
  // C gets the constant part, A_i = -(coefficient of nu_i).
  auto place = [&](std::map<int, Matrix<Real>>& A, Matrix<Real>& C, Eigen::Index dim, uint64_t S,
                   Eigen::Index r, Eigen::Index c) {
    auto add = [&](int i, double v) {
      auto it = A.find(i);
      if (it == A.end()) it = A.emplace(i, Matrix<Real>::Zero(dim, dim)).first;
      it->second(r, c) += v;
      if (r != c) it->second(c, r) += v;
    };
    if (S == v0) {
      C(r, c) += 1;
      if (r != c) C(c, r) += 1;
      for (int i = 0; i < m; ++i)
        if (std::popcount(vars[static_cast<size_t>(i)]) == 1) add(i, 1.0);
    } else {
      add(var.at(S), -1.0);
    }
  };

  std::vector<uint64_t> Qs;
  Qs.push_back(0);
  for (uint64_t s : sets)
    if (std::popcount(s) <= k - 2) Qs.push_back(s);
  for (uint64_t Q : Qs) {
    // rows: the collapsed Q row (when Q is nonempty), then x outside Q with Q u {x} independent
    std::vector<uint64_t> labels;
    if (Q) labels.push_back(Q);
    for (int x = 0; x < n; ++x) {
      uint64_t bit = uint64_t{1} << x;
      if ((Q & bit) || (g.neighbors(x) & Q)) continue;
      labels.push_back(Q | bit);
    }
    const Eigen::Index dim = static_cast<Eigen::Index>(labels.size());
    if (dim == 0) continue;
    Matrix<Real> C = Matrix<Real>::Zero(dim, dim);
    std::map<int, Matrix<Real>> A;
    for (Eigen::Index r = 0; r < dim; ++r)
      for (Eigen::Index c = r; c < dim; ++c) {
        uint64_t S = labels[static_cast<size_t>(r)] | labels[static_cast<size_t>(c)];
        if (!g.independent(S)) continue;
        place(A, C, dim, S, r, c);
      }
    P.dims.push_back(static_cast<int>(dim));
    P.cost.push_back(C);
    P.constraint.emplace_back();
    for (auto& [i, a] : A) P.constraint.back().emplace_back(i, std::move(a));
  }
  // nu >= 0, including the eliminated singleton
  {
    const Eigen::Index dim = m + 1;
    Matrix<Real> C = Matrix<Real>::Zero(dim, 1);
    C(m, 0) = 1;
    P.dims.push_back(-static_cast<int>(dim));
    P.cost.push_back(C);
    P.constraint.emplace_back();
    for (int i = 0; i < m; ++i) {
      Matrix<Real> a = Matrix<Real>::Zero(dim, 1);
      a(i, 0) = -1;
      if (std::popcount(vars[static_cast<size_t>(i)]) == 1) a(m, 0) = 1;
      P.constraint.back().emplace_back(i, std::move(a));
    }
  }
  ConicResult<Real> r = solve_conic(P, opts);
  out.status = r.status;
  out.value = 1 + to_double(r.primal_obj + r.dual_obj) / 2;
  out.variables = m;
  out.blocks = static_cast<int>(P.dims.size());
  double rest = 1;
  for (int i = 0; i < m; ++i) {
    const double y = to_double(r.y[static_cast<size_t>(i)]);
    out.moments[vars[static_cast<size_t>(i)]] = y;
    if (std::popcount(vars[static_cast<size_t>(i)]) == 1) rest -= y;
  }
  out.moments[v0] = rest;
  return out;
}

}  // namespace

SolverOptions finite_default_options() {
  SolverOptions o;
  o.precision = 53;
  return o;
}

FiniteRelaxation delta_k_finite_detailed(const FiniteGraph& g, int k, const SolverOptions& opts) {
  if (opts.precision <= 53) return relaxation<double>(g, k, opts);
  PrecisionScope scope(opts.precision);
  return relaxation<HighReal>(g, k, opts);
}

HighReal delta_k_finite(const FiniteGraph& g, int k, const SolverOptions& opts) {
  FiniteRelaxation r = delta_k_finite_detailed(g, k, opts);
  if (r.status == SolveStatus::Infeasible || r.status == SolveStatus::MaxIter)
    throw ConvergenceFailure("finite relaxation ended with status " + to_string(r.status));
  return make_high(r.value, std::max(opts.precision, 53u));
}

double theta_number(const FiniteGraph& g, const SolverOptions& opts) {
  const int n = g.vertex_count();
  if (n == 0) throw InvalidParameters("empty graph");
  ConicProblem<double> P;
  P.dims = {n};
  P.cost = {-Matrix<double>::Ones(n, n)};
  P.constraint.resize(1);
  P.constraint[0].emplace_back(0, Matrix<double>::Identity(n, n));
  P.b.push_back(1);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (g.adjacent(u, v)) {
        Matrix<double> e = Matrix<double>::Zero(n, n);
        e(u, v) = e(v, u) = 0.5;
        P.constraint[0].emplace_back(static_cast<int>(P.b.size()), e);
        P.b.push_back(0);
      }
  ConicResult<double> r = solve_conic(P, opts);
  if (r.status == SolveStatus::Infeasible || r.status == SolveStatus::MaxIter)
    throw ConvergenceFailure("theta program ended with status " + to_string(r.status));
  return -0.5 * (r.primal_obj + r.dual_obj);
}

}  // namespace kpoint
