#include "kpoint/sdpgen.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <exception>
#include <mutex>
#include <thread>

namespace kpoint {

void validate(const DeltaParams& p) {
  if (p.k < 2 || p.k > 6) throw InvalidParameters("k must lie in 2..6");
  if (p.n < 2) throw InvalidParameters("n must be at least 2");
  if (p.d < 0) throw InvalidParameters("d must be nonnegative");
  if (p.D.size() == 0) throw InvalidParameters("empty inner product set");
}

std::vector<BlockSpec> block_specs(const OrbitCatalog& catalog, int n, int d) {
  std::vector<BlockSpec> out;
  const int max_m = std::min(catalog.k() - 2, n - 2);
  for (int m = 0; m <= max_m; ++m) {
    for (const OrbitRep& r : catalog.reps(m)) {
      if (!r.full_rank()) continue;
      for (int l = 0; l <= d; ++l)
        out.push_back(BlockSpec{m, r.orbit_index, l, static_cast<int>(binomial(d - l + m, m)), r.label});
    }
  }
  return out;
}

template <class T>
Assembler<T>::Assembler(const DeltaParams& params, std::shared_ptr<const OrbitCatalog> catalog)
    : params_(params), catalog_(std::move(catalog)) {
  validate(params_);
  if (catalog_->k() < params_.k) throw InvalidParameters("catalog built for a smaller k");
  blocks_ = block_specs(*catalog_, params_.n, params_.d);
  const int kk = params_.k;
  first_block_.resize(static_cast<size_t>(std::max(kk - 1, 1)));
  frames_.resize(first_block_.size());
  for (size_t m = 0; m < first_block_.size(); ++m) {
    const auto& reps = catalog_->reps(static_cast<int>(m));
    first_block_[m].assign(reps.size(), -1);
    frames_[m].resize(reps.size());
  }
  for (size_t b = 0; b < blocks_.size(); ++b) {
    const BlockSpec& bs = blocks_[b];
    if (bs.l != 0) continue;
    first_block_[static_cast<size_t>(bs.rep_size)][static_cast<size_t>(bs.rep_index)] = static_cast<int>(b);
    const OrbitRep& rep = catalog_->reps(bs.rep_size)[static_cast<size_t>(bs.rep_index)];
    frames_[static_cast<size_t>(bs.rep_size)][static_cast<size_t>(bs.rep_index)] =
        std::make_unique<Frame<T>>(rep, params_.D);
  }
  for (const Rational& q : params_.D.values()) dvalues_.push_back(from_rational<T>(q));
}

template <class T>
int Assembler<T>::block_id(int rep_size, int rep_index, int l) const {
  if (rep_size < 0 || static_cast<size_t>(rep_size) >= first_block_.size()) return -1;
  int first = first_block_[static_cast<size_t>(rep_size)].at(static_cast<size_t>(rep_index));
  return first < 0 ? -1 : first + l;
}

template <class T>
void Assembler<T>::accumulate(const GramPattern& S, std::span<const int> qpts,
                              const std::vector<std::pair<int, int>>& pairs,
                              std::vector<Matrix<T>>& acc, std::vector<bool>& touched) const {
  const int m = static_cast<int>(qpts.size());
  const int d = params_.d;
  GramPattern q = S.restricted(qpts);
  Alignment al = catalog_->align(q);
  const int first = block_id(m, al.rep_index, 0);
  if (first < 0) return;
  const Frame<T>& frame = *frames_[static_cast<size_t>(m)][static_cast<size_t>(al.rep_index)];
  const OrbitRep& rep = frame.rep();

  std::vector<int> aligned(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) aligned[static_cast<size_t>(i)] = qpts[static_cast<size_t>(al.pi[static_cast<size_t>(i)])];

  auto value = [&](int x, int y) -> T {
    if (x == y) return T(1);
    return dvalues_[static_cast<size_t>(S.entry(x, y))];
  };

  std::vector<int> pts;
  for (auto [x, y] : pairs) {
    if (std::find(pts.begin(), pts.end(), x) == pts.end()) pts.push_back(x);
    if (std::find(pts.begin(), pts.end(), y) == pts.end()) pts.push_back(y);
  }
  const int s = S.size();
  std::vector<std::vector<T>> g(static_cast<size_t>(s));
  for (int x : pts)
    for (int i = 0; i < m; ++i) g[static_cast<size_t>(x)].push_back(value(x, aligned[static_cast<size_t>(i)]));

  MonomialBasis basis(m, d);
  GegenbauerEvaluator gegen(params_.n - m, d);
  const T inv = T(1) / T(static_cast<long>(rep.stabilizer.size()));
  const size_t full = basis.size();

  std::vector<std::vector<T>> u(static_cast<size_t>(s)), z(static_cast<size_t>(s));
  std::vector<T> nrm(static_cast<size_t>(s));
  // weights[l][x][y]
  std::vector<std::vector<std::vector<T>>> weight(
      static_cast<size_t>(d + 1), std::vector<std::vector<T>>(static_cast<size_t>(s), std::vector<T>(static_cast<size_t>(s))));
  std::vector<std::vector<bool>> has(static_cast<size_t>(s), std::vector<bool>(static_cast<size_t>(s), false));
  for (auto [x, y] : pairs) has[static_cast<size_t>(x)][static_cast<size_t>(y)] = true;

  std::vector<T> tmp(full);
  for (const Permutation& sigma : rep.stabilizer) {
    for (int x : pts) {
      auto gx = permute_entries<T>(g[static_cast<size_t>(x)], sigma);
      u[static_cast<size_t>(x)] = frame.coords(gx);
      z[static_cast<size_t>(x)] = basis.evaluate<T>(u[static_cast<size_t>(x)]);
      nrm[static_cast<size_t>(x)] = T(1) - dot<T>(u[static_cast<size_t>(x)], u[static_cast<size_t>(x)]);
    }
    for (auto [x, y] : pairs) {
      T sxy = value(x, y) - dot<T>(u[static_cast<size_t>(x)], u[static_cast<size_t>(y)]);
      T w = nrm[static_cast<size_t>(x)] * nrm[static_cast<size_t>(y)];
      std::vector<T> h = gegen.homogeneous_values(sxy, w);
      for (int l = 0; l <= d; ++l) weight[static_cast<size_t>(l)][static_cast<size_t>(x)][static_cast<size_t>(y)] = h[static_cast<size_t>(l)] * inv;
    }
    for (int l = 0; l <= d; ++l) {
      const int bid = first + l;
      Matrix<T>& a = acc[static_cast<size_t>(bid)];
      const Eigen::Index N = static_cast<Eigen::Index>(binomial(d - l + m, m));
      if (!touched[static_cast<size_t>(bid)]) {
        a = Matrix<T>::Zero(N, N);
        touched[static_cast<size_t>(bid)] = true;
      }
      const auto& wl = weight[static_cast<size_t>(l)];
      for (int x : pts) {
        bool any = false;
        for (Eigen::Index j = 0; j < N; ++j) tmp[static_cast<size_t>(j)] = T(0);
        for (int y : pts) {
          if (!has[static_cast<size_t>(x)][static_cast<size_t>(y)]) continue;
          any = true;
          const T& wxy = wl[static_cast<size_t>(x)][static_cast<size_t>(y)];
          const auto& zy = z[static_cast<size_t>(y)];
          for (Eigen::Index j = 0; j < N; ++j) tmp[static_cast<size_t>(j)] += wxy * zy[static_cast<size_t>(j)];
        }
        if (!any) continue;
        const auto& zx = z[static_cast<size_t>(x)];
        for (Eigen::Index i = 0; i < N; ++i)
          for (Eigen::Index j = i; j < N; ++j) a(i, j) += zx[static_cast<size_t>(i)] * tmp[static_cast<size_t>(j)];
      }
    }
  }
}

namespace {

std::vector<std::pair<int, int>> covering_pairs(int s, uint32_t qmask) {
  std::vector<int> rest;
  for (int i = 0; i < s; ++i)
    if (!(qmask >> i & 1u)) rest.push_back(i);
  std::vector<std::pair<int, int>> pairs;
  if (rest.empty()) {
    for (int x = 0; x < s; ++x)
      for (int y = 0; y < s; ++y) pairs.emplace_back(x, y);
  } else if (rest.size() == 1) {
    const int w = rest[0];
    for (int x = 0; x < s; ++x) {
      pairs.emplace_back(w, x);
      if (x != w) pairs.emplace_back(x, w);
    }
  } else if (rest.size() == 2) {
    pairs.emplace_back(rest[0], rest[1]);
    pairs.emplace_back(rest[1], rest[0]);
  }
  return pairs;
}

template <class T>
std::vector<BlockTerm<T>> collect(std::vector<Matrix<T>>& acc, const std::vector<bool>& touched) {
  std::vector<BlockTerm<T>> out;
  for (size_t b = 0; b < acc.size(); ++b) {
    if (!touched[b]) continue;
    Matrix<T>& a = acc[b];
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < i; ++j) a(i, j) = a(j, i);
    out.emplace_back(static_cast<int>(b), std::move(a));
  }
  return out;
}

}  // namespace

template <class T>
std::vector<BlockTerm<T>> Assembler<T>::assemble(const GramPattern& S) const {
  const int s = S.size();
  const int kk = params_.k;
  if (s < 1 || s > kk) throw InvalidParameters("orbit size outside 1..k");
  std::vector<Matrix<T>> acc(blocks_.size());
  std::vector<bool> touched(blocks_.size(), false);
  for (uint32_t qmask = 0; qmask < (1u << s); ++qmask) {
    const int qsize = std::popcount(qmask);
    if (qsize > kk - 2 || s - qsize > 2) continue;
    std::vector<int> qpts;
    for (int i = 0; i < s; ++i)
      if (qmask >> i & 1u) qpts.push_back(i);
    accumulate(S, qpts, covering_pairs(s, qmask), acc, touched);
  }
  return collect(acc, touched);
}

template <class T>
std::vector<BlockTerm<T>> Assembler<T>::pair_kernel(const GramPattern& pattern, int x, int y,
                                                    std::span<const int> Q) const {
  std::vector<Matrix<T>> acc(blocks_.size());
  std::vector<bool> touched(blocks_.size(), false);
  std::vector<std::pair<int, int>> pairs = {{x, y}};
  if (x != y) pairs.emplace_back(y, x);
  accumulate(pattern, Q, pairs, acc, touched);
  auto out = collect(acc, touched);
  if (x != y) {
    const T half = T(1) / T(2);
    for (auto& [b, mat] : out)
      for (Eigen::Index i = 0; i < mat.rows(); ++i)
        for (Eigen::Index j = 0; j < mat.cols(); ++j) mat(i, j) *= half;
  }
  return out;
}

template <class T>
ConstraintRow<T> assemble_constraint(const OrbitRep& orbit, const Assembler<T>& assembler) {
  ConstraintRow<T> row;
  row.orbit_size = orbit.size();
  row.orbit_index = orbit.orbit_index;
  row.label = orbit.label;
  row.rhs = orbit.size() == 2 ? Rational(-2) : Rational(0);
  row.coefficients = assembler.assemble(orbit.pattern);
  return row;
}

template <class T>
std::vector<BlockTerm<T>> objective_terms(const std::vector<BlockSpec>& blocks, int d) {
  std::vector<BlockTerm<T>> out;
  for (size_t b = 0; b < blocks.size(); ++b) {
    const BlockSpec& bs = blocks[b];
    if (bs.rep_size == 0) {
      out.emplace_back(static_cast<int>(b), Matrix<T>::Constant(1, 1, T(1)));
    } else if (bs.rep_size == 1 && bs.l == 0) {
      out.emplace_back(static_cast<int>(b), Matrix<T>::Constant(d + 1, d + 1, T(1)));
    }
  }
  return out;
}

template <class T>
SdpInstance<T> build_delta_k(const DeltaParams& params, int jobs,
                             std::shared_ptr<const OrbitCatalog> catalog) {
  validate(params);
  if (!catalog) catalog = std::make_shared<const OrbitCatalog>(enumerate_orbits(params.D, params.k, params.n));
  Assembler<T> assembler(params, catalog);

  SdpInstance<T> inst;
  inst.params = params;
  if constexpr (std::is_same_v<T, double>)
    inst.precision = 53;
  else
    inst.precision = PrecisionScope::current_bits();
  inst.catalog = catalog;
  inst.blocks = assembler.blocks();
  inst.warnings = catalog->warnings();
  for (int m = 0; m <= std::min(params.k - 2, catalog->k()); ++m)
    if (m > params.n - 2 && !catalog->reps(m).empty())
      inst.warnings.push_back("frames with " + std::to_string(m) +
                              " points exceed n-2 and carry no blocks");

  std::vector<const OrbitRep*> orbits;
  for (int s = 2; s <= params.k; ++s)
    for (const OrbitRep& r : catalog->reps(s)) orbits.push_back(&r);
  inst.constraints.resize(orbits.size());

  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (size_t i = next++; i < orbits.size(); i = next++)
        inst.constraints[i] = assemble_constraint(*orbits[i], assembler);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = orbits.size();
    }
  };
  const int nthreads = std::max(1, std::min<int>(jobs, static_cast<int>(orbits.size())));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  inst.objective = objective_terms<T>(inst.blocks, params.d);
  return inst;
}

namespace {

// Closed-form k = 3 expansion, evaluated through the square-root definition
// of the one-variable polynomial, with the value 0 on the singular surface.
template <class T>
T p_n1_by_definition(int n, int l, const T& t, const T& u, const T& v) {
  using std::sqrt;
  using boost::multiprecision::sqrt;
  T w = (T(1) - u * u) * (T(1) - v * v);
  if (w == 0) return l == 0 ? T(1) : T(0);
  T r = sqrt(w);
  T inner = (t - u * v) / r;
  T p = GegenbauerEvaluator(n - 1, l).values(inner)[static_cast<size_t>(l)];
  T scale(1);
  for (int i = 0; i < l; ++i) scale *= r;
  return scale * p;
}

template <class T>
Matrix<T> symmetrized_s(int n, int l, int d, const T& a, const T& b, const T& c) {
  const int N = d - l + 1;
  Matrix<T> out = Matrix<T>::Zero(N, N);
  const T args[3] = {a, b, c};
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (const auto& p : perms) {
    const T& t = args[p[0]];
    const T& u = args[p[1]];
    const T& v = args[p[2]];
    T val = p_n1_by_definition(n, l, t, u, v);
    T pu(1);
    for (int i = 0; i < N; ++i) {
      T pv(1);
      for (int j = 0; j < N; ++j) {
        out(i, j) += val * pu * pv;
        pv *= v;
      }
      pu *= u;
    }
  }
  return out;
}

template <class T>
bool reduce_k3_impl(const SdpInstance<T>& inst, T* max_dev) {
  const DeltaParams& p = inst.params;
  if (p.k != 3) throw InvalidParameters("reduce_k3_check needs k = 3");
  const int n = p.n, d = p.d;
  std::vector<T> dv;
  for (const Rational& q : p.D.values()) dv.push_back(from_rational<T>(q));

  int empty_first = -1, single_first = -1;
  for (size_t b = 0; b < inst.blocks.size(); ++b) {
    if (inst.blocks[b].l != 0) continue;
    if (inst.blocks[b].rep_size == 0) empty_first = static_cast<int>(b);
    if (inst.blocks[b].rep_size == 1) single_first = static_cast<int>(b);
  }

  T worst(0);
  auto compare = [&](const Matrix<T>& got, const Matrix<T>& want) {
    if (got.rows() != want.rows() || got.cols() != want.cols()) {
      worst = T(1e300);
      return;
    }
    for (Eigen::Index i = 0; i < got.rows(); ++i)
      for (Eigen::Index j = 0; j < got.cols(); ++j) {
        T dlt = got(i, j) - want(i, j);
        if (dlt < 0) dlt = -dlt;
        if (dlt > worst) worst = dlt;
      }
  };

  for (const ConstraintRow<T>& row : inst.constraints) {
    const GramPattern& pat = inst.catalog->reps(row.orbit_size)[static_cast<size_t>(row.orbit_index)].pattern;
    std::vector<Matrix<T>> want(inst.blocks.size());
    for (size_t b = 0; b < inst.blocks.size(); ++b)
      want[b] = Matrix<T>::Zero(inst.blocks[b].dim, inst.blocks[b].dim);
    if (row.orbit_size == 2) {
      T t = dv[static_cast<size_t>(pat.entry(0, 1))];
      std::vector<T> P = GegenbauerEvaluator(n, d).values(t);
      for (int l = 0; l <= d; ++l) {
        want[static_cast<size_t>(empty_first + l)](0, 0) = T(2) * P[static_cast<size_t>(l)];
        if (single_first >= 0)
          want[static_cast<size_t>(single_first + l)] = symmetrized_s(n, l, d, t, t, T(1));
      }
    } else {
      T ab = dv[static_cast<size_t>(pat.entry(0, 1))];
      T ac = dv[static_cast<size_t>(pat.entry(0, 2))];
      T bc = dv[static_cast<size_t>(pat.entry(1, 2))];
      if (single_first >= 0)
        for (int l = 0; l <= d; ++l)
          want[static_cast<size_t>(single_first + l)] = symmetrized_s(n, l, d, ab, ac, bc);
    }
    std::vector<bool> seen(inst.blocks.size(), false);
    for (const auto& [b, mat] : row.coefficients) {
      compare(mat, want[static_cast<size_t>(b)]);
      seen[static_cast<size_t>(b)] = true;
    }
    for (size_t b = 0; b < inst.blocks.size(); ++b)
      if (!seen[b]) compare(Matrix<T>::Zero(inst.blocks[b].dim, inst.blocks[b].dim), want[b]);
  }
  if (max_dev) *max_dev = worst;
  T tol(1);
  for (int i = 0; i < static_cast<int>(inst.precision) - 20; ++i) tol /= 2;
  return worst <= tol;
}

}  // namespace

bool reduce_k3_check(const SdpInstance<HighReal>& instance, HighReal* max_deviation) {
  PrecisionScope scope(instance.precision);
  return reduce_k3_impl(instance, max_deviation);
}

bool reduce_k3_check(const SdpInstance<double>& instance, double* max_deviation) {
  return reduce_k3_impl(instance, max_deviation);
}

#define KPOINT_INSTANTIATE(T)                                                                    \
  template class Assembler<T>;                                                                   \
  template SdpInstance<T> build_delta_k<T>(const DeltaParams&, int,                              \
                                           std::shared_ptr<const OrbitCatalog>);                 \
  template ConstraintRow<T> assemble_constraint<T>(const OrbitRep&, const Assembler<T>&);        \
  template std::vector<BlockTerm<T>> objective_terms<T>(const std::vector<BlockSpec>&, int);

KPOINT_INSTANTIATE(double)
KPOINT_INSTANTIATE(HighReal)
KPOINT_INSTANTIATE(Interval)

#undef KPOINT_INSTANTIATE

}  // namespace kpoint
