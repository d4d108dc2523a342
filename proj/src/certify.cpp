#include "kpoint/certify.hpp"

#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

namespace kpoint {

std::string to_string(Verdict v) { return v == Verdict::Certified ? "Certified" : "Inconclusive"; }

std::vector<std::string> Certificate::failures() const {
  std::vector<std::string> out;
  for (const BlockCheck& b : blocks)
    if (!b.certified)
      out.push_back("block " + b.block.rep_label + " l=" + std::to_string(b.block.l) + " not certified PSD");
  for (const ConstraintCheck& c : constraints)
    if (!c.satisfied) out.push_back("constraint " + c.label + " exceeds its right-hand side");
  return out;
}

namespace {

Interval inner(const Matrix<Interval>& a, const Matrix<Interval>& b) {
  Interval s(0);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) s += a(i, j) * b(i, j);
  return s;
}

// Exact copy of x carried at max(bits, precision of x).
HighReal widen(const HighReal& x, unsigned bits) {
  HighReal r;
  mpfr_set_prec(r.backend().data(), std::max<mpfr_prec_t>(bits, mpfr_get_prec(x.backend().data())));
  mpfr_set(r.backend().data(), x.backend().data(), MPFR_RNDN);
  return r;
}

Matrix<Interval> symmetric_enclosure(const Matrix<HighReal>& f) {
  const Eigen::Index n = f.rows();
  const unsigned bits = PrecisionScope::current_bits();
  Matrix<Interval> out(n, n);
  const Interval half = Interval(Rational(1, 2), bits);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const Interval a = Interval::point(widen(f(i, j), bits));
      out(i, j) = f(i, j) == f(j, i) ? a : (a + Interval::point(widen(f(j, i), bits))) * half;
    }
  return out;
}

Interval evaluate(const std::vector<BlockTerm<Interval>>& terms, const std::vector<Matrix<Interval>>& F) {
  Interval s(0);
  for (const auto& [b, mat] : terms) s += inner(mat, F[static_cast<size_t>(b)]);
  return s;
}

}  // namespace

Certificate verify(const DeltaParams& params, const Solution& sol, unsigned precision, int jobs) {
  validate(params);
  PrecisionScope scope(precision);
  auto catalog = std::make_shared<const OrbitCatalog>(enumerate_orbits(params.D, params.k, params.n));
  Assembler<Interval> assembler(params, catalog);
  const auto& blocks = assembler.blocks();
  if (sol.F.size() != blocks.size()) throw DimensionMismatch("solution has the wrong number of blocks");
  for (size_t b = 0; b < blocks.size(); ++b)
    if (sol.F[b].rows() != blocks[b].dim || sol.F[b].cols() != blocks[b].dim)
      throw DimensionMismatch("solution block " + std::to_string(b) + " has the wrong shape");

  Certificate cert;
  cert.params = params;
  cert.precision = precision;
  cert.catalog_hash = catalog->hash();
  cert.solver_objective = sol.objective_value;

  std::vector<Matrix<Interval>> F;
  for (const auto& f : sol.F) F.push_back(symmetric_enclosure(f));

  for (size_t b = 0; b < blocks.size(); ++b) {
    BlockCheck bc;
    bc.block = blocks[b];
    bc.margin = interval_psd_certify(F[b]);
    bc.certified = bc.margin.has_value();
    cert.blocks.push_back(std::move(bc));
  }

  std::vector<const OrbitRep*> orbits;
  for (int s = 2; s <= params.k; ++s)
    for (const OrbitRep& r : catalog->reps(s)) orbits.push_back(&r);
  cert.constraints.resize(orbits.size());
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      PrecisionScope inner_scope(precision);
      for (size_t i = next++; i < orbits.size(); i = next++) {
        const OrbitRep& r = *orbits[i];
        ConstraintCheck cc;
        cc.label = r.label;
        cc.orbit_size = r.size();
        cc.rhs = r.size() == 2 ? Rational(-2) : Rational(0);
        cc.value = evaluate(assembler.assemble(r.pattern), F);
        cc.slack_upper = cc.value.hi() - make_high(cc.rhs, precision);
        cc.satisfied = cc.slack_upper <= 0;
        cert.constraints[i] = std::move(cc);
      }
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

  // 1 + B_k T({e1}) assembled like any other orbit.
  cert.certified_bound = Interval(1) + evaluate(assembler.assemble(GramPattern(1)), F);
  cert.floor_bound = boost::multiprecision::floor(cert.certified_bound.hi()).convert_to<long>();

  bool ok = true;
  for (const auto& b : cert.blocks) ok = ok && b.certified;
  for (const auto& c : cert.constraints) ok = ok && c.satisfied;
  cert.verdict = ok ? Verdict::Certified : Verdict::Inconclusive;
  return cert;
}

Solution round_for_certification(const Solution& sol, const HighReal& psd_shift) {
  if (psd_shift < 0) throw InvalidParameters("psd_shift must be nonnegative");
  Solution out = sol;
  const HighReal half = HighReal(1) / 2;
  for (auto& f : out.F) {
    for (Eigen::Index i = 0; i < f.rows(); ++i)
      for (Eigen::Index j = 0; j < i; ++j) {
        HighReal v = (f(i, j) + f(j, i)) * half;
        f(i, j) = v;
        f(j, i) = v;
      }
    for (Eigen::Index i = 0; i < f.rows(); ++i) f(i, i) += psd_shift;
  }
  HighReal obj(1);
  for (const auto& [b, mat] : objective_terms<HighReal>(out.blocks, out.params.d))
    obj += mat.cwiseProduct(out.F[static_cast<size_t>(b)]).sum();
  out.objective_value = obj;
  return out;
}

HighReal default_psd_shift(const Solution& sol) {
  HighReal big(0);
  for (const auto& f : sol.F)
    for (Eigen::Index i = 0; i < f.rows(); ++i)
      if (abs(f(i, i)) > big) big = abs(f(i, i));
  return big * HighReal(1e-10);
}

nlohmann::json certificate_json(const Certificate& c) {
  nlohmann::json j;
  std::vector<std::string> D;
  for (const Rational& q : c.params.D.values()) D.push_back(format_rational(q));
  j["D"] = D;
  j["n"] = c.params.n;
  j["k"] = c.params.k;
  j["d"] = c.params.d;
  j["precision"] = c.precision;
  j["catalog_hash"] = c.catalog_hash;
  j["verdict"] = to_string(c.verdict);
  j["certified_bound"] = {{"lo", format_decimal(c.certified_bound.lo(), 40)},
                          {"hi", format_decimal(c.certified_bound.hi(), 40)}};
  j["floor_bound"] = c.floor_bound;
  j["solver_objective"] = format_decimal(c.solver_objective, 40);
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : c.blocks)
    blocks.push_back({{"rep", b.block.rep_label},
                      {"l", b.block.l},
                      {"dim", b.block.dim},
                      {"certified", b.certified},
                      {"shift", b.margin ? format_decimal(*b.margin, 20) : std::string()}});
  j["blocks"] = blocks;
  nlohmann::json cons = nlohmann::json::array();
  for (const auto& k : c.constraints)
    cons.push_back({{"label", k.label},
                    {"rhs", format_rational(k.rhs)},
                    {"upper", format_decimal(k.value.hi(), 30)},
                    {"slack_upper", format_decimal(k.slack_upper, 20)},
                    {"satisfied", k.satisfied}});
  j["constraints"] = cons;
  j["failures"] = c.failures();
  return j;
}

namespace {

double choose(size_t n, int k) {
  double r = 1;
  for (int i = 0; i < k; ++i) r = r * static_cast<double>(n - static_cast<size_t>(i)) / (i + 1);
  return r;
}

}  // namespace

CodeReport check_against_code(const Certificate& cert, const GramPattern& code, size_t budget) {
  const DeltaParams& p = cert.params;
  const int N = code.size();
  const int nd = static_cast<int>(p.D.size());
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      int e = code.entry(i, j);
      if (e < 0 || e >= nd) throw UnrealizableCode("inner product outside D between points " +
                                                   std::to_string(i) + " and " + std::to_string(j));
    }
  RankInfo info = exact_rank_psd(code.gram(p.D));
  if (!info.psd) throw UnrealizableCode("Gram matrix is not positive semidefinite");
  if (info.rank > p.n) throw UnrealizableCode("code needs dimension " + std::to_string(info.rank));

  CodeReport rep;
  rep.code_size = static_cast<size_t>(N);
  rep.bound_holds = HighReal(N) <= cert.certified_bound.hi();

  size_t P = static_cast<size_t>(N);
  auto total = [&](size_t n) {
    double t = 0;
    for (int s = 1; s <= p.k; ++s) t += choose(n, s);
    return t;
  };
  while (P > 1 && total(P) > static_cast<double>(budget)) --P;
  rep.replay_points = P;

  std::map<std::string, HighReal> value;
  for (const auto& c : cert.constraints) value[c.label] = c.value.mid();
  const HighReal lambda = cert.certified_bound.mid() - 1;

  HighReal sum(0), scale(0);
  std::vector<int> idx;
  for (int s = 1; s <= p.k && s <= static_cast<int>(P); ++s) {
    idx.resize(static_cast<size_t>(s));
    for (int i = 0; i < s; ++i) idx[static_cast<size_t>(i)] = i;
    std::map<std::string, size_t> counts;
    for (;;) {
      ++counts[canonical_form(code.restricted(idx))];
      ++rep.subsets;
      int i = s - 1;
      while (i >= 0 && idx[static_cast<size_t>(i)] == static_cast<int>(P) - s + i) --i;
      if (i < 0) break;
      ++idx[static_cast<size_t>(i)];
      for (int j = i + 1; j < s; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
    }
    for (const auto& [label, count] : counts) {
      HighReal v;
      if (s == 1) {
        v = lambda;
      } else {
        auto it = value.find(label);
        if (it == value.end()) throw UnrealizableCode("subset type " + label + " is not in the catalog");
        v = it->second;
      }
      HighReal term = v * HighReal(static_cast<long>(count));
      sum += term;
      scale += abs(term);
    }
  }
  rep.replay_value = sum;
  rep.replay_nonnegative = sum >= -HighReal(1e-9) * (scale + 1);
  return rep;
}

}  // namespace kpoint
