#include "kpoint/solver.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace kpoint {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "Optimal";
    case SolveStatus::NearOptimal:
      return "NearOptimal";
    case SolveStatus::Infeasible:
      return "Infeasible";
    case SolveStatus::MaxIter:
      return "MaxIter";
  }
  return "Unknown";
}

namespace {

template <class Real>
Real inner(const Matrix<Real>& a, const Matrix<Real>& b) {
  return a.cwiseProduct(b).sum();
}

template <class Real>
Real mag(const Real& x) {
  return x < 0 ? Real(-x) : x;
}

template <class Real>
Real root(const Real& x) {
  using std::sqrt;
  return sqrt(x);
}

template <class Real>
void symmetrize(Matrix<Real>& a) {
  if (a.cols() == 1) return;
  const Real half = Real(1) / Real(2);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j) {
      Real v = (a(i, j) + a(j, i)) * half;
      a(i, j) = v;
      a(j, i) = v;
    }
}

// Nesterov-Todd scaling of one block: W = G G^T with G^T Z G = G^{-1} X G^{-T} = diag(v).
template <class Real>
struct Scaling {
  Matrix<Real> G;  // PSD blocks
  Vector<Real> w;  // orthant blocks: G^T a G = w .* a
  Vector<Real> v;
};

template <class Real>
Scaling<Real> nt_scaling(const Matrix<Real>& X, const Matrix<Real>& Z, bool psd) {
  Scaling<Real> s;
  const Eigen::Index n = X.rows();
  if (!psd) {
    s.w.resize(n);
    s.v.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      if (!(X(k, 0) > 0) || !(Z(k, 0) > 0)) throw NumericalBreakdown("orthant iterate left the cone");
      s.w(k) = root<Real>(X(k, 0) / Z(k, 0));
      s.v(k) = root<Real>(X(k, 0) * Z(k, 0));
    }
    return s;
  }
  Matrix<Real> L;
  try {
    L = cholesky(X);
  } catch (const NotPositiveDefinite&) {
    throw NumericalBreakdown("primal iterate lost definiteness");
  }
  Matrix<Real> M = L.transpose() * Z * L;
  symmetrize(M);
  Eigen::SelfAdjointEigenSolver<Matrix<Real>> es(M);
  if (es.info() != Eigen::Success) throw NumericalBreakdown("eigensolver failed in scaling");
  const Vector<Real>& lam = es.eigenvalues();
  s.v.resize(n);
  Vector<Real> quarter(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(lam(k) > 0)) throw NumericalBreakdown("dual iterate lost definiteness");
    s.v(k) = root<Real>(lam(k));
    quarter(k) = Real(1) / root<Real>(s.v(k));
  }
  s.G = L * es.eigenvectors() * quarter.asDiagonal();
  return s;
}

template <class Real>
Matrix<Real> scale(const Scaling<Real>& s, const Matrix<Real>& a, bool psd) {
  if (!psd) return s.w.cwiseProduct(a.col(0));
  return s.G.transpose() * a * s.G;
}

template <class Real>
Matrix<Real> unscale(const Scaling<Real>& s, const Matrix<Real>& a, bool psd) {
  if (!psd) return s.w.cwiseProduct(a.col(0));
  return s.G * a * s.G.transpose();
}

// Largest step keeping diag(v) + alpha * d in the cone, capped at `cap`.
template <class Real>
Real max_step(const Vector<Real>& v, const Matrix<Real>& d, bool psd, const Real& cap) {
  const Eigen::Index n = v.size();
  Real lmin(0);
  if (!psd) {
    for (Eigen::Index k = 0; k < n; ++k) {
      Real r = d(k, 0) / v(k);
      if (r < lmin) lmin = r;
    }
  } else {
    Vector<Real> inv(n);
    for (Eigen::Index k = 0; k < n; ++k) inv(k) = Real(1) / root<Real>(v(k));
    Matrix<Real> s = inv.asDiagonal() * d * inv.asDiagonal();
    symmetrize(s);
    Eigen::SelfAdjointEigenSolver<Matrix<Real>> es(s, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalBreakdown("eigensolver failed in step length");
    lmin = es.eigenvalues()(0);
  }
  if (!(lmin < 0)) return cap;
  Real a = Real(-1) / lmin;
  return a < cap ? a : cap;
}

template <class Real>
double dbl(const Real& x) {
  return to_double(x);
}

}  // namespace

template <class Real>
ConicResult<Real> solve_conic(const ConicProblem<Real>& P, const SolverOptions& opts) {
  const size_t nb = P.dims.size();
  const int m = P.rows();
  if (m == 0) throw InvalidParameters("problem has no constraints");
  if (P.cost.size() != nb || P.constraint.size() != nb) throw DimensionMismatch("block data count");
  std::vector<bool> psd(nb);
  std::vector<Eigen::Index> size(nb);
  Eigen::Index total = 0;
  for (size_t b = 0; b < nb; ++b) {
    psd[b] = P.dims[b] > 0;
    size[b] = std::abs(P.dims[b]);
    total += size[b];
  }
  auto shape = [&](size_t b) { return std::pair<Eigen::Index, Eigen::Index>(size[b], psd[b] ? size[b] : 1); };
  auto zero = [&](size_t b) {
    auto [r, c] = shape(b);
    return Matrix<Real>::Zero(r, c).eval();
  };
  auto identity = [&](size_t b, const Real& s) {
    Matrix<Real> a = zero(b);
    for (Eigen::Index k = 0; k < size[b]; ++k) (psd[b] ? a(k, k) : a(k, 0)) = s;
    return a;
  };
  std::vector<Matrix<Real>> C(nb);
  for (size_t b = 0; b < nb; ++b) C[b] = P.cost[b].size() ? P.cost[b] : zero(b);

  // starting point
  Real bnorm(0), cnorm(0);
  for (const Real& v : P.b) bnorm += v * v;
  bnorm = root<Real>(bnorm);
  for (size_t b = 0; b < nb; ++b) cnorm += inner(C[b], C[b]);
  cnorm = root<Real>(cnorm);

  std::vector<Matrix<Real>> X(nb), Z(nb);
  std::vector<Real> y(static_cast<size_t>(m), Real(0));
  for (size_t b = 0; b < nb; ++b) {
    Real nsz(static_cast<long>(size[b]));
    Real xi = std::max(Real(10), root<Real>(nsz));
    Real eta = xi;
    Real cb = root<Real>(inner(C[b], C[b]));
    if (cb > eta) eta = cb;
    for (const auto& [i, a] : P.constraint[b]) {
      Real an = root<Real>(inner(a, a));
      Real ratio = nsz * (Real(1) + mag(P.b[static_cast<size_t>(i)])) / (Real(1) + an);
      if (ratio > xi) xi = ratio;
      if (an > eta) eta = an;
    }
    X[b] = identity(b, xi);
    Z[b] = identity(b, eta);
  }

  ConicResult<Real> res;
  const Real N(static_cast<long>(total));
  const Real tau(0.98);
  double last_sp = 0, last_sd = 0;
  int stalls = 0;

  for (int iter = 0;; ++iter) {
    // residuals
    std::vector<Real> rp(P.b);
    for (size_t b = 0; b < nb; ++b)
      for (const auto& [i, a] : P.constraint[b]) rp[static_cast<size_t>(i)] -= inner(a, X[b]);
    std::vector<Matrix<Real>> Rd(nb);
    Real pobj(0), compl_(0), rpn(0), rdn(0);
    for (size_t b = 0; b < nb; ++b) {
      Rd[b] = C[b] - Z[b];
      for (const auto& [i, a] : P.constraint[b]) Rd[b] -= y[static_cast<size_t>(i)] * a;
      pobj += inner(C[b], X[b]);
      compl_ += inner(X[b], Z[b]);
      rdn += inner(Rd[b], Rd[b]);
    }
    Real dobj(0);
    for (int i = 0; i < m; ++i) {
      dobj += P.b[static_cast<size_t>(i)] * y[static_cast<size_t>(i)];
      rpn += rp[static_cast<size_t>(i)] * rp[static_cast<size_t>(i)];
    }
    const Real mu = compl_ / N;
    const double pinf = dbl(root<Real>(rpn) / (Real(1) + bnorm));
    const double dinf = dbl(root<Real>(rdn) / (Real(1) + cnorm));
    Real gap_abs = mag<Real>(pobj - dobj);
    if (compl_ > gap_abs) gap_abs = compl_;
    const double gap = dbl(gap_abs / (Real(1) + mag(pobj)));

    IterationRecord rec{iter, dbl(pobj), dbl(dobj), pinf, dinf, gap, dbl(mu), last_sp, last_sd};
    res.log.push_back(rec);
    if (opts.verbose)
      std::cerr << "iter " << iter << " p " << rec.primal_obj << " d " << rec.dual_obj << " pinf " << pinf
                << " dinf " << dinf << " gap " << gap << '\n';
    res.X = X;
    res.Z = Z;
    res.y = y;
    res.primal_obj = pobj;
    res.dual_obj = dobj;
    res.pinf = pinf;
    res.dinf = dinf;
    res.gap = gap;
    res.iterations = iter;

    if (gap <= opts.tol_gap && pinf <= opts.tol_feas && dinf <= opts.tol_feas) {
      res.status = SolveStatus::Optimal;
      return res;
    }
    if (dinf <= opts.tol_feas && dbl(dobj) > 1e10 * (1 + dbl(bnorm)) && dbl(dobj) > 1e6 * std::abs(dbl(pobj))) {
      res.status = SolveStatus::Infeasible;
      return res;
    }
    if (pinf <= opts.tol_feas && dbl(pobj) < -1e10 * (1 + dbl(cnorm)) && -dbl(pobj) > 1e6 * std::abs(dbl(dobj))) {
      res.status = SolveStatus::Infeasible;
      return res;
    }
    auto near = [&] {
      return gap <= std::sqrt(opts.tol_gap) && pinf <= std::sqrt(opts.tol_feas) &&
             dinf <= std::sqrt(opts.tol_feas);
    };
    if (iter >= opts.max_iter || stalls >= 5) {
      res.status = near() ? SolveStatus::NearOptimal : SolveStatus::MaxIter;
      return res;
    }

    try {
      // scaling and scaled data
      std::vector<Scaling<Real>> S(nb);
      std::vector<std::vector<Matrix<Real>>> At(nb);
      std::vector<Matrix<Real>> Rdt(nb);
      for (size_t b = 0; b < nb; ++b) {
        S[b] = nt_scaling(X[b], Z[b], psd[b]);
        for (const auto& [i, a] : P.constraint[b]) {
          Matrix<Real> t = scale(S[b], a, psd[b]);
          symmetrize(t);
          At[b].push_back(std::move(t));
        }
        Rdt[b] = scale(S[b], Rd[b], psd[b]);
        symmetrize(Rdt[b]);
      }
      // Schur complement
      Matrix<Real> M = Matrix<Real>::Zero(m, m);
      for (size_t b = 0; b < nb; ++b) {
        const auto& rows = P.constraint[b];
        for (size_t p = 0; p < rows.size(); ++p)
          for (size_t q = p; q < rows.size(); ++q) {
            Real v = inner(At[b][p], At[b][q]);
            const int i = rows[p].first, j = rows[q].first;
            M(i, j) += v;
            if (i != j) M(j, i) += v;
          }
      }
      Matrix<Real> LM;
      try {
        LM = cholesky(M);
      } catch (const NotPositiveDefinite&) {
        if (near()) {
          res.status = SolveStatus::NearOptimal;
          return res;
        }
        throw NumericalBreakdown("Schur complement is not positive definite; raise the precision");
      }

      struct Direction {
        std::vector<Real> dy;
        std::vector<Matrix<Real>> dxt, dzt;
      };
      auto solve_dir = [&](const std::vector<Matrix<Real>>& R) {
        Vector<Real> rhs(m);
        for (int i = 0; i < m; ++i) rhs(i) = rp[static_cast<size_t>(i)];
        for (size_t b = 0; b < nb; ++b) {
          Matrix<Real> diff = Rdt[b] - R[b];
          for (size_t p = 0; p < P.constraint[b].size(); ++p)
            rhs(P.constraint[b][p].first) += inner(At[b][p], diff);
        }
        Vector<Real> u = forward_solve(LM, rhs);
        Vector<Real> dy(m);
        for (Eigen::Index i = m - 1; i >= 0; --i) {
          Real s = u(i);
          for (Eigen::Index k = i + 1; k < m; ++k) s -= LM(k, i) * dy(k);
          dy(i) = s / LM(i, i);
        }
        Direction d;
        d.dy.assign(dy.data(), dy.data() + m);
        d.dxt.resize(nb);
        d.dzt.resize(nb);
        for (size_t b = 0; b < nb; ++b) {
          d.dzt[b] = Rdt[b];
          for (size_t p = 0; p < P.constraint[b].size(); ++p)
            d.dzt[b] -= dy(P.constraint[b][p].first) * At[b][p];
          d.dxt[b] = R[b] - d.dzt[b];
        }
        return d;
      };
      auto steps = [&](const Direction& d, Real& ap, Real& ad) {
        ap = Real(1e30);
        ad = Real(1e30);
        for (size_t b = 0; b < nb; ++b) {
          ap = max_step(S[b].v, d.dxt[b], psd[b], ap);
          ad = max_step(S[b].v, d.dzt[b], psd[b], ad);
        }
      };

      // predictor
      std::vector<Matrix<Real>> R(nb);
      for (size_t b = 0; b < nb; ++b) {
        R[b] = zero(b);
        for (Eigen::Index k = 0; k < size[b]; ++k) (psd[b] ? R[b](k, k) : R[b](k, 0)) = -S[b].v(k);
      }
      Direction pred = solve_dir(R);
      Real ap, ad;
      steps(pred, ap, ad);
      if (ap > 1) ap = Real(1);
      if (ad > 1) ad = Real(1);
      Real mu_aff(0);
      for (size_t b = 0; b < nb; ++b) {
        Matrix<Real> xa = pred.dxt[b] * ap;
        Matrix<Real> za = pred.dzt[b] * ad;
        for (Eigen::Index k = 0; k < size[b]; ++k) {
          if (psd[b]) {
            xa(k, k) += S[b].v(k);
            za(k, k) += S[b].v(k);
          } else {
            xa(k, 0) += S[b].v(k);
            za(k, 0) += S[b].v(k);
          }
        }
        mu_aff += inner(xa, za);
      }
      mu_aff /= N;
      Real ratio = mu_aff / mu;
      if (ratio < 0) ratio = Real(0);
      if (ratio > 1) ratio = Real(1);
      Real sigma = ratio * ratio * ratio;

      // corrector
      for (size_t b = 0; b < nb; ++b) {
        const Vector<Real>& v = S[b].v;
        if (psd[b]) {
          Matrix<Real> prod = pred.dxt[b] * pred.dzt[b];
          Matrix<Real> rc = -(prod + prod.transpose()) / Real(2);
          for (Eigen::Index k = 0; k < size[b]; ++k) rc(k, k) += sigma * mu - v(k) * v(k);
          for (Eigen::Index i = 0; i < size[b]; ++i)
            for (Eigen::Index j = 0; j < size[b]; ++j) rc(i, j) = rc(i, j) * Real(2) / (v(i) + v(j));
          R[b] = rc;
        } else {
          for (Eigen::Index k = 0; k < size[b]; ++k)
            R[b](k, 0) = (sigma * mu - v(k) * v(k) - pred.dxt[b](k, 0) * pred.dzt[b](k, 0)) / v(k);
        }
      }
      Direction corr = solve_dir(R);
      steps(corr, ap, ad);
      ap = ap * tau;
      ad = ad * tau;
      if (ap > 1) ap = Real(1);
      if (ad > 1) ad = Real(1);

      for (size_t b = 0; b < nb; ++b) {
        X[b] += ap * unscale(S[b], corr.dxt[b], psd[b]);
        Matrix<Real> dz = Rd[b];
        for (size_t p = 0; p < P.constraint[b].size(); ++p)
          dz -= corr.dy[static_cast<size_t>(P.constraint[b][p].first)] * P.constraint[b][p].second;
        Z[b] += ad * dz;
        symmetrize(X[b]);
        symmetrize(Z[b]);
      }
      for (int i = 0; i < m; ++i) y[static_cast<size_t>(i)] += ad * corr.dy[static_cast<size_t>(i)];
      last_sp = dbl(ap);
      last_sd = dbl(ad);
      stalls = (last_sp < 1e-8 && last_sd < 1e-8) ? stalls + 1 : 0;
    } catch (const NumericalBreakdown&) {
      if (near()) {
        res.status = SolveStatus::NearOptimal;
        return res;
      }
      throw;
    }
  }
}

template <class T>
ConicProblem<T> to_conic(const SdpInstance<T>& inst) {
  ConicProblem<T> P;
  const size_t nb = inst.blocks.size();
  const int m = static_cast<int>(inst.constraints.size());
  for (const BlockSpec& b : inst.blocks) P.dims.push_back(b.dim);
  P.dims.push_back(-m);
  P.cost.resize(nb + 1);
  P.constraint.resize(nb + 1);
  for (const auto& [b, mat] : inst.objective) P.cost[static_cast<size_t>(b)] = mat;
  for (int i = 0; i < m; ++i) {
    const auto& row = inst.constraints[static_cast<size_t>(i)];
    for (const auto& [b, mat] : row.coefficients) P.constraint[static_cast<size_t>(b)].emplace_back(i, mat);
    Matrix<T> e = Matrix<T>::Zero(m, 1);
    e(i, 0) = T(1);
    P.constraint[nb].emplace_back(i, std::move(e));
    P.b.push_back(from_rational<T>(row.rhs));
  }
  return P;
}

namespace {

HighReal lift(double x) { return make_high(x, PrecisionScope::current_bits()); }
HighReal lift(const HighReal& x) { return x; }

template <class T>
Matrix<HighReal> lift(const Matrix<T>& a) {
  Matrix<HighReal> out(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out(i, j) = lift(a(i, j));
  return out;
}

}  // namespace

template <class T>
HighReal recompute_objective(const SdpInstance<T>& inst, const std::vector<Matrix<HighReal>>& F) {
  if (F.size() < inst.blocks.size()) throw DimensionMismatch("solution block count");
  HighReal v(1);
  for (const auto& [b, mat] : inst.objective) {
    const Matrix<HighReal>& f = F[static_cast<size_t>(b)];
    if (f.rows() != mat.rows() || f.cols() != mat.cols()) throw DimensionMismatch("solution block shape");
    v += inner(lift(mat), f);
  }
  return v;
}

template <class T>
Solution solve_embedded(const SdpInstance<T>& inst, const SolverOptions& opts) {
  const unsigned bits = std::is_same_v<T, double> ? std::max(inst.precision, 64u) : opts.precision;
  PrecisionScope outer(std::is_same_v<T, double> ? kDefaultGenerationBits : bits);
  ConicProblem<T> P = to_conic(inst);
  if (opts.feasibility_margin < 0) throw InvalidParameters("feasibility margin must be nonnegative");
  if (opts.feasibility_margin > 0) {
    const T margin(opts.feasibility_margin);
    for (T& v : P.b) v -= margin * (T(1) + mag(v));
  }
  ConicResult<T> r = solve_conic(P, opts);
  Solution s;
  s.params = inst.params;
  s.blocks = inst.blocks;
  s.status = r.status;
  s.pinf = r.pinf;
  s.dinf = r.dinf;
  s.gap = r.gap;
  s.log = r.log;
  s.precision = std::is_same_v<T, double> ? 53u : opts.precision;
  s.solver = "embedded";
  s.feasibility_margin = opts.feasibility_margin;
  for (size_t b = 0; b < inst.blocks.size(); ++b) s.F.push_back(lift(r.X[b]));
  for (const T& v : r.y) s.dual.push_back(lift(v));
  s.objective_value = recompute_objective(inst, s.F);
  s.dual_value = HighReal(1) + lift(r.dual_obj);
  return s;
}

std::vector<int> export_block_struct(const std::vector<BlockSpec>& blocks, size_t constraints) {
  std::vector<int> out;
  for (const BlockSpec& b : blocks) out.push_back(b.dim);
  out.push_back(-static_cast<int>(constraints));
  return out;
}

template <class T>
Solution solution_from_result(const SdpInstance<T>& inst, const SdpaResult& r) {
  const size_t nb = inst.blocks.size();
  if (r.y_mat.size() != nb + 1) throw DimensionMismatch("result block count");
  Solution s;
  s.params = inst.params;
  s.blocks = inst.blocks;
  s.solver = "external";
  for (size_t b = 0; b < nb; ++b) {
    if (r.y_mat[b].rows() != inst.blocks[b].dim) throw DimensionMismatch("result block shape");
    s.F.push_back(r.y_mat[b]);
  }
  for (const HighReal& x : r.x_vec) s.dual.push_back(-x);
  s.objective_value = recompute_objective(inst, s.F);
  s.dual_value = HighReal(1) - r.obj_primal;
  if (r.phase == "pdOPT")
    s.status = SolveStatus::Optimal;
  else if (r.phase.find("INF") != std::string::npos || r.phase.find("UNBD") != std::string::npos)
    s.status = SolveStatus::Infeasible;
  else
    s.status = SolveStatus::NearOptimal;
  s.precision = precision_of(r.obj_dual);
  if (s.status != SolveStatus::Infeasible) {
    HighReal reported = HighReal(1) - r.obj_dual;
    HighReal diff = abs(reported - s.objective_value);
    if (diff > HighReal(1e-4) * (HighReal(1) + abs(s.objective_value)))
      throw ConventionMismatch("objective from the solver (" + format_decimal(reported, 12) +
                               ") disagrees with the recomputation (" +
                               format_decimal(s.objective_value, 12) + ")");
    s.gap = to_double(abs(r.obj_primal - r.obj_dual) / (HighReal(1) + abs(r.obj_dual)));
  }
  return s;
}

template <class T>
SdpaResult result_from_solution(const SdpInstance<T>& inst, const Solution& s) {
  const size_t nb = inst.blocks.size();
  const size_t m = inst.constraints.size();
  SdpaResult r;
  r.phase = s.status == SolveStatus::Optimal ? "pdOPT"
            : s.status == SolveStatus::Infeasible ? "pFEAS_dINF"
            : s.status == SolveStatus::NearOptimal ? "pdFEAS"
                                                    : "noINFO";
  r.obj_dual = HighReal(1) - s.objective_value;
  r.obj_primal = HighReal(1) - s.dual_value;
  for (const HighReal& y : s.dual) r.x_vec.push_back(-y);
  Matrix<HighReal> slack = Matrix<HighReal>::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (size_t i = 0; i < m; ++i) {
    const auto& row = inst.constraints[i];
    HighReal v = make_high(row.rhs, PrecisionScope::current_bits());
    for (const auto& [b, mat] : row.coefficients) v -= inner(lift(mat), s.F[static_cast<size_t>(b)]);
    slack(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = v;
  }
  // Z blocks are not kept in a Solution; report C - sum y_i A_i.
  std::vector<Matrix<HighReal>> Z(nb + 1);
  for (size_t b = 0; b < nb; ++b) Z[b] = Matrix<HighReal>::Zero(inst.blocks[b].dim, inst.blocks[b].dim);
  for (const auto& [b, mat] : inst.objective) Z[static_cast<size_t>(b)] += lift(mat);
  Z[nb] = Matrix<HighReal>::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (size_t i = 0; i < m && i < s.dual.size(); ++i) {
    for (const auto& [b, mat] : inst.constraints[i].coefficients)
      Z[static_cast<size_t>(b)] -= s.dual[i] * lift(mat);
    Z[nb](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = -s.dual[i];
  }
  r.x_mat = Z;
  r.y_mat = s.F;
  r.y_mat.push_back(slack);
  return r;
}

template <class T>
Solution solve_external(const SdpInstance<T>& inst, const std::string& command, const std::string& workdir,
                        int digits) {
  std::string cmd = command;
  if (const char* env = std::getenv("KPOINT_SDPA_SOLVER"); env && *env) cmd = env;
  if (cmd.empty()) throw SolverProcessFailure("no external solver command given");
  namespace fs = std::filesystem;
  fs::create_directories(workdir);
  const std::string in = (fs::path(workdir) / "instance.dat-s").string();
  const std::string out = (fs::path(workdir) / "instance.out").string();
  const std::string log = (fs::path(workdir) / "solver.log").string();
  fs::remove(out);
  export_sdpa_file(inst, in, digits);
  const std::string full = cmd + " '" + in + "' '" + out + "' > '" + log + "' 2>&1";
  const int rc = std::system(full.c_str());
  std::string log_text;
  {
    std::ifstream lf(log);
    std::stringstream ss;
    ss << lf.rdbuf();
    log_text = ss.str();
  }
  if (rc != 0) throw SolverProcessFailure("solver exited with status " + std::to_string(rc) + ": " + log_text);
  PrecisionScope scope(std::max<unsigned>(inst.precision, kDefaultGenerationBits));
  SdpaResult r = read_sdpa_result_file(out, export_block_struct(inst.blocks, inst.constraints.size()));
  Solution s = solution_from_result(inst, r);
  s.solver = "external:" + cmd;
  s.solver_log = log_text;
  return s;
}

SdpaResult solve_sdpa_problem(const SdpaProblem& sp, const SolverOptions& opts) {
  PrecisionScope scope(opts.precision);
  const unsigned bits = opts.precision;
  const size_t nb = sp.block_struct.size();
  ConicProblem<HighReal> P;
  P.dims = sp.block_struct;
  P.cost.resize(nb);
  P.constraint.resize(nb);
  for (const auto& c : sp.c) P.b.push_back(parse_high(c, bits));
  // dense per (matrix, block)
  std::vector<std::map<int, Matrix<HighReal>>> data(nb);
  for (const SdpaEntry& e : sp.entries) {
    const size_t b = static_cast<size_t>(e.block - 1);
    const int s = sp.block_struct[b];
    const Eigen::Index n = std::abs(s);
    auto it = data[b].find(e.mat);
    if (it == data[b].end())
      it = data[b].emplace(e.mat, Matrix<HighReal>::Zero(n, s > 0 ? n : 1)).first;
    HighReal v = parse_high(e.value, bits);
    if (e.mat == 0) v = -v;
    if (s > 0) {
      it->second(e.i - 1, e.j - 1) = v;
      it->second(e.j - 1, e.i - 1) = v;
    } else {
      it->second(e.i - 1, 0) = v;
    }
  }
  for (size_t b = 0; b < nb; ++b)
    for (auto& [mat, a] : data[b]) {
      if (mat == 0)
        P.cost[b] = std::move(a);
      else
        P.constraint[b].emplace_back(mat - 1, std::move(a));
    }
  ConicResult<HighReal> r = solve_conic(P, opts);
  SdpaResult out;
  out.phase = r.status == SolveStatus::Optimal ? "pdOPT"
              : r.status == SolveStatus::Infeasible ? "pFEAS_dINF"
              : r.status == SolveStatus::NearOptimal ? "pdFEAS"
                                                      : "noINFO";
  out.obj_dual = -r.primal_obj;
  out.obj_primal = -r.dual_obj;
  for (const HighReal& v : r.y) out.x_vec.push_back(-v);
  auto expand = [&](const std::vector<Matrix<HighReal>>& mats) {
    std::vector<Matrix<HighReal>> o;
    for (size_t b = 0; b < nb; ++b) {
      if (sp.block_struct[b] > 0) {
        o.push_back(mats[b]);
      } else {
        Matrix<HighReal> d = Matrix<HighReal>::Zero(mats[b].rows(), mats[b].rows());
        for (Eigen::Index k = 0; k < mats[b].rows(); ++k) d(k, k) = mats[b](k, 0);
        o.push_back(d);
      }
    }
    return o;
  };
  out.x_mat = expand(r.Z);
  out.y_mat = expand(r.X);
  return out;
}

template ConicResult<double> solve_conic<double>(const ConicProblem<double>&, const SolverOptions&);
template ConicResult<HighReal> solve_conic<HighReal>(const ConicProblem<HighReal>&, const SolverOptions&);
template ConicProblem<double> to_conic<double>(const SdpInstance<double>&);
template ConicProblem<HighReal> to_conic<HighReal>(const SdpInstance<HighReal>&);
template Solution solve_embedded<double>(const SdpInstance<double>&, const SolverOptions&);
template Solution solve_embedded<HighReal>(const SdpInstance<HighReal>&, const SolverOptions&);
template Solution solve_external<double>(const SdpInstance<double>&, const std::string&, const std::string&, int);
template Solution solve_external<HighReal>(const SdpInstance<HighReal>&, const std::string&, const std::string&,
                                           int);
template Solution solution_from_result<double>(const SdpInstance<double>&, const SdpaResult&);
template Solution solution_from_result<HighReal>(const SdpInstance<HighReal>&, const SdpaResult&);
template SdpaResult result_from_solution<double>(const SdpInstance<double>&, const Solution&);
template SdpaResult result_from_solution<HighReal>(const SdpInstance<HighReal>&, const Solution&);
template HighReal recompute_objective<double>(const SdpInstance<double>&, const std::vector<Matrix<HighReal>>&);
template HighReal recompute_objective<HighReal>(const SdpInstance<HighReal>&,
                                                const std::vector<Matrix<HighReal>>&);

}  // namespace kpoint
