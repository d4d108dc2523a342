#include "kpoint/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <ctime>
#include <filesystem>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <unistd.h>

namespace kpoint {

unsigned effective_precision(const RunConfig& c) {
  if (c.precision != 0) return c.precision;
  // k = 4 breaks down in double precision: dual iterates lose definiteness.
  return c.k <= 4 ? kDefaultGenerationBits : 53u;
}

DeltaParams params_of(const RunConfig& c) {
  DeltaParams p{c.D, c.n, c.k, c.d};
  validate(p);
  return p;
}

std::string method_tag(const RunConfig& c) { return "delta" + std::to_string(c.k); }

std::string format_fixed(const HighReal& x, int decimals) {
  std::string s = x.str(decimals, std::ios_base::fixed);
  if (s.find_first_not_of("-0.") == std::string::npos && !s.empty() && s[0] == '-') s.erase(0, 1);
  return s;
}

namespace {

long floor_of(const HighReal& x) { return boost::multiprecision::floor(x).convert_to<long>(); }

long floor_of(const Rational& q) {
  Integer f = numerator(q) / denominator(q);
  if (Rational(f) > q) f -= 1;
  return f.convert_to<long>();
}

std::string default_workdir(const RunConfig& c) {
  static std::atomic<int> counter{0};
  return (std::filesystem::temp_directory_path() /
          ("kpoint-" + std::to_string(::getpid()) + "-" + std::to_string(c.n) + "-" + std::to_string(counter++)))
      .string();
}

template <class T>
BoundResult run_typed(const RunConfig& c, unsigned bits) {
  const auto t0 = std::chrono::steady_clock::now();
  const DeltaParams p = params_of(c);
  const unsigned scope_bits = bits > 53 ? bits : kDefaultGenerationBits;

  const bool external = c.solver.rfind("external", 0) == 0;
  if (!external && c.solver != "embedded")
    throw InvalidParameters("solver must be 'embedded' or 'external:<command>'");
  std::string command;
  if (external) {
    if (c.solver.size() > 8 && c.solver[8] != ':') throw InvalidParameters("expected external:<command>");
    command = c.solver.size() > 9 ? c.solver.substr(9) : std::string();
  }

  std::optional<SdpInstance<T>> inst;
  {
    PrecisionScope scope(scope_bits);
    inst.emplace(build_delta_k<T>(p, c.jobs));
  }
  SolverOptions opts = c.solver_options;
  opts.precision = scope_bits;

  auto solve = [&](double margin) {
    if (external) {
      if (margin > 0) throw InvalidParameters("feasibility margins need the embedded solver");
      return solve_external(*inst, command, c.workdir.empty() ? default_workdir(c) : c.workdir);
    }
    SolverOptions o = opts;
    o.feasibility_margin = margin;
    return solve_embedded(*inst, o);
  };

  BoundResult out;
  out.solution = solve(c.solver_options.feasibility_margin);
  if (out.solution.status == SolveStatus::Infeasible || out.solution.status == SolveStatus::MaxIter)
    throw ConvergenceFailure("solver ended with status " + to_string(out.solution.status));
  out.row.n = c.n;
  out.row.method = method_tag(c);
  out.row.value = out.solution.objective_value;
  out.row.floor = floor_of(out.row.value);

  if (c.certify) {
    Certificate cert = verify(p, out.solution, c.certify_precision, c.jobs);
    out.certified_margin = out.solution.feasibility_margin;
    if (cert.verdict != Verdict::Certified && !external) {
      for (double margin : {1e-15, 1e-12, 1e-9}) {
        if (margin <= c.solver_options.feasibility_margin) continue;
        Solution retry = solve(margin);
        if (retry.status == SolveStatus::Infeasible || retry.status == SolveStatus::MaxIter) continue;
        Certificate again = verify(p, retry, c.certify_precision, c.jobs);
        cert = std::move(again);
        out.certified_margin = margin;
        if (cert.verdict == Verdict::Certified) break;
      }
    }
    out.row.certified = cert.verdict == Verdict::Certified;
    out.certificate = std::move(cert);
  }
  out.row.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace

BoundResult run_bound(const RunConfig& c) {
  const unsigned bits = effective_precision(c);
  if (bits <= 53) return run_typed<double>(c, bits);
  return run_typed<HighReal>(c, bits);
}

OrbitSummary orbit_summary(const InnerProductSet& D, int k, int n) {
  if (k < 1 || k > 6) throw InvalidParameters("k must lie in 1..6");
  OrbitCatalog cat = enumerate_orbits(D, k, n);
  OrbitSummary s;
  s.counts = cat.counts();
  for (int size = 0; size <= k; ++size) {
    std::vector<size_t> st;
    for (const OrbitRep& r : cat.reps(size)) st.push_back(r.stabilizer.size());
    s.stabilizers.push_back(std::move(st));
  }
  s.warnings = cat.warnings();
  return s;
}

void print_orbits(const OrbitSummary& s, std::ostream& out) {
  for (size_t i = 1; i < s.counts.size(); ++i) out << (i > 1 ? " " : "") << s.counts[i];
  out << "\n";
  for (size_t size = 0; size < s.counts.size(); ++size) {
    out << "size " << size << ": " << s.counts[size] << " orbits, stabilizer sizes";
    std::map<size_t, size_t> hist;
    for (size_t st : s.stabilizers[size]) ++hist[st];
    for (auto [st, mult] : hist) out << " " << st << "x" << mult;
    out << "\n";
  }
  for (const auto& w : s.warnings) out << "warning: " << w << "\n";
}

std::string csv_header() { return "n,method,value,exact,floor,certified,best,bound,status"; }

namespace {

std::string sanitize(std::string s) {
  for (char& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ' ';
  return s;
}

std::optional<Rational> equiangular_a(const InnerProductSet& D) {
  if (D.size() != 2) return std::nullopt;
  const Rational& x = D[0];
  const Rational& y = D[1];
  if (x != -y || x == 0) return std::nullopt;
  return x > 0 ? x : y;
}

std::vector<SweepRow> rows_for(const RunConfig& base, int n, const SweepOptions& opts) {
  std::vector<SweepRow> rows;
  RunConfig c = base;
  c.n = n;
  SweepRow delta;
  delta.n = n;
  delta.method = method_tag(c);
  try {
    BoundResult r = run_bound(c);
    delta.value = format_fixed(r.row.value, 10);
    delta.floor = std::to_string(r.row.floor);
    delta.certified = r.row.certified;
    delta.status = r.solution.status == SolveStatus::Optimal ? "ok" : "near-optimal";
    if (c.certify && !r.row.certified) delta.status = "inconclusive";
  } catch (const std::exception& e) {
    delta.status = "failed: " + sanitize(e.what());
  }
  rows.push_back(delta);

  auto a = equiangular_a(c.D);
  if (opts.references && a) {
    std::optional<Rational> pillar;
    if (opts.lin_yu && *a == Rational(1, 5) && n >= 63) {
      try {
        pillar = pillar_bound(c, n);
      } catch (const std::exception& e) {
        SweepRow f;
        f.n = n;
        f.method = "lin_yu";
        f.status = "failed: " + sanitize(e.what());
        rows.push_back(f);
      }
    }
    for (const ReferenceBound& b : reference_bounds(n, *a, pillar)) {
      SweepRow r;
      r.n = n;
      r.method = b.name;
      r.exact = format_rational(b.value);
      r.value = format_fixed(make_high(b.value, kDefaultGenerationBits), 10);
      r.floor = std::to_string(floor_of(b.value));
      r.lower = b.lower;
      r.status = "ok";
      rows.push_back(r);
    }
  }
  long best = std::numeric_limits<long>::max();
  for (const SweepRow& r : rows)
    if (!r.lower && !r.floor.empty()) best = std::min(best, std::stol(r.floor));
  for (SweepRow& r : rows) r.best = !r.lower && !r.floor.empty() && std::stol(r.floor) == best;
  return rows;
}

void write_row(const SweepRow& r, std::ostream& out) {
  out << r.n << ',' << r.method << ',' << r.value << ',' << r.exact << ',' << r.floor << ','
      << (r.certified ? 1 : 0) << ',' << (r.best ? 1 : 0) << ',' << (r.lower ? "lower" : "upper") << ','
      << r.status << '\n';
}

}  // namespace

std::vector<SweepRow> run_sweep(const RunConfig& base, const SweepOptions& opts, std::ostream& csv) {
  if (opts.n_step < 1) throw InvalidParameters("n step must be positive");
  if (opts.timestamp) {
    std::time_t t = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    csv << "# generated " << buf << '\n';
  }
  csv << csv_header() << '\n';
  csv.flush();

  std::vector<int> ns;
  for (int n = opts.n_first; n <= opts.n_last; n += opts.n_step) ns.push_back(n);
  std::vector<std::optional<std::vector<SweepRow>>> done(ns.size());
  std::mutex m;
  std::condition_variable cv;
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < ns.size(); i = next++) {
      auto rows = rows_for(base, ns[i], opts);
      std::lock_guard lock(m);
      done[i] = std::move(rows);
      cv.notify_all();
    }
  };
  const int nthreads = std::max(1, std::min<int>(opts.jobs, static_cast<int>(ns.size())));
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);

  std::vector<SweepRow> all;
  for (size_t i = 0; i < ns.size(); ++i) {
    std::unique_lock lock(m);
    cv.wait(lock, [&] { return done[i].has_value(); });
    for (const SweepRow& r : *done[i]) {
      write_row(r, csv);
      all.push_back(r);
    }
    csv.flush();
  }
  for (auto& th : pool) th.join();
  return all;
}

Rational pillar_bound(const RunConfig& base, int n) {
  RunConfig c = base;
  c.D = InnerProductSet({Rational(1, 13), Rational(-5, 13)});
  c.n = n - 4;
  BoundResult r = run_bound(c);
  HighReal v = r.certificate && r.row.certified ? r.certificate->certified_bound.hi() : r.row.value;
  // Round up to a rational with 30 decimals so the bound stays valid.
  const Integer scale = boost::multiprecision::pow(Integer(10), 30);
  HighReal scaled = boost::multiprecision::ceil(v * make_high(Rational(scale), precision_of(v) + 128));
  return Rational(Integer(scaled.str(0, std::ios_base::fixed)), scale);
}

Certificate certify_files(const std::string& instance_path, const std::string& result_path, unsigned precision,
                          int jobs) {
  nlohmann::json side = read_json_file(instance_path + ".json");
  DeltaParams p = params_from_sidecar(side);
  unsigned bits = 53;
  try {
    bits = side.at("precision").get<unsigned>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed sidecar: ") + e.what());
  }
  SdpaProblem prob = read_sdpa_file(instance_path);
  auto run = [&](auto tag) {
    using T = decltype(tag);
    std::optional<SdpInstance<T>> inst;
    {
      PrecisionScope scope(bits > 53 ? bits : kDefaultGenerationBits);
      inst.emplace(build_delta_k<T>(p, jobs));
    }
    std::vector<int> bs = export_block_struct(inst->blocks, inst->constraints.size());
    if (prob.block_struct != bs || prob.m != static_cast<int>(inst->constraints.size()))
      throw ParseError("instance file does not match its sidecar");
    Solution s;
    {
      PrecisionScope scope(std::max(bits, kDefaultGenerationBits));
      s = solution_from_result(*inst, read_sdpa_result_file(result_path, bs));
    }
    return verify(p, s, precision, jobs);
  };
  return bits > 53 ? run(HighReal()) : run(double());
}

}  // namespace kpoint
