#include <fstream>
#include <iostream>
#include <regex>

#include <CLI11.hpp>

#include "kpoint/finite_oracle.hpp"
#include "kpoint/pipeline.hpp"

using namespace kpoint;

namespace {

constexpr int kExitInconclusive = 1;
constexpr int kExitParse = 2;
constexpr int kExitError = 3;

struct Common {
  std::string a;
  std::string D;
  int n = 0;
  int k = 3;
  int d = 5;
  unsigned precision = 0;
  std::string solver = "embedded";
  int jobs = 1;
};

void add_common(CLI::App* app, Common& c, bool need_n = true) {
  app->add_option("--a", c.a, "equiangular cosine p/q, D = {-a, a}");
  app->add_option("--D", c.D, "explicit inner product set, comma separated p/q");
  if (need_n) app->add_option("--n", c.n, "dimension");
  app->add_option("--k", c.k, "hierarchy level 2..6")->check(CLI::Range(2, 6));
  app->add_option("--d", c.d, "maximum Gegenbauer degree");
  app->add_option("--precision", c.precision, "bits; 53 selects double, 0 picks by k");
  app->add_option("--solver", c.solver, "embedded or external:<command>");
  app->add_option("--jobs", c.jobs, "worker threads");
}

RunConfig to_config(const Common& c) {
  RunConfig r;
  if (c.a.empty() == c.D.empty()) throw InvalidParameters("give exactly one of --a and --D");
  r.D = c.a.empty() ? InnerProductSet::parse(c.D) : InnerProductSet::equiangular(parse_rational(c.a));
  r.n = c.n;
  r.k = c.k;
  r.d = c.d;
  r.precision = c.precision;
  r.solver = c.solver;
  r.jobs = std::max(1, c.jobs);
  return r;
}

// "a:b" or "a:b:step"
void parse_range(const std::string& text, SweepOptions& o) {
  static const std::regex pattern(R"(\s*(\d+)\s*:\s*(\d+)\s*(?::\s*(\d+)\s*)?)");
  std::smatch m;
  if (!std::regex_match(text, m, pattern)) throw ParseError("expected --n-range first:last[:step], got '" + text + "'");
  o.n_first = std::stoi(m[1]);
  o.n_last = std::stoi(m[2]);
  o.n_step = m[3].matched ? std::stoi(m[3]) : 1;
  if (o.n_step < 1) throw ParseError("range step must be positive");
}

void print_bound(const BoundResult& r, std::ostream& out) {
  out << r.row.method << " n=" << r.row.n << " value " << format_fixed(r.row.value, 10) << " floor " << r.row.floor
      << " status " << to_string(r.solution.status) << " time " << r.row.runtime << "s\n";
  if (r.certificate) {
    const Certificate& c = *r.certificate;
    out << "certificate " << to_string(c.verdict) << " bound <= " << format_fixed(c.certified_bound.hi(), 10)
        << " floor " << c.floor_bound;
    if (r.certified_margin > 0) out << " (rhs margin " << r.certified_margin << ")";
    out << "\n";
    for (const auto& f : c.failures()) out << "  " << f << "\n";
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path);
  f << text;
}

template <class T>
void export_instance(const RunConfig& cfg, const std::string& path) {
  const unsigned bits = effective_precision(cfg);
  PrecisionScope scope(bits > 53 ? bits : kDefaultGenerationBits);
  SdpInstance<T> inst = build_delta_k<T>(params_of(cfg), cfg.jobs);
  export_sdpa_file(inst, path);
  std::map<int, int> per_size;
  for (const auto& c : inst.constraints) ++per_size[c.orbit_size];
  std::cout << "constraints " << inst.constraints.size() << " blocks " << inst.blocks.size();
  std::map<int, int> reps;
  for (const auto& b : inst.blocks)
    if (b.l == 0) ++reps[b.rep_size];
  std::cout << " rep sizes";
  for (auto [s, c] : reps) std::cout << " " << s << ":" << c;
  std::cout << "\nwrote " << path << " and " << path << ".json\n";
  for (const auto& w : inst.warnings) std::cout << "warning: " << w << "\n";
}

template <class T>
void solve_to_file(const RunConfig& cfg, const std::string& instance_path, const std::string& out_path) {
  const unsigned bits = effective_precision(cfg);
  const unsigned scope_bits = bits > 53 ? bits : kDefaultGenerationBits;
  std::optional<SdpInstance<T>> inst;
  {
    PrecisionScope scope(scope_bits);
    inst.emplace(build_delta_k<T>(params_of(cfg), cfg.jobs));
  }
  if (!instance_path.empty()) export_sdpa_file(*inst, instance_path);
  Solution s;
  if (cfg.solver.rfind("external", 0) == 0) {
    std::string cmd = cfg.solver.size() > 9 ? cfg.solver.substr(9) : std::string();
    s = solve_external(*inst, cmd, out_path + ".work");
  } else {
    SolverOptions o;
    o.precision = scope_bits;
    s = solve_embedded(*inst, o);
  }
  std::cout << "value " << format_fixed(s.objective_value, 10) << " status " << to_string(s.status) << "\n";
  if (!out_path.empty()) {
    PrecisionScope scope(scope_bits);
    std::ofstream f(out_path);
    if (!f) throw IoError("cannot write " + out_path);
    write_sdpa_result(result_from_solution(*inst, s), export_block_struct(inst->blocks, inst->constraints.size()), f);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-point semidefinite bounds for spherical codes and equiangular lines"};
  app.require_subcommand(1);

  Common orbits_c;
  auto* orbits = app.add_subcommand("orbits", "orbit counts and stabilizer sizes");
  add_common(orbits, orbits_c);

  Common build_c;
  std::string build_out;
  auto* build = app.add_subcommand("build", "build an instance and export it in SDPA format");
  add_common(build, build_c);
  build->add_option("--out", build_out, "output .dat-s path")->required();

  Common solve_c;
  std::string solve_out, solve_instance;
  auto* solve = app.add_subcommand("solve", "solve an instance and write the SDPA result layout");
  add_common(solve, solve_c);
  solve->add_option("--out", solve_out, "result file");
  solve->add_option("--instance-out", solve_instance, "also export the instance here");

  Common bound_c;
  bool bound_certify = false;
  std::string bound_out;
  auto* bound = app.add_subcommand("bound", "compute (and certify) one bound");
  add_common(bound, bound_c);
  bound->add_flag("--certify", bound_certify, "verify in interval arithmetic");
  bound->add_option("--out", bound_out, "certificate JSON path");

  Common sweep_c;
  std::string sweep_range, sweep_out;
  bool sweep_certify = false, no_timestamp = false, no_refs = false, lin_yu = false;
  auto* sweep = app.add_subcommand("sweep", "bounds over a dimension range as CSV");
  add_common(sweep, sweep_c, false);
  sweep->add_option("--n-range", sweep_range, "first:last[:step]")->required();
  sweep->add_option("--out", sweep_out, "CSV path (default stdout)");
  sweep->add_flag("--certify", sweep_certify, "verify every row in interval arithmetic");
  sweep->add_flag("--no-timestamp", no_timestamp, "omit the generated-at comment line");
  sweep->add_flag("--no-references", no_refs, "only the semidefinite bound rows");
  sweep->add_flag("--lin-yu", lin_yu, "include the pillar bound (solves on D = {1/13, -5/13})");

  std::string cert_instance, cert_solution, cert_out;
  unsigned cert_precision = kDefaultCertificationBits;
  int cert_jobs = 1;
  auto* certify = app.add_subcommand("certify", "verify an SDPA result against an exported instance");
  certify->add_option("--instance", cert_instance, ".dat-s path with .json sidecar")->required();
  certify->add_option("--solution", cert_solution, "SDPA result file")->required();
  certify->add_option("--out", cert_out, "certificate JSON path");
  certify->add_option("--precision", cert_precision);
  certify->add_option("--jobs", cert_jobs);

  std::string ref_a, ref_pillar;
  int ref_n = 0;
  auto* reference = app.add_subcommand("reference", "closed-form reference bounds");
  reference->add_option("--a", ref_a)->required();
  reference->add_option("--n", ref_n)->required();
  reference->add_option("--pillar", ref_pillar, "upper bound for A(n-4, {1/13,-5/13})");

  std::string sdpa_in, sdpa_out;
  unsigned sdpa_precision = kDefaultGenerationBits;
  auto* sdpa = app.add_subcommand("sdpa-solve", "embedded solver behind the SDPA file interface");
  sdpa->add_option("input", sdpa_in)->required();
  sdpa->add_option("output", sdpa_out)->required();
  sdpa->add_option("--precision", sdpa_precision);

  std::string graph_path;
  int graph_k = 2;
  auto* finite = app.add_subcommand("finite", "independence number and relaxations of a finite graph");
  finite->add_option("--graph", graph_path, "edge list")->required();
  finite->add_option("--k", graph_k)->check(CLI::Range(2, 6));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*orbits) {
      RunConfig cfg = to_config(orbits_c);
      print_orbits(orbit_summary(cfg.D, cfg.k, cfg.n > 0 ? cfg.n : cfg.k), std::cout);
    } else if (*build) {
      RunConfig cfg = to_config(build_c);
      if (effective_precision(cfg) <= 53)
        export_instance<double>(cfg, build_out);
      else
        export_instance<HighReal>(cfg, build_out);
    } else if (*solve) {
      RunConfig cfg = to_config(solve_c);
      if (effective_precision(cfg) <= 53)
        solve_to_file<double>(cfg, solve_instance, solve_out);
      else
        solve_to_file<HighReal>(cfg, solve_instance, solve_out);
    } else if (*bound) {
      RunConfig cfg = to_config(bound_c);
      cfg.certify = bound_certify;
      BoundResult r = run_bound(cfg);
      print_bound(r, std::cout);
      if (!bound_out.empty() && r.certificate) write_text(bound_out, certificate_json(*r.certificate).dump(2) + "\n");
      if (bound_certify && !r.row.certified) return kExitInconclusive;
    } else if (*sweep) {
      RunConfig cfg = to_config(sweep_c);
      cfg.certify = sweep_certify;
      SweepOptions o;
      parse_range(sweep_range, o);
      o.timestamp = !no_timestamp;
      o.references = !no_refs;
      o.lin_yu = lin_yu;
      o.jobs = cfg.jobs;
      cfg.jobs = 1;
      if (sweep_out.empty()) {
        run_sweep(cfg, o, std::cout);
      } else {
        std::ofstream f(sweep_out);
        if (!f) throw IoError("cannot write " + sweep_out);
        run_sweep(cfg, o, f);
      }
    } else if (*certify) {
      Certificate c = certify_files(cert_instance, cert_solution, cert_precision, std::max(1, cert_jobs));
      const std::string text = certificate_json(c).dump(2) + "\n";
      if (cert_out.empty())
        std::cout << text;
      else
        write_text(cert_out, text);
      std::cerr << to_string(c.verdict) << " bound <= " << format_fixed(c.certified_bound.hi(), 10) << " floor "
                << c.floor_bound << "\n";
      if (c.verdict != Verdict::Certified) return kExitInconclusive;
    } else if (*reference) {
      std::optional<Rational> pillar;
      if (!ref_pillar.empty()) pillar = parse_rational(ref_pillar);
      for (const ReferenceBound& b : reference_bounds(ref_n, parse_rational(ref_a), pillar))
        std::cout << b.name << " " << format_rational(b.value) << (b.lower ? " lower" : "") << "\n";
    } else if (*sdpa) {
      SdpaProblem p = read_sdpa_file(sdpa_in);
      SolverOptions o;
      o.precision = sdpa_precision;
      SdpaResult r = solve_sdpa_problem(p, o);
      PrecisionScope scope(sdpa_precision);
      std::ofstream f(sdpa_out);
      if (!f) throw IoError("cannot write " + sdpa_out);
      write_sdpa_result(r, p.block_struct, f);
      std::cout << "phase.value = " << r.phase << "\n";
    } else if (*finite) {
      FiniteGraph g = read_edge_list(graph_path);
      std::cout << "vertices " << g.vertex_count() << " edges " << g.edge_count() << "\n";
      if (g.vertex_count() <= 40) std::cout << "alpha " << independence_number(g) << "\n";
      std::cout << "theta " << theta_number(g) << "\n";
      for (int k = 2; k <= graph_k; ++k) std::cout << "delta" << k << " " << delta_k_finite_detailed(g, k).value << "\n";
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return 0;
}
