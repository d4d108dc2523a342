#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kpoint/certify.hpp"
#include "kpoint/reference_bounds.hpp"

namespace kpoint {

struct RunConfig {
  InnerProductSet D;
  int n = 0;
  int k = 3;
  int d = 5;
  unsigned precision = 0;  // 0 picks 256 bits for k <= 4 and double otherwise
  std::string solver = "embedded";  // or "external:<command>"
  bool certify = false;
  unsigned certify_precision = kDefaultCertificationBits;
  int jobs = 1;
  std::string workdir;  // scratch space for external solves
  SolverOptions solver_options;
};

unsigned effective_precision(const RunConfig& config);
DeltaParams params_of(const RunConfig& config);
std::string method_tag(const RunConfig& config);

struct BoundRow {
  int n = 0;
  std::string method;
  HighReal value;
  long floor = 0;
  bool certified = false;
  double runtime = 0;
  bool failed = false;
  std::string error;
};

struct BoundResult {
  BoundRow row;
  Solution solution;
  std::optional<Certificate> certificate;
  double certified_margin = 0;  // feasibility margin of the certified solve
};

// Build, solve and optionally certify. When the raw solution does not
// verify, the instance is re-solved with rhs margins 1e-15, 1e-12, 1e-9.
BoundResult run_bound(const RunConfig& config);

struct OrbitSummary {
  std::vector<size_t> counts;                   // sizes 0..k
  std::vector<std::vector<size_t>> stabilizers;  // per size, per rep
  std::vector<std::string> warnings;
};
OrbitSummary orbit_summary(const InnerProductSet& D, int k, int n);
void print_orbits(const OrbitSummary& s, std::ostream& out);

struct SweepOptions {
  int n_first = 0;
  int n_last = -1;
  int n_step = 1;
  bool timestamp = true;
  bool references = true;
  bool lin_yu = false;
  int jobs = 1;  // pipelines run concurrently across n
};

struct SweepRow {
  int n = 0;
  std::string method;
  std::string value;
  std::string exact;
  std::string floor;
  bool certified = false;
  bool best = false;
  bool lower = false;
  std::string status;
};

// Writes one CSV block per n in increasing order and flushes after each;
// failures become rows with status "failed: ...". Returns every row.
std::vector<SweepRow> run_sweep(const RunConfig& base, const SweepOptions& opts, std::ostream& csv);
std::string csv_header();

// Upper bound on A(n - 4, {1/13, -5/13}) from the main program at the same k.
Rational pillar_bound(const RunConfig& base, int n);

// Checks an SDPA result against an exported instance (path + ".json"
// sidecar). Throws ParseError on malformed files.
Certificate certify_files(const std::string& instance_path, const std::string& result_path,
                          unsigned precision, int jobs);

std::string format_fixed(const HighReal& x, int decimals);

}  // namespace kpoint
