#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "kpoint/finite_oracle.hpp"
#include "kpoint/pipeline.hpp"

namespace py = pybind11;
using namespace kpoint;

namespace {

InnerProductSet inner_products(const std::optional<std::string>& a, const std::optional<std::string>& D) {
  if (a && D) throw InvalidParameters("give either a or D, not both");
  if (a) return InnerProductSet::equiangular(parse_rational(*a));
  if (D) return InnerProductSet::parse(*D);
  throw InvalidParameters("one of a or D is required");
}

RunConfig config(const std::optional<std::string>& a, const std::optional<std::string>& D, int n, int k, int d,
                 unsigned precision, bool certify, int jobs) {
  RunConfig c;
  c.D = inner_products(a, D);
  c.n = n;
  c.k = k;
  c.d = d;
  c.precision = precision;
  c.certify = certify;
  c.jobs = jobs;
  return c;
}

FiniteGraph graph(int vertices, const std::vector<std::pair<int, int>>& edges) {
  FiniteGraph g(vertices);
  for (const auto& [u, v] : edges) g.add_edge(u, v);
  return g;
}

py::dict bound_dict(const BoundResult& r) {
  py::dict out;
  out["n"] = r.row.n;
  out["method"] = r.row.method;
  out["value"] = r.row.value.convert_to<double>();
  out["value_text"] = format_fixed(r.row.value, 20);
  out["floor"] = r.row.floor;
  out["certified"] = r.row.certified;
  out["runtime"] = r.row.runtime;
  out["status"] = to_string(r.solution.status);
  out["feasibility_margin"] = r.certified_margin;
  if (r.certificate) {
    out["verdict"] = to_string(r.certificate->verdict);
    out["certified_upper"] = format_decimal(r.certificate->certified_bound.hi(), 30);
    out["certificate_json"] = certificate_json(*r.certificate).dump(2);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "k-point semidefinite bounds for spherical codes";

  // translators run newest first, so the base class goes first
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidParameters>(m, "InvalidParameters", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<TooLarge>(m, "TooLarge", PyExc_ValueError);
  py::register_exception<ConvergenceFailure>(m, "ConvergenceFailure", PyExc_RuntimeError);

  m.def(
      "orbit_counts",
      [](const std::optional<std::string>& a, const std::optional<std::string>& D, int k, int n) {
        OrbitSummary s = orbit_summary(inner_products(a, D), k, n);
        return std::vector<size_t>(s.counts.begin() + 1, s.counts.end());
      },
      py::arg("a") = py::none(), py::arg("D") = py::none(), py::arg("k") = 3, py::arg("n") = 0,
      "Number of orbit representatives of each size 1..k.");

  m.def(
      "bound",
      [](const std::optional<std::string>& a, const std::optional<std::string>& D, int n, int k, int d,
         unsigned precision, bool certify, int jobs) {
        RunConfig c = config(a, D, n, k, d, precision, certify, jobs);
        BoundResult r;
        {
          py::gil_scoped_release release;
          r = run_bound(c);
        }
        return bound_dict(r);
      },
      py::arg("a") = py::none(), py::arg("D") = py::none(), py::arg("n"), py::arg("k") = 3, py::arg("d") = 5,
      py::arg("precision") = 0, py::arg("certify") = false, py::arg("jobs") = 1,
      "Solve (and optionally certify) the k-point bound.");

  m.def(
      "sweep",
      [](const std::optional<std::string>& a, const std::optional<std::string>& D, int k, int n_first,
         int n_last, int n_step, bool certify, bool references, int jobs) {
        RunConfig c = config(a, D, 0, k, 5, 0, certify, 1);
        SweepOptions o;
        o.n_first = n_first;
        o.n_last = n_last;
        o.n_step = n_step;
        o.timestamp = false;
        o.references = references;
        o.jobs = jobs;
        std::ostringstream csv;
        {
          py::gil_scoped_release release;
          run_sweep(c, o, csv);
        }
        return csv.str();
      },
      py::arg("a") = py::none(), py::arg("D") = py::none(), py::arg("k") = 3, py::arg("n_first"),
      py::arg("n_last"), py::arg("n_step") = 1, py::arg("certify") = false, py::arg("references") = true,
      py::arg("jobs") = 1, "CSV table of bounds for each n in the range.");

  m.def(
      "reference_bounds",
      [](int n, const std::string& a, const std::optional<std::string>& pillar) {
        std::optional<Rational> p;
        if (pillar) p = parse_rational(*pillar);
        std::vector<std::tuple<std::string, std::string, bool>> out;
        for (const auto& b : reference_bounds(n, parse_rational(a), p))
          out.emplace_back(b.name, format_rational(b.value), b.lower);
        return out;
      },
      py::arg("n"), py::arg("a"), py::arg("pillar") = py::none(),
      "Closed-form bounds as (name, exact value, is_lower) tuples.");

  m.def(
      "independence_number",
      [](int vertices, const std::vector<std::pair<int, int>>& edges) {
        return independence_number(graph(vertices, edges));
      },
      py::arg("vertices"), py::arg("edges"));

  m.def(
      "theta",
      [](int vertices, const std::vector<std::pair<int, int>>& edges) { return theta_number(graph(vertices, edges)); },
      py::arg("vertices"), py::arg("edges"));

  m.def(
      "delta_k_finite",
      [](int vertices, const std::vector<std::pair<int, int>>& edges, int k, unsigned precision) {
        SolverOptions o = finite_default_options();
        if (precision) o.precision = precision;
        FiniteGraph g = graph(vertices, edges);
        py::gil_scoped_release release;
        return delta_k_finite(g, k, o).convert_to<double>();
      },
      py::arg("vertices"), py::arg("edges"), py::arg("k"), py::arg("precision") = 0,
      "Finite-graph analogue of the k-point bound.");
}
