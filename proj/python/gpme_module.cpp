#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gpme/error.hpp"
#include "gpme/evolution.hpp"
#include "gpme/io.hpp"
#include "gpme/laplacian.hpp"
#include "gpme/oracle.hpp"
#include "gpme/resolvent.hpp"
#include "gpme/suites.hpp"

namespace py = pybind11;
using namespace gpme;

namespace {

using Values = std::map<std::string, double>;

NodeFunction on(const Graph& g, const Values& v) { return NodeFunction(g.measure(), v); }
NodeFunction on(const LazyGraph& g, const Values& v) { return NodeFunction(g.measure(), v); }

py::dict solution_dict(const ResolventSolution& s) {
  py::dict d;
  d["u"] = s.u.values();
  d["v"] = s.v.values();
  d["residual_l1"] = s.residual_l1;
  d["iterations"] = s.iterations;
  d["method"] = std::string(to_string(s.method));
  d["truncation_level"] = s.truncation_level;
  d["monotone_certificate"] = s.monotone_certificate;
  std::vector<std::optional<double>> diffs;
  for (const LevelRecord& l : s.levels) diffs.push_back(l.difference_l1);
  d["level_differences"] = diffs;
  d["notes"] = s.notes;
  return d;
}

py::dict evolution_dict(const EvolutionResult& r) {
  py::dict d;
  d["grid"] = r.discretization.grid;
  std::vector<Values> states;
  for (const NodeFunction& u : r.states) states.push_back(u.values());
  d["states"] = states;
  std::vector<double> residuals;
  for (const StepDiagnostic& s : r.diagnostics) residuals.push_back(s.residual_l1);
  d["step_residuals"] = residuals;
  d["delta_estimate"] = r.delta_estimate;
  d["delta_history"] = r.delta_history;
  d["notes"] = r.notes;
  return d;
}

Forcing forcing_from(const Graph& g, const std::optional<Values>& f) {
  return f ? Forcing::constant(on(g, *f)) : Forcing::zero();
}

Forcing forcing_from(const LazyGraph& g, const std::optional<Values>& f) {
  return f ? Forcing::constant(on(g, *f)) : Forcing::zero();
}

Lp lp_from(const std::string& p) {
  if (p == "1") return Lp::one;
  if (p == "2") return Lp::two;
  if (p == "inf") return Lp::inf;
  throw InvalidArgument("p must be '1', '2' or 'inf'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Generalized porous medium equation on weighted graphs";

  static py::exception<Error> base(m, "GpmeError");
  static py::exception<HypothesisRefusal> refusal(m, "HypothesisRefusal", base.ptr());
  static py::exception<ConvergenceError> no_conv(m, "ConvergenceError", base.ptr());
  static py::exception<ParseError> parse(m, "ParseError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const HypothesisRefusal& e) {
      refusal(e.what());
    } catch (const ConvergenceError& e) {
      no_conv(e.what());
    } catch (const ParseError& e) {
      parse(e.what());
    } catch (const Error& e) {
      base(e.what());
    }
  });

  py::class_<Graph>(m, "Graph")
      .def(py::init([](const std::vector<std::tuple<std::string, double, double>>& nodes,
                       const std::vector<std::tuple<std::string, std::string, double>>& edges) {
             GraphBuilder b;
             for (const auto& [id, mu, kappa] : nodes) b.add_node(id, mu, kappa);
             for (const auto& [u, v, w] : edges) b.add_edge(u, v, w);
             return b.build();
           }),
           py::arg("nodes"), py::arg("edges"), "nodes: (id, mu, kappa) tuples; edges: (u, v, w) tuples")
      .def_static("from_json", [](const std::string& text) { return io::graph_from_json(io::Json::parse(text)); })
      .def("to_json", [](const Graph& g) { return io::graph_to_json(g).dump(); })
      .def("__len__", &Graph::size)
      .def_property_readonly("ids", &Graph::ids)
      .def("degree",
           [](const Graph& g, const std::string& x) {
             const Degree d = degree(g, x);
             return std::make_pair(d.deg, d.Deg);
           })
      .def("components", [](const Graph& g) {
        std::vector<std::vector<std::string>> out;
        for (const auto& block : connected_components(g)) {
          out.emplace_back();
          for (NodeIndex i : block) out.back().push_back(g.id(i));
        }
        return out;
      });

  py::class_<LazyGraph, std::shared_ptr<LazyGraph>>(m, "LazyGraph")
      .def_property_readonly("name", &LazyGraph::name)
      .def_property_readonly("root", &LazyGraph::root)
      .def("neighbors",
           [](const LazyGraph& g, const std::string& x, std::size_t limit) {
             std::vector<std::pair<std::string, double>> out;
             for (const Neighbor& n : g.neighbors(x, 0, limit)) out.emplace_back(n.id, n.weight);
             return out;
           },
           py::arg("x"), py::arg("limit") = 64)
      .def("exhaustion", [](const LazyGraph& g, std::size_t n) { return exhaustion(g, n); });

  m.def(
      "family",
      [](const std::string& name, const std::string& params) {
        return std::const_pointer_cast<LazyGraph>(io::family_from_json(name, io::Json::parse(params)));
      },
      py::arg("name"), py::arg("params") = "{}");

  py::class_<Nonlinearity>(m, "Nonlinearity")
      .def_static("power_law", &Nonlinearity::power_law)
      .def_static("parse", &io::parse_phi, "inline JSON or a file path")
      .def("phi", &Nonlinearity::phi)
      .def("psi", &Nonlinearity::psi)
      .def_property_readonly("description", &Nonlinearity::description);

  m.def("laplacian", [](const Graph& g, const Values& v) { return apply(LaplacianContext(g), on(g, v)).values(); });
  m.def("apply_L", [](const Graph& g, const Nonlinearity& nl, const Values& u) {
    return apply_L(LaplacianContext(g), nl, on(g, u)).values();
  });
  m.def(
      "norm", [](const Graph& g, const Values& f, const std::string& p) { return norm(on(g, f), lp_from(p)); },
      py::arg("graph"), py::arg("f"), py::arg("p") = "1");
  m.def(
      "bracket_plus",
      [](const Graph& g, const Values& z, const Values& k, const std::string& p) {
        return bracket_plus(on(g, z), on(g, k), lp_from(p));
      },
      py::arg("graph"), py::arg("z"), py::arg("k"), py::arg("p") = "1");

  m.def(
      "resolve",
      [](const Graph& g, const Nonlinearity& nl, double lambda, const Values& data, double tol) {
        SolverOptions o;
        o.residual_tol = tol;
        return solution_dict(solve_finite(g, nl, lambda, on(g, data), o));
      },
      py::arg("graph"), py::arg("phi"), py::arg("lam"), py::arg("g"), py::arg("tol") = 1e-10);
  m.def(
      "resolve",
      [](const LazyGraph& g, const Nonlinearity& nl, double lambda, const Values& data, double tol,
         std::size_t max_level) {
        ExhaustionOptions o;
        o.tol = tol;
        o.max_level = max_level;
        return solution_dict(solve_exhaustion(g, nl, lambda, on(g, data), o));
      },
      py::arg("graph"), py::arg("phi"), py::arg("lam"), py::arg("g"), py::arg("tol") = 1e-10,
      py::arg("max_level") = 60);

  m.def(
      "evolve",
      [](const Graph& g, const Nonlinearity& nl, const Values& u0, double T, double eps,
         const std::optional<Values>& f, std::optional<double> mild_tol) {
        const Forcing forcing = forcing_from(g, f);
        return evolution_dict(mild_tol ? evolve_mild(g, nl, on(g, u0), forcing, T, eps, *mild_tol)
                                       : evolve(g, nl, on(g, u0), forcing, T, eps));
      },
      py::arg("graph"), py::arg("phi"), py::arg("u0"), py::arg("T"), py::arg("eps"), py::arg("f") = py::none(),
      py::arg("mild_tol") = py::none(), "f is a constant forcing, zero when omitted");
  m.def(
      "evolve",
      [](const LazyGraph& g, const Nonlinearity& nl, const Values& u0, double T, double eps,
         const std::optional<Values>& f, std::optional<double> mild_tol) {
        const Forcing forcing = forcing_from(g, f);
        return evolution_dict(mild_tol ? evolve_mild(g, nl, on(g, u0), forcing, T, eps, *mild_tol)
                                       : evolve(g, nl, on(g, u0), forcing, T, eps));
      },
      py::arg("graph"), py::arg("phi"), py::arg("u0"), py::arg("T"), py::arg("eps"), py::arg("f") = py::none(),
      py::arg("mild_tol") = py::none());

  m.def("heat_exact", [](const Graph& g, double t, const Values& u0) {
    return oracle::expm_apply(oracle::assemble_dense(g), t, on(g, u0)).values();
  });

  m.def(
      "check",
      [](const std::string& suite, std::optional<std::uint64_t> seed, std::optional<std::size_t> cases) {
        const suites::SuiteReport r = suites::run_suite(suite, {seed, cases});
        py::dict d;
        d["name"] = r.name;
        d["cases"] = r.cases;
        d["passed"] = r.passed;
        d["ok"] = r.ok();
        d["summary"] = r.summary;
        d["failures"] = r.failures;
        return d;
      },
      py::arg("suite"), py::arg("seed") = py::none(), py::arg("cases") = py::none());
  m.attr("suites") = suites::names();
}
