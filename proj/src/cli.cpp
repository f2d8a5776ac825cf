#include "gpme/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gpme/error.hpp"
#include "gpme/evolution.hpp"
#include "gpme/io.hpp"
#include "gpme/resolvent.hpp"
#include "gpme/suites.hpp"

namespace gpme::cli {

namespace {

using io::Json;

enum class LogLevel { quiet, info, debug };

LogLevel log_level() {
  const char* env = std::getenv("GPME_LOG");
  if (!env) return LogLevel::info;
  const std::string v(env);
  if (v == "quiet") return LogLevel::quiet;
  if (v == "debug") return LogLevel::debug;
  return LogLevel::info;
}

class Logger {
 public:
  Logger(std::ostream& err, LogLevel level) : err_(err), level_(level) {}
  void info(const std::string& msg) const {
    if (level_ != LogLevel::quiet) err_ << "gpme: " << msg << '\n';
  }
  void debug(const std::string& msg) const {
    if (level_ == LogLevel::debug) err_ << "gpme[debug]: " << msg << '\n';
  }

 private:
  std::ostream& err_;
  LogLevel level_;
};

struct GraphSource {
  std::string graph_file;
  std::string family;
  std::string family_params;
};

struct Domain {
  std::optional<Graph> finite;
  std::shared_ptr<const LazyGraph> lazy;
  Measure measure() const { return finite ? finite->measure() : lazy->measure(); }
};

Domain load_domain(const GraphSource& src) {
  Domain d;
  if (!src.graph_file.empty() == !src.family.empty()) {
    throw ParseError("exactly one of --graph and --family is required");
  }
  if (!src.graph_file.empty()) {
    d.finite = io::load_graph(src.graph_file);
    return d;
  }
  Json params = Json::object();
  if (!src.family_params.empty()) {
    const auto first = src.family_params.find_first_not_of(" \t\n");
    if (first != std::string::npos && src.family_params[first] == '{') {
      try {
        params = Json::parse(src.family_params);
      } catch (const Json::exception& e) {
        throw ParseError(std::string("family parameters: ") + e.what());
      }
    } else {
      params = io::read_json_file(src.family_params);
    }
  }
  d.lazy = io::family_from_json(src.family, params);
  return d;
}

void add_graph_options(CLI::App& cmd, GraphSource& src) {
  cmd.add_option("--graph", src.graph_file, "graph JSON file");
  cmd.add_option("--family", src.family, "lazy family: half_line, integer_lattice_1d, binary_tree, star_infinite");
  cmd.add_option("--family-params", src.family_params, "family parameters (inline JSON or file)");
}

void emit(std::ostream& out, const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    io::write_text_file(path, text);
  }
}

void report_error(std::ostream& err, const char* code, const std::string& reason, const std::string& context) {
  Json j{{"code", code}, {"reason", reason}, {"context", context}};
  err << j.dump() << '\n';
}

std::string number(const Json& j) {
  if (!j.is_number()) throw ParseError("expected a number, got " + j.dump());
  return io::format_double(j.get<double>());
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const HypothesisRefusal*>(&e) || dynamic_cast<const ConvergenceError*>(&e) ||
      dynamic_cast<const TruncationError*>(&e)) {
    return 1;
  }
  return 2;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const Logger log(err, log_level());
  CLI::App app{"Generalized porous medium equation on weighted graphs", "gpme"};
  app.require_subcommand(1);

  // resolve
  GraphSource resolve_src;
  std::string resolve_phi;
  std::string resolve_g;
  std::string resolve_out;
  double resolve_lambda = 0.0;
  double resolve_tol = 1e-10;
  std::size_t resolve_max_level = 60;
  auto* resolve = app.add_subcommand("resolve", "solve (id + lambda Delta Phi) u = g");
  add_graph_options(*resolve, resolve_src);
  resolve->add_option("--phi", resolve_phi, "nonlinearity spec (inline JSON or file)")->required();
  resolve->add_option("--lambda", resolve_lambda, "lambda > 0")->required();
  resolve->add_option("--g", resolve_g, "right-hand side (JSON map or node,value CSV)")->required();
  resolve->add_option("--tol", resolve_tol, "residual / level-difference tolerance");
  resolve->add_option("--max-level", resolve_max_level, "exhaustion level cap");
  resolve->add_option("--out", resolve_out, "output file (default stdout)");

  // evolve
  GraphSource evolve_src;
  std::string evolve_phi;
  std::string evolve_u0;
  std::string evolve_forcing = "zero";
  std::string evolve_out;
  std::string evolve_csv;
  double evolve_T = 0.0;
  double evolve_eps = 0.0;
  std::optional<double> evolve_mild_tol;
  auto* evolve_cmd = app.add_subcommand("evolve", "implicit Euler trajectory of du/dt + Delta Phi u = f");
  add_graph_options(*evolve_cmd, evolve_src);
  evolve_cmd->add_option("--phi", evolve_phi, "nonlinearity spec (inline JSON or file)")->required();
  evolve_cmd->add_option("--u0", evolve_u0, "initial datum (JSON map or node,value CSV)")->required();
  evolve_cmd->add_option("--forcing", evolve_forcing, "forcing JSON file or 'zero'");
  evolve_cmd->add_option("--T", evolve_T, "final time > 0")->required();
  evolve_cmd->add_option("--eps", evolve_eps, "largest step > 0")->required();
  evolve_cmd->add_option("--mild-tol", evolve_mild_tol, "refine eps until consecutive trajectories agree to this");
  evolve_cmd->add_option("--out", evolve_out, "output JSON file (default stdout)");
  evolve_cmd->add_option("--csv", evolve_csv, "optional t,node,value stream");

  // check
  std::string suite;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> cases;
  auto* check = app.add_subcommand("check", "run a seeded property suite");
  check->add_option("suite", suite, "suite name")->required();
  check->add_option("--seed", seed, "random seed (required for randomized suites)");
  check->add_option("--cases", cases, "number of cases");

  // emit-plot
  std::string plot_in;
  std::string plot_out;
  auto* plot = app.add_subcommand("emit-plot", "turn a resolve/evolve JSON result into CSV");
  plot->add_option("--in", plot_in, "result JSON")->required();
  plot->add_option("--out", plot_out, "CSV output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what(), "");
    return 2;
  }

  try {
    if (resolve->parsed()) {
      if (!(resolve_lambda > 0.0)) throw ParseError("--lambda must be positive");
      const Domain d = load_domain(resolve_src);
      const Nonlinearity nl = io::parse_phi(resolve_phi);
      const NodeFunction g = io::load_function(resolve_g, d.measure());
      ResolventSolution s;
      SolverOptions so;
      so.residual_tol = resolve_tol;
      if (d.finite) {
        log.info("resolve on a finite graph with " + std::to_string(d.finite->size()) + " nodes, " + nl.description());
        s = solve_finite(*d.finite, nl, resolve_lambda, g, so);
      } else {
        log.info("resolve on '" + d.lazy->name() + "' by Dirichlet exhaustion, " + nl.description());
        ExhaustionOptions eo;
        eo.tol = resolve_tol;
        eo.max_level = resolve_max_level;
        eo.solver = so;
        s = solve_exhaustion(*d.lazy, nl, resolve_lambda, g, eo);
        for (const LevelRecord& l : s.levels) {
          log.debug("level " + std::to_string(l.level) + ": " + std::to_string(l.nodes) + " nodes, difference " +
                    (l.difference_l1 ? io::format_double(*l.difference_l1) : std::string("-")));
        }
      }
      log.info("residual " + io::format_double(s.residual_l1) + " after " + std::to_string(s.iterations) + " iterations");
      emit(out, resolve_out, io::solution_to_json(s).dump(2) + "\n");
      return 0;
    }

    if (evolve_cmd->parsed()) {
      if (!(evolve_T > 0.0)) throw ParseError("--T must be positive");
      if (!(evolve_eps > 0.0)) throw ParseError("--eps must be positive");
      const Domain d = load_domain(evolve_src);
      const Nonlinearity nl = io::parse_phi(evolve_phi);
      const NodeFunction u0 = io::load_function(evolve_u0, d.measure());
      const Forcing f =
          evolve_forcing == "zero" ? Forcing::zero() : io::forcing_from_json(io::read_json_file(evolve_forcing), d.measure());
      EvolutionResult r;
      if (d.finite) {
        r = evolve_mild_tol ? evolve_mild(*d.finite, nl, u0, f, evolve_T, evolve_eps, *evolve_mild_tol)
                            : evolve(*d.finite, nl, u0, f, evolve_T, evolve_eps);
      } else {
        r = evolve_mild_tol ? evolve_mild(*d.lazy, nl, u0, f, evolve_T, evolve_eps, *evolve_mild_tol)
                            : evolve(*d.lazy, nl, u0, f, evolve_T, evolve_eps);
      }
      log.info("evolve: " + std::to_string(r.discretization.steps()) + " steps to T = " + io::format_double(evolve_T));
      for (const StepDiagnostic& s : r.diagnostics) {
        log.debug("step " + std::to_string(s.k) + " t=" + io::format_double(s.t) + " residual " +
                  io::format_double(s.residual_l1));
      }
      emit(out, evolve_out, io::evolution_to_json(r).dump(2) + "\n");
      if (!evolve_csv.empty()) io::write_text_file(evolve_csv, io::evolution_to_csv(r));
      return 0;
    }

    if (check->parsed()) {
      const auto& known = suites::names();
      if (std::find(known.begin(), known.end(), suite) == known.end()) {
        throw ParseError("unknown suite '" + suite + "'");
      }
      const suites::SuiteReport rep = suites::run_suite(suite, {seed, cases});
      out << rep.name << ": " << rep.summary << " -> " << (rep.ok() ? "PASS" : "FAIL") << '\n';
      for (const std::string& f : rep.failures) out << "  failure: " << f << '\n';
      return rep.ok() ? 0 : 1;
    }

    if (plot->parsed()) {
      const Json j = io::read_json_file(plot_in);
      std::ostringstream csv;
      if (j.contains("states") && j.contains("grid")) {
        csv << "t,node,value\n";
        const auto& grid = j["grid"];
        const auto& states = j["states"];
        if (!grid.is_array() || !states.is_array() || grid.size() != states.size()) {
          throw ParseError("evolution result has mismatched grid and states");
        }
        for (std::size_t k = 0; k < grid.size(); ++k) {
          for (const auto& [id, value] : states[k].items()) csv << number(grid[k]) << ',' << id << ',' << number(value) << '\n';
        }
      } else if (j.contains("u") && j["u"].is_object()) {
        csv << "node,value\n";
        for (const auto& [id, value] : j["u"].items()) csv << id << ',' << number(value) << '\n';
      } else {
        throw ParseError("input is neither a resolve nor an evolve result");
      }
      emit(out, plot_out, csv.str());
      return 0;
    }
  } catch (const Error& e) {
    report_error(err, e.code(), e.what(), e.context());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what(), "");
    return 2;
  }
  return 2;
}

}  // namespace gpme::cli
