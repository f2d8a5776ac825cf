#include "gpme/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "gpme/error.hpp"
#include "gpme/expression.hpp"
#include "gpme/families.hpp"

namespace gpme::io {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

double number(const Json& j, const std::string& what) {
  if (!j.is_number()) throw ParseError(what + " must be a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw ParseError(what + " must be finite");
  return x;
}

double number_or(const Json& obj, const char* key, double fallback, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  return number(*it, where + "." + key);
}

std::string string_field(const Json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) throw ParseError(where + " needs a string field '" + key + "'");
  return it->get<std::string>();
}

void require_object(const Json& j, const std::string& what) {
  if (!j.is_object()) throw ParseError(what + " must be a JSON object");
}

// Builder and lookup failures inside a document are input errors.
template <class F>
auto as_parse_error(const std::string& what, F&& fn) {
  try {
    return fn();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(what + ": " + e.what());
  } catch (const Json::exception& e) {
    throw ParseError(what + ": " + e.what());
  }
}

}  // namespace

Graph graph_from_json(const Json& j) {
  return as_parse_error("graph", [&] {
    require_object(j, "graph");
    const auto nodes = j.find("nodes");
    if (nodes == j.end() || !nodes->is_array()) throw ParseError("graph needs a 'nodes' array");
    GraphBuilder b;
    for (const Json& n : *nodes) {
      require_object(n, "graph node");
      const std::string id = string_field(n, "id", "graph node");
      b.add_node(id, number_or(n, "mu", 1.0, "node " + id), number_or(n, "kappa", 0.0, "node " + id));
    }
    const auto edges = j.find("edges");
    if (edges != j.end()) {
      if (!edges->is_array()) throw ParseError("graph 'edges' must be an array");
      for (const Json& e : *edges) {
        require_object(e, "graph edge");
        const std::string u = string_field(e, "u", "graph edge");
        const std::string v = string_field(e, "v", "graph edge");
        const auto w = e.find("w");
        if (w == e.end()) throw ParseError("edge " + u + "-" + v + " needs a weight 'w'");
        b.add_edge(u, v, number(*w, "edge weight"));
      }
    }
    return b.build();
  });
}

Json graph_to_json(const Graph& g) {
  Json nodes = Json::array();
  for (NodeIndex i = 0; i < g.size(); ++i) {
    nodes.push_back({{"id", g.id(i)}, {"mu", g.mu(i)}, {"kappa", g.kappa(i)}});
  }
  Json edges = Json::array();
  for (const Edge& e : g.edges()) edges.push_back({{"u", g.id(e.u)}, {"v", g.id(e.v)}, {"w", e.w}});
  return {{"nodes", nodes}, {"edges", edges}};
}

Graph load_graph(const std::filesystem::path& path) { return graph_from_json(read_json_file(path)); }

NodeFunction function_from_json(const Json& j, Measure mu) {
  return as_parse_error("node function", [&] {
    require_object(j, "node function");
    NodeFunction::Map values;
    for (const auto& [id, value] : j.items()) values.emplace(id, number(value, "value at '" + id + "'"));
    return NodeFunction(std::move(mu), std::move(values));
  });
}

Json function_to_json(const NodeFunction& f) {
  Json out = Json::object();
  for (const auto& [id, value] : f.values()) out[id] = value;
  return out;
}

NodeFunction function_from_csv(const std::string& text, Measure mu) {
  NodeFunction::Map values;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("csv line " + std::to_string(line_no) + ": expected node,value");
    const std::string id = line.substr(0, comma);
    const std::string field = line.substr(comma + 1);
    double value = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
      if (line_no == 1 && id == "node") continue;  // header
      throw ParseError("csv line " + std::to_string(line_no) + ": bad value '" + field + "'");
    }
    if (!values.emplace(id, value).second) throw ParseError("csv: duplicate node '" + id + "'");
  }
  return as_parse_error("node function", [&] { return NodeFunction(std::move(mu), std::move(values)); });
}

std::string function_to_csv(const NodeFunction& f) {
  std::string out = "node,value\n";
  for (const auto& [id, value] : f.values()) out += id + "," + format_double(value) + "\n";
  return out;
}

NodeFunction load_function(const std::filesystem::path& path, Measure mu) {
  if (path.extension() == ".csv") return function_from_csv(read_text_file(path), std::move(mu));
  return function_from_json(read_json_file(path), std::move(mu));
}

Nonlinearity phi_from_json(const Json& j) {
  require_object(j, "phi spec");
  const std::string family = string_field(j, "family", "phi spec");
  if (family == "power_law") {
    const auto m = j.find("m");
    if (m == j.end()) throw ParseError("power_law phi needs 'm'");
    return as_parse_error("power_law phi", [&] { return Nonlinearity::power_law(number(*m, "m")); });
  }
  if (family == "custom") {
    const Expression phi = Expression::parse(string_field(j, "phi", "custom phi"));
    const Expression psi = Expression::parse(string_field(j, "psi", "custom phi"));
    std::optional<Nonlinearity::Scalar> phi_prime;
    if (j.contains("phi_prime")) {
      const Expression d = Expression::parse(string_field(j, "phi_prime", "custom phi"));
      phi_prime = [d](double s) { return d(s); };
    }
    std::optional<double> lipschitz;
    if (j.contains("lipschitz") && !j["lipschitz"].is_null()) lipschitz = number(j["lipschitz"], "lipschitz");
    return as_parse_error("custom phi", [&] {
      return Nonlinearity::custom([phi](double s) { return phi(s); }, [psi](double s) { return psi(s); }, phi_prime,
                                  lipschitz, "custom(phi=" + phi.text() + ")");
    });
  }
  throw ParseError("unknown phi family '" + family + "'");
}

Nonlinearity parse_phi(const std::string& spec) {
  const auto first = spec.find_first_not_of(" \t\n");
  if (first != std::string::npos && spec[first] == '{') {
    Json j;
    try {
      j = Json::parse(spec);
    } catch (const Json::exception& e) {
      throw ParseError(std::string("phi spec: ") + e.what());
    }
    return phi_from_json(j);
  }
  return phi_from_json(read_json_file(spec));
}

std::shared_ptr<const LazyGraph> family_from_json(const std::string& name, const Json& params) {
  const Json p = params.is_null() ? Json::object() : params;
  require_object(p, "family parameters");
  if (name == "star_infinite") {
    for (const auto& [key, value] : p.items()) {
      static const std::set<std::string> known{"w", "ratio", "mu_center", "mu_leaf", "mu_ratio", "kappa"};
      if (!known.count(key)) throw ParseError("unknown star_infinite parameter '" + key + "'");
    }
    StarProfile s;
    s.w = number_or(p, "w", s.w, "star_infinite");
    s.ratio = number_or(p, "ratio", s.ratio, "star_infinite");
    s.mu_center = number_or(p, "mu_center", s.mu_center, "star_infinite");
    s.mu_leaf = number_or(p, "mu_leaf", s.mu_leaf, "star_infinite");
    s.mu_ratio = number_or(p, "mu_ratio", s.mu_ratio, "star_infinite");
    s.kappa = number_or(p, "kappa", s.kappa, "star_infinite");
    return as_parse_error("star_infinite", [&] { return star_infinite(s); });
  }
  ChainProfile c;
  for (const auto& [key, value] : p.items()) {
    if (key == "mu" || key == "kappa" || key == "w") {
      const std::string text = value.is_string() ? value.get<std::string>() : format_double(number(value, key));
      const Expression e = Expression::parse(text, "n");
      (key == "mu" ? c.mu : key == "kappa" ? c.kappa : c.w) = e;
    } else if (key == "mu_lower_bound") {
      c.mu_lower_bound = number(value, key);
    } else if (key == "deg_bound") {
      c.deg_bound = number(value, key);
    } else {
      throw ParseError("unknown " + name + " parameter '" + key + "'");
    }
  }
  if (name == "half_line") return as_parse_error(name, [&] { return half_line(c); });
  if (name == "integer_lattice_1d") return as_parse_error(name, [&] { return integer_lattice_1d(c); });
  if (name == "binary_tree") return as_parse_error(name, [&] { return binary_tree(c); });
  throw ParseError("unknown graph family '" + name + "'");
}

Forcing forcing_from_json(const Json& j, Measure mu) {
  require_object(j, "forcing");
  const std::string kind = string_field(j, "kind", "forcing");
  if (kind == "zero") return Forcing::zero();
  if (kind == "constant") {
    if (!j.contains("f")) throw ParseError("constant forcing needs 'f'");
    return Forcing::constant(function_from_json(j["f"], mu));
  }
  if (kind == "piecewise") {
    const auto pieces = j.find("pieces");
    if (pieces == j.end() || !pieces->is_array()) throw ParseError("piecewise forcing needs a 'pieces' array");
    std::vector<Forcing::Piece> out;
    for (const Json& p : *pieces) {
      require_object(p, "forcing piece");
      if (!p.contains("t_start") || !p.contains("t_end") || !p.contains("f")) {
        throw ParseError("forcing piece needs t_start, t_end and f");
      }
      out.push_back({number(p["t_start"], "t_start"), number(p["t_end"], "t_end"), function_from_json(p["f"], mu)});
    }
    return as_parse_error("forcing", [&] { return Forcing::piecewise(std::move(out)); });
  }
  throw ParseError("unknown forcing kind '" + kind + "'");
}

Json solution_to_json(const ResolventSolution& s) {
  Json out;
  out["u"] = function_to_json(s.u);
  out["v"] = function_to_json(s.v);
  out["residual_l1"] = s.residual_l1;
  out["iterations"] = s.iterations;
  out["method"] = to_string(s.method);
  if (s.truncation_level) out["truncation_level"] = *s.truncation_level;
  if (s.monotone_certificate) out["monotone_certificate"] = *s.monotone_certificate;
  if (!s.levels.empty()) {
    Json levels = Json::array();
    for (const LevelRecord& l : s.levels) {
      Json rec{{"level", l.level}, {"nodes", l.nodes}, {"residual_l1", l.residual_l1}, {"iterations", l.iterations}};
      rec["difference_l1"] = l.difference_l1 ? Json(*l.difference_l1) : Json(nullptr);
      levels.push_back(rec);
    }
    out["levels"] = levels;
  }
  out["notes"] = s.notes;
  return out;
}

Json evolution_to_json(const EvolutionResult& r) {
  Json out;
  const auto& d = r.discretization;
  out["epsilon"] = d.epsilon;
  out["T"] = d.T;
  out["grid"] = d.grid;
  out["integral_error"] = d.integral_error;
  out["integral_exact"] = d.integral_exact;
  Json states = Json::array();
  for (const NodeFunction& u : r.states) states.push_back(function_to_json(u));
  out["states"] = states;
  Json diags = Json::array();
  for (const StepDiagnostic& s : r.diagnostics) {
    Json rec{{"k", s.k},
             {"t", s.t},
             {"lambda", s.lambda},
             {"residual_l1", s.residual_l1},
             {"iterations", s.iterations},
             {"method", to_string(s.method)}};
    if (s.truncation_level) rec["truncation_level"] = *s.truncation_level;
    diags.push_back(rec);
  }
  out["diagnostics"] = diags;
  out["delta_estimate"] = r.delta_estimate ? Json(*r.delta_estimate) : Json(nullptr);
  out["delta_history"] = r.delta_history;
  out["notes"] = r.notes;
  return out;
}

std::string evolution_to_csv(const EvolutionResult& r) {
  std::string out = "t,node,value\n";
  for (std::size_t k = 0; k < r.states.size(); ++k) {
    const std::string t = format_double(r.discretization.grid[k]);
    for (const auto& [id, value] : r.states[k].values()) out += t + "," + id + "," + format_double(value) + "\n";
  }
  return out;
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ParseError("write to '" + path.string() + "' failed");
}

}  // namespace gpme::io
