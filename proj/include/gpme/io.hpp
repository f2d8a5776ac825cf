#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "json.hpp"

#include "gpme/evolution.hpp"
#include "gpme/graph.hpp"
#include "gpme/lazy_graph.hpp"
#include "gpme/node_function.hpp"
#include "gpme/nonlinearity.hpp"
#include "gpme/resolvent.hpp"

// JSON / CSV formats. Malformed input of any kind raises ParseError.
namespace gpme::io {

using Json = nlohmann::json;

/// {"nodes":[{"id","mu","kappa"}], "edges":[{"u","v","w"}]}; mu defaults to 1, kappa to 0.
Graph graph_from_json(const Json& j);
Json graph_to_json(const Graph& g);
Graph load_graph(const std::filesystem::path& path);

/// {"id": value, ...}
NodeFunction function_from_json(const Json& j, Measure mu = {});
Json function_to_json(const NodeFunction& f);
/// "node,value" lines, optional header.
NodeFunction function_from_csv(const std::string& text, Measure mu = {});
std::string function_to_csv(const NodeFunction& f);
/// Chooses CSV for a .csv extension, JSON otherwise.
NodeFunction load_function(const std::filesystem::path& path, Measure mu = {});

/// {"family":"power_law","m":2} or {"family":"custom","phi":"...","psi":"...",
/// "phi_prime":"...", "lipschitz": L}; expressions in the variable s.
Nonlinearity phi_from_json(const Json& j);
/// Inline JSON text when it starts with '{', otherwise a file path.
Nonlinearity parse_phi(const std::string& spec);

/// Named lazy family with a parameter object (possibly empty).
/// half_line / integer_lattice_1d / binary_tree: {"mu","kappa","w"} expressions in n,
/// optional "mu_lower_bound", "deg_bound".
/// star_infinite: {"w","ratio","mu_center","mu_leaf","mu_ratio","kappa"} numbers.
std::shared_ptr<const LazyGraph> family_from_json(const std::string& name, const Json& params);

/// {"kind":"zero"} | {"kind":"constant","f":{...}} |
/// {"kind":"piecewise","pieces":[{"t_start","t_end","f":{...}}]}
Forcing forcing_from_json(const Json& j, Measure mu = {});

Json solution_to_json(const ResolventSolution& s);
Json evolution_to_json(const EvolutionResult& r);
/// "t,node,value" rows for every state.
std::string evolution_to_csv(const EvolutionResult& r);

/// Shortest round-trip decimal form.
std::string format_double(double x);

Json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace gpme::io
