#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gpme/graph.hpp"
#include "gpme/node_function.hpp"

// Seeded property suites over random finite graphs. Every suite is a pure function of
// its seed and case count.
namespace gpme::suites {

struct RandomGraphOptions {
  std::size_t min_nodes = 1;
  std::size_t max_nodes = 30;
  double edge_probability = 0.3;
  bool connected = false;
  /// Probability that a node gets kappa > 0; 0 gives kappa = 0 everywhere.
  double kappa_probability = 0.3;
  double w_min = 0.1;
  double w_max = 10.0;
  double mu_min = 0.5;
  double mu_max = 2.0;
};

/// Nodes "x0", "x1", ...; weights, mu and kappa log-uniform in their ranges.
Graph random_graph(std::mt19937_64& rng, const RandomGraphOptions& opts = {});

/// Values in [-scale, scale] (or [0, scale] / [-scale, 0] when sign is +1 / -1), each node
/// left at zero with probability zero_probability.
NodeFunction random_function(std::mt19937_64& rng, const Graph& graph, int sign = 0, double scale = 1.0,
                             double zero_probability = 0.2);

struct SuiteOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> cases;  // suite default when absent
};

struct SuiteReport {
  std::string name;
  std::size_t cases = 0;
  std::size_t passed = 0;
  /// Largest observed value of the checked quantity, normalised so that <= 0 passes
  /// (suites with a two-sided or ratio criterion document their own meaning).
  double worst = 0.0;
  std::vector<std::string> failures;  // first few, for diagnostics
  std::string summary;

  bool ok() const noexcept { return passed == cases; }
};

/// Names accepted by run_suite: the randomized suites accretivity, contractivity,
/// comparison, mass, positivity, contraction, commutation, bracket-limit, and the
/// deterministic ones exhaustion, heat-order, example.
const std::vector<std::string>& names();
bool needs_seed(const std::string& name);
std::size_t default_cases(const std::string& name);

/// Throws InvalidArgument for an unknown suite or a missing seed.
SuiteReport run_suite(const std::string& name, const SuiteOptions& opts);

SuiteReport example(std::size_t cases = 1);
SuiteReport accretivity(std::uint64_t seed, std::size_t cases);
SuiteReport contractivity(std::uint64_t seed, std::size_t cases);
SuiteReport positivity(std::uint64_t seed, std::size_t cases);
SuiteReport comparison(std::uint64_t seed, std::size_t cases);
SuiteReport exhaustion(std::size_t cases = 1);
/// Heat-equation order against the dense exponential on `cases` random graphs (at most
/// 50 nodes); worst is the error ratio E(eps)/E(eps/2) farthest from 2.
SuiteReport heat_order(std::uint64_t seed, std::size_t cases);
SuiteReport mass(std::uint64_t seed, std::size_t cases);
SuiteReport contraction(std::uint64_t seed, std::size_t cases);
SuiteReport commutation(std::uint64_t seed, std::size_t cases);
SuiteReport bracket_limit(std::uint64_t seed, std::size_t cases);

}  // namespace gpme::suites
