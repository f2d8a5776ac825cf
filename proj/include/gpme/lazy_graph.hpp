#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gpme/graph.hpp"
#include "gpme/node_function.hpp"

namespace gpme {

struct Neighbor {
  std::string id;
  double weight;
};

/// A countable graph generated on demand. Implementations must be pure: repeated
/// queries return identical answers, and neighbour lists are symmetric.
///
/// Instances are expected to live in a std::shared_ptr (measure() relies on it).
class LazyGraph : public std::enable_shared_from_this<LazyGraph> {
 public:
  static constexpr std::size_t all = std::numeric_limits<std::size_t>::max();

  virtual ~LazyGraph() = default;

  virtual std::string name() const = 0;
  virtual std::string root() const = 0;
  virtual bool contains(const std::string& x) const = 0;

  /// Neighbours of x in a fixed order, skipping the first `offset`, at most `limit`.
  virtual std::vector<Neighbor> neighbors(const std::string& x, std::size_t offset = 0,
                                          std::size_t limit = all) const = 0;
  virtual double weight(const std::string& x, const std::string& y) const = 0;
  /// sum_y w(x, y), finite for every node.
  virtual double weight_sum(const std::string& x) const = 0;
  virtual double kappa(const std::string& x) const = 0;
  virtual double mu(const std::string& x) const = 0;

  /// Combinatorial distance to root(); needed by the forward-neighbour exhaustion.
  virtual std::optional<std::size_t> distance_to_root(const std::string&) const { return std::nullopt; }

  /// H1: every node has finitely many neighbours.
  virtual bool locally_finite() const = 0;
  /// Whether x itself has finitely many neighbours.
  virtual bool finite_neighborhood(const std::string&) const { return locally_finite(); }
  /// H2 when present and positive: inf mu.
  virtual std::optional<double> uniform_mu_lower_bound() const { return std::nullopt; }
  /// sup_x Deg(x); also bounds sup_x sum_y w(x,y)/mu(x) as in H3.
  virtual std::optional<double> uniform_deg_bound() const { return std::nullopt; }

  Measure measure() const;
};

/// A finite Graph seen through the lazy interface.
class FiniteLazyGraph final : public LazyGraph {
 public:
  FiniteLazyGraph(Graph graph, std::string root);

  std::string name() const override { return "finite"; }
  std::string root() const override { return root_; }
  bool contains(const std::string& x) const override { return graph_.contains(x); }
  std::vector<Neighbor> neighbors(const std::string& x, std::size_t offset, std::size_t limit) const override;
  double weight(const std::string& x, const std::string& y) const override;
  double weight_sum(const std::string& x) const override;
  double kappa(const std::string& x) const override { return graph_.kappa(graph_.index(x)); }
  double mu(const std::string& x) const override { return graph_.mu(graph_.index(x)); }
  std::optional<std::size_t> distance_to_root(const std::string& x) const override;
  bool locally_finite() const override { return true; }
  std::optional<double> uniform_mu_lower_bound() const override;
  std::optional<double> uniform_deg_bound() const override;

  const Graph& graph() const { return graph_; }

 private:
  Graph graph_;
  std::string root_;
  std::vector<std::size_t> distance_;  // max() when unreachable
};

enum class ExhaustionScheme {
  balls,              // X_{k+1} = ball of radius k around the root (locally finite graphs)
  forward_neighbors,  // each node adds its first forward neighbour not yet present
};

/// Grows a nested chain of finite connected node sets X_1 = {root} c X_2 c ...
/// Balls are used for locally finite graphs, the forward-neighbour scheme otherwise.
class Exhauster {
 public:
  explicit Exhauster(const LazyGraph& graph);
  Exhauster(const LazyGraph& graph, ExhaustionScheme scheme);

  ExhaustionScheme scheme() const noexcept { return scheme_; }
  std::size_t level() const noexcept { return level_; }
  /// Current X_n in insertion order.
  const std::vector<std::string>& nodes() const noexcept { return nodes_; }
  /// Move to X_{n+1}. Returns false when no node was added (the reachable graph is exhausted).
  bool advance();

 private:
  bool advance_balls();
  bool advance_forward();

  const LazyGraph& graph_;
  ExhaustionScheme scheme_;
  std::size_t level_ = 1;
  std::vector<std::string> nodes_;
  std::vector<std::string> frontier_;
  std::vector<std::size_t> cursor_;  // per-node neighbour scan position (forward scheme)
  std::vector<std::size_t> depth_;
  std::unordered_map<std::string, std::size_t> position_;
};

/// The first n sets of the chain.
std::vector<std::vector<std::string>> exhaustion(const LazyGraph& graph, std::size_t n);

/// Dirichlet restriction of a lazy graph to a finite node subset.
DirichletSubgraph dirichlet_restrict(const LazyGraph& graph, std::span<const std::string> subset);

/// Checks neighbour symmetry on the given nodes; returns the first offending pair, if any.
std::optional<std::pair<std::string, std::string>> find_asymmetry(const LazyGraph& graph,
                                                                  std::span<const std::string> nodes);

}  // namespace gpme
