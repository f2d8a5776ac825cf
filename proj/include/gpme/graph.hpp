#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gpme/node_function.hpp"

namespace gpme {

using NodeIndex = std::size_t;

/// An undirected edge stored once, with u < v.
struct Edge {
  NodeIndex u;
  NodeIndex v;
  double w;
};

struct Adjacent {
  NodeIndex node;
  double weight;
};

/// Finite weighted graph G = (X, w, kappa, mu). Immutable and cheap to copy.
///
/// Node ids are opaque strings; their dense indices follow insertion order.
class Graph {
 public:
  Graph();

  std::size_t size() const noexcept;
  const std::vector<std::string>& ids() const noexcept;
  const std::string& id(NodeIndex i) const;
  NodeIndex index(const std::string& id) const;  // throws UnknownNode
  std::optional<NodeIndex> find(const std::string& id) const;
  bool contains(const std::string& id) const { return find(id).has_value(); }

  double mu(NodeIndex i) const;
  double kappa(NodeIndex i) const;
  /// Neighbours of i in ascending index order.
  std::span<const Adjacent> neighbors(NodeIndex i) const;
  std::span<const Edge> edges() const noexcept;
  /// w(i, j), 0 when the nodes are not adjacent.
  double weight(NodeIndex i, NodeIndex j) const;

  /// The node measure as a Measure (unknown ids are rejected).
  Measure measure() const;

  /// Dense value vector for a function supported on this graph.
  std::vector<double> to_dense(const NodeFunction& f) const;
  NodeFunction from_dense(std::span<const double> values) const;

 private:
  struct Data;
  friend class GraphBuilder;
  explicit Graph(std::shared_ptr<const Data> data);
  std::shared_ptr<const Data> d_;
};

/// Builds a Graph, rejecting self-loops, duplicate edges, negative weights,
/// negative kappa and non-positive mu.
class GraphBuilder {
 public:
  GraphBuilder& add_node(const std::string& id, double mu = 1.0, double kappa = 0.0);
  GraphBuilder& add_edge(const std::string& u, const std::string& v, double w);
  Graph build() const;

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, NodeIndex> index_;
  std::vector<double> mu_;
  std::vector<double> kappa_;
  std::vector<Edge> edges_;
  std::set<std::pair<NodeIndex, NodeIndex>> pairs_;
};

struct Degree {
  double deg;  // sum_y w(x,y) + kappa(x)
  double Deg;  // deg / mu(x)
};

Degree degree(const Graph& g, NodeIndex x);
Degree degree(const Graph& g, const std::string& x);

/// Connected components, each sorted ascending, ordered by their smallest node.
std::vector<std::vector<NodeIndex>> connected_components(const Graph& g);

/// Induced subgraph on the given nodes (kappa is copied, not augmented).
Graph induced_subgraph(const Graph& g, std::span<const NodeIndex> nodes);

/// Restriction to A with zero Dirichlet data outside A: the edges leaving A are
/// folded into the killing term, kappa_dir = kappa|A + b_dir.
struct DirichletSubgraph {
  Graph graph;                    // (A, w|AxA, kappa_dir, mu|A), nodes in the order of A
  std::vector<double> b_dir;      // sum of w(x,y) over y outside A
  std::vector<double> kappa;      // parent kappa restricted to A
  std::vector<bool> interior;     // x has no neighbour outside A

  const std::vector<std::string>& nodes() const { return graph.ids(); }
  double kappa_dir(NodeIndex i) const { return graph.kappa(i); }
};

DirichletSubgraph dirichlet_restrict(const Graph& g, std::span<const std::string> subset);

}  // namespace gpme
