#include "gpme/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "gpme/error.hpp"
#include "gpme/summation.hpp"

namespace gpme {

struct Graph::Data {
  std::vector<std::string> ids;
  std::unordered_map<std::string, NodeIndex> index;
  std::vector<double> mu;
  std::vector<double> kappa;
  std::vector<Edge> edges;
  // CSR adjacency derived from edges.
  std::vector<std::size_t> offsets{0};
  std::vector<Adjacent> adjacency;
};

Graph::Graph() : d_(std::make_shared<const Data>()) {}

Graph::Graph(std::shared_ptr<const Data> data) : d_(std::move(data)) {}

std::size_t Graph::size() const noexcept { return d_->ids.size(); }

const std::vector<std::string>& Graph::ids() const noexcept { return d_->ids; }

const std::string& Graph::id(NodeIndex i) const { return d_->ids.at(i); }

NodeIndex Graph::index(const std::string& id) const {
  const auto it = d_->index.find(id);
  if (it == d_->index.end()) throw UnknownNode(id);
  return it->second;
}

std::optional<NodeIndex> Graph::find(const std::string& id) const {
  const auto it = d_->index.find(id);
  if (it == d_->index.end()) return std::nullopt;
  return it->second;
}

double Graph::mu(NodeIndex i) const { return d_->mu.at(i); }

double Graph::kappa(NodeIndex i) const { return d_->kappa.at(i); }

std::span<const Adjacent> Graph::neighbors(NodeIndex i) const {
  const auto begin = d_->offsets.at(i);
  const auto end = d_->offsets.at(i + 1);
  return {d_->adjacency.data() + begin, end - begin};
}

std::span<const Edge> Graph::edges() const noexcept { return d_->edges; }

double Graph::weight(NodeIndex i, NodeIndex j) const {
  const auto nb = neighbors(i);
  const auto it = std::lower_bound(nb.begin(), nb.end(), j,
                                   [](const Adjacent& a, NodeIndex n) { return a.node < n; });
  return (it != nb.end() && it->node == j) ? it->weight : 0.0;
}

Measure Graph::measure() const {
  return Measure([d = d_](const std::string& x) {
    const auto it = d->index.find(x);
    if (it == d->index.end()) throw UnknownNode(x);
    return d->mu[it->second];
  });
}

std::vector<double> Graph::to_dense(const NodeFunction& f) const {
  std::vector<double> out(size(), 0.0);
  for (const auto& [id, value] : f.values()) {
    const auto i = find(id);
    if (!i) {
      if (value == 0.0) continue;
      throw UnknownNode(id);
    }
    out[*i] = value;
  }
  return out;
}

NodeFunction Graph::from_dense(std::span<const double> values) const {
  if (values.size() != size()) throw InvalidArgument("dense vector size does not match graph");
  NodeFunction::Map m;
  for (NodeIndex i = 0; i < size(); ++i) {
    if (values[i] != 0.0) m.emplace(d_->ids[i], values[i]);
  }
  return NodeFunction(measure(), std::move(m));
}

GraphBuilder& GraphBuilder::add_node(const std::string& id, double mu, double kappa) {
  if (index_.count(id)) throw InvalidArgument("duplicate node id '" + id + "'");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgument("mu must be positive at node '" + id + "'");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw InvalidArgument("kappa must be nonnegative at node '" + id + "'");
  }
  index_.emplace(id, ids_.size());
  ids_.push_back(id);
  mu_.push_back(mu);
  kappa_.push_back(kappa);
  return *this;
}

GraphBuilder& GraphBuilder::add_edge(const std::string& u, const std::string& v, double w) {
  const auto iu = index_.find(u);
  const auto iv = index_.find(v);
  if (iu == index_.end()) throw UnknownNode(u);
  if (iv == index_.end()) throw UnknownNode(v);
  if (iu->second == iv->second) throw InvalidArgument("self-loop at node '" + u + "'");
  if (!(w >= 0.0) || !std::isfinite(w)) {
    throw InvalidArgument("edge weight must be nonnegative on {" + u + "," + v + "}");
  }
  const NodeIndex a = std::min(iu->second, iv->second);
  const NodeIndex b = std::max(iu->second, iv->second);
  if (!pairs_.emplace(a, b).second) throw InvalidArgument("duplicate edge {" + u + "," + v + "}");
  edges_.push_back({a, b, w});
  return *this;
}

Graph GraphBuilder::build() const {
  auto d = std::make_shared<Graph::Data>();
  d->ids = ids_;
  d->index = index_;
  d->mu = mu_;
  d->kappa = kappa_;
  // Zero weights mean "not adjacent".
  for (const Edge& e : edges_) {
    if (e.w > 0.0) d->edges.push_back(e);
  }
  std::sort(d->edges.begin(), d->edges.end(),
            [](const Edge& x, const Edge& y) { return std::tie(x.u, x.v) < std::tie(y.u, y.v); });

  const std::size_t n = ids_.size();
  std::vector<std::vector<Adjacent>> adj(n);
  for (const Edge& e : d->edges) {
    adj[e.u].push_back({e.v, e.w});
    adj[e.v].push_back({e.u, e.w});
  }
  d->offsets.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(adj[i].begin(), adj[i].end(), [](const Adjacent& x, const Adjacent& y) { return x.node < y.node; });
    d->offsets[i + 1] = d->offsets[i] + adj[i].size();
    d->adjacency.insert(d->adjacency.end(), adj[i].begin(), adj[i].end());
  }
  return Graph(std::move(d));
}

Degree degree(const Graph& g, NodeIndex x) {
  CompensatedSum acc;
  for (const Adjacent& a : g.neighbors(x)) acc += a.weight;
  acc += g.kappa(x);
  const double deg = acc.value();
  return {deg, deg / g.mu(x)};
}

Degree degree(const Graph& g, const std::string& x) { return degree(g, g.index(x)); }

std::vector<std::vector<NodeIndex>> connected_components(const Graph& g) {
  const std::size_t n = g.size();
  std::vector<bool> seen(n, false);
  std::vector<std::vector<NodeIndex>> blocks;
  for (NodeIndex start = 0; start < n; ++start) {
    if (seen[start]) continue;
    std::vector<NodeIndex> block;
    std::queue<NodeIndex> frontier;
    frontier.push(start);
    seen[start] = true;
    while (!frontier.empty()) {
      const NodeIndex x = frontier.front();
      frontier.pop();
      block.push_back(x);
      for (const Adjacent& a : g.neighbors(x)) {
        if (!seen[a.node]) {
          seen[a.node] = true;
          frontier.push(a.node);
        }
      }
    }
    std::sort(block.begin(), block.end());
    blocks.push_back(std::move(block));
  }
  return blocks;
}

Graph induced_subgraph(const Graph& g, std::span<const NodeIndex> nodes) {
  GraphBuilder b;
  std::vector<long> local(g.size(), -1);
  for (NodeIndex i : nodes) {
    b.add_node(g.id(i), g.mu(i), g.kappa(i));
    local[i] = 1;
  }
  for (const Edge& e : g.edges()) {
    if (local[e.u] > 0 && local[e.v] > 0) b.add_edge(g.id(e.u), g.id(e.v), e.w);
  }
  return b.build();
}

DirichletSubgraph dirichlet_restrict(const Graph& g, std::span<const std::string> subset) {
  if (subset.empty()) throw InvalidArgument("Dirichlet restriction needs a nonempty node subset");
  std::vector<bool> in_a(g.size(), false);
  std::vector<NodeIndex> nodes;
  nodes.reserve(subset.size());
  for (const std::string& id : subset) {
    const NodeIndex i = g.index(id);
    if (in_a[i]) throw InvalidArgument("node '" + id + "' listed twice in subset");
    in_a[i] = true;
    nodes.push_back(i);
  }

  DirichletSubgraph out;
  GraphBuilder b;
  for (NodeIndex i : nodes) {
    CompensatedSum boundary;
    bool interior = true;
    for (const Adjacent& a : g.neighbors(i)) {
      if (!in_a[a.node]) {
        boundary += a.weight;
        interior = false;
      }
    }
    const double b_dir = boundary.value();
    out.b_dir.push_back(b_dir);
    out.kappa.push_back(g.kappa(i));
    out.interior.push_back(interior);
    b.add_node(g.id(i), g.mu(i), g.kappa(i) + b_dir);
  }
  for (const Edge& e : g.edges()) {
    if (in_a[e.u] && in_a[e.v]) b.add_edge(g.id(e.u), g.id(e.v), e.w);
  }
  out.graph = b.build();
  return out;
}

}  // namespace gpme
