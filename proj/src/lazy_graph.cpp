#include "gpme/lazy_graph.hpp"

#include <algorithm>
#include <queue>
#include <unordered_set>

#include "gpme/error.hpp"
#include "gpme/summation.hpp"

namespace gpme {

namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();
// Upper bound on neighbours inspected while looking for one forward neighbour.
constexpr std::size_t kForwardScanCap = 1'000'000;
constexpr std::size_t kScanChunk = 64;

}  // namespace

Measure LazyGraph::measure() const {
  auto self = shared_from_this();
  return Measure([self](const std::string& x) { return self->mu(x); });
}

FiniteLazyGraph::FiniteLazyGraph(Graph graph, std::string root)
    : graph_(std::move(graph)), root_(std::move(root)), distance_(graph_.size(), kUnreached) {
  const NodeIndex r = graph_.index(root_);
  std::queue<NodeIndex> q;
  distance_[r] = 0;
  q.push(r);
  while (!q.empty()) {
    const NodeIndex x = q.front();
    q.pop();
    for (const Adjacent& a : graph_.neighbors(x)) {
      if (distance_[a.node] == kUnreached) {
        distance_[a.node] = distance_[x] + 1;
        q.push(a.node);
      }
    }
  }
}

std::vector<Neighbor> FiniteLazyGraph::neighbors(const std::string& x, std::size_t offset,
                                                 std::size_t limit) const {
  const auto nb = graph_.neighbors(graph_.index(x));
  std::vector<Neighbor> out;
  for (std::size_t k = offset; k < nb.size() && out.size() < limit; ++k) {
    out.push_back({graph_.id(nb[k].node), nb[k].weight});
  }
  return out;
}

double FiniteLazyGraph::weight(const std::string& x, const std::string& y) const {
  return graph_.weight(graph_.index(x), graph_.index(y));
}

double FiniteLazyGraph::weight_sum(const std::string& x) const {
  CompensatedSum acc;
  for (const Adjacent& a : graph_.neighbors(graph_.index(x))) acc += a.weight;
  return acc.value();
}

std::optional<std::size_t> FiniteLazyGraph::distance_to_root(const std::string& x) const {
  const std::size_t d = distance_[graph_.index(x)];
  if (d == kUnreached) return std::nullopt;
  return d;
}

std::optional<double> FiniteLazyGraph::uniform_mu_lower_bound() const {
  if (graph_.size() == 0) return std::nullopt;
  double lo = graph_.mu(0);
  for (NodeIndex i = 1; i < graph_.size(); ++i) lo = std::min(lo, graph_.mu(i));
  return lo;
}

std::optional<double> FiniteLazyGraph::uniform_deg_bound() const {
  double hi = 0.0;
  for (NodeIndex i = 0; i < graph_.size(); ++i) hi = std::max(hi, degree(graph_, i).Deg);
  return hi;
}

Exhauster::Exhauster(const LazyGraph& graph)
    : Exhauster(graph, graph.locally_finite() ? ExhaustionScheme::balls : ExhaustionScheme::forward_neighbors) {}

Exhauster::Exhauster(const LazyGraph& graph, ExhaustionScheme scheme) : graph_(graph), scheme_(scheme) {
  const std::string root = graph_.root();
  if (scheme_ == ExhaustionScheme::balls && !graph_.locally_finite()) {
    throw InvalidArgument("ball exhaustion needs a locally finite graph (H1)");
  }
  std::size_t root_depth = 0;
  if (scheme_ == ExhaustionScheme::forward_neighbors) {
    const auto d = graph_.distance_to_root(root);
    if (!d) throw InvalidArgument("forward-neighbour exhaustion needs distance_to_root on '" + graph_.name() + "'");
    root_depth = *d;
  }
  nodes_.push_back(root);
  frontier_.push_back(root);
  cursor_.push_back(0);
  depth_.push_back(root_depth);
  position_.emplace(root, 0);
}

bool Exhauster::advance() {
  const bool grew = scheme_ == ExhaustionScheme::balls ? advance_balls() : advance_forward();
  ++level_;
  return grew;
}

bool Exhauster::advance_balls() {
  std::vector<std::string> next;
  for (const std::string& x : frontier_) {
    for (const Neighbor& y : graph_.neighbors(x)) {
      if (y.weight > 0.0 && !position_.count(y.id)) {
        position_.emplace(y.id, nodes_.size());
        nodes_.push_back(y.id);
        next.push_back(y.id);
      }
    }
  }
  frontier_ = std::move(next);
  return !frontier_.empty();
}

bool Exhauster::advance_forward() {
  const std::size_t existing = nodes_.size();
  std::vector<std::string> added;
  std::vector<std::size_t> added_depth;
  std::unordered_set<std::string> added_set;
  for (std::size_t i = 0; i < existing; ++i) {
    const std::string x = nodes_[i];
    const std::size_t want = depth_[i] + 1;
    std::size_t scanned = 0;
    bool done = false;
    while (!done) {
      const auto chunk = graph_.neighbors(x, cursor_[i], kScanChunk);
      if (chunk.empty()) break;
      for (const Neighbor& y : chunk) {
        if (y.weight > 0.0 && !position_.count(y.id)) {
          const auto d = graph_.distance_to_root(y.id);
          if (!d) throw InvalidArgument("distance_to_root unavailable for node '" + y.id + "'");
          if (*d == want) {
            if (added_set.insert(y.id).second) {
              added.push_back(y.id);
              added_depth.push_back(*d);
            }
            done = true;
            break;
          }
        }
        ++cursor_[i];
      }
      scanned += chunk.size();
      if (!done && scanned >= kForwardScanCap) {
        throw TruncationError("no forward neighbour of '" + x + "' among the first " +
                              std::to_string(kForwardScanCap) + " neighbours");
      }
    }
  }
  for (std::size_t k = 0; k < added.size(); ++k) {
    position_.emplace(added[k], nodes_.size());
    nodes_.push_back(added[k]);
    cursor_.push_back(0);
    depth_.push_back(added_depth[k]);
  }
  return !added.empty();
}

std::vector<std::vector<std::string>> exhaustion(const LazyGraph& graph, std::size_t n) {
  std::vector<std::vector<std::string>> levels;
  if (n == 0) return levels;
  Exhauster ex(graph);
  levels.push_back(ex.nodes());
  while (levels.size() < n) {
    ex.advance();
    levels.push_back(ex.nodes());
  }
  return levels;
}

DirichletSubgraph dirichlet_restrict(const LazyGraph& graph, std::span<const std::string> subset) {
  if (subset.empty()) throw InvalidArgument("Dirichlet restriction needs a nonempty node subset");
  std::unordered_map<std::string, std::size_t> in_a;
  for (const std::string& id : subset) {
    if (!graph.contains(id)) throw UnknownNode(id);
    if (!in_a.emplace(id, in_a.size()).second) throw InvalidArgument("node '" + id + "' listed twice in subset");
  }

  DirichletSubgraph out;
  GraphBuilder b;
  std::vector<std::tuple<std::string, std::string, double>> inner;
  for (const std::string& x : subset) {
    double b_dir = 0.0;
    bool interior = true;
    if (graph.locally_finite()) {
      CompensatedSum boundary;
      for (const Neighbor& y : graph.neighbors(x)) {
        if (y.weight <= 0.0) continue;
        if (!in_a.count(y.id)) {
          boundary += y.weight;
          interior = false;
        } else if (x < y.id) {
          inner.emplace_back(x, y.id, y.weight);
        }
      }
      b_dir = boundary.value();
    } else {
      CompensatedSum inside;
      for (const std::string& y : subset) {
        if (y == x) continue;
        const double w = graph.weight(x, y);
        if (w > 0.0) {
          inside += w;
          if (x < y) inner.emplace_back(x, y, w);
        }
      }
      b_dir = std::max(0.0, graph.weight_sum(x) - inside.value());
      interior = b_dir == 0.0;
    }
    out.b_dir.push_back(b_dir);
    out.kappa.push_back(graph.kappa(x));
    out.interior.push_back(interior);
    b.add_node(x, graph.mu(x), graph.kappa(x) + b_dir);
  }
  for (const auto& [x, y, w] : inner) b.add_edge(x, y, w);
  out.graph = b.build();
  return out;
}

std::optional<std::pair<std::string, std::string>> find_asymmetry(const LazyGraph& graph,
                                                                  std::span<const std::string> nodes) {
  for (const std::string& x : nodes) {
    const auto nb = graph.locally_finite() ? graph.neighbors(x) : graph.neighbors(x, 0, kScanChunk);
    for (const Neighbor& y : nb) {
      if (graph.weight(y.id, x) != y.weight) return std::make_pair(x, y.id);
    }
  }
  return std::nullopt;
}

}  // namespace gpme
