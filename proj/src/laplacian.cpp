#include "gpme/laplacian.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "gpme/error.hpp"
#include "gpme/summation.hpp"

namespace gpme {

LaplacianContext::LaplacianContext(Graph graph) : graph_(std::move(graph)) {
  deg_.reserve(graph_.size());
  Deg_.reserve(graph_.size());
  for (NodeIndex x = 0; x < graph_.size(); ++x) {
    const Degree d = degree(graph_, x);
    deg_.push_back(d.deg);
    Deg_.push_back(d.Deg);
  }
}

double LaplacianContext::apply_at(std::span<const double> v, NodeIndex x) const {
  CompensatedSum acc;
  const double vx = v[x];
  for (const Adjacent& a : graph_.neighbors(x)) acc += a.weight * (vx - v[a.node]);
  acc += graph_.kappa(x) * vx;
  return acc.value() / graph_.mu(x);
}

std::vector<double> LaplacianContext::apply(std::span<const double> v) const {
  if (v.size() != graph_.size()) throw InvalidArgument("vector size does not match graph");
  std::vector<double> out(v.size());
  for (NodeIndex x = 0; x < v.size(); ++x) out[x] = apply_at(v, x);
  return out;
}

double apply(const LaplacianContext& ctx, const NodeFunction& v, const std::string& x) {
  const auto dense = ctx.graph().to_dense(v);
  return ctx.apply_at(dense, ctx.graph().index(x));
}

NodeFunction apply(const LaplacianContext& ctx, const NodeFunction& v) {
  const auto dense = ctx.graph().to_dense(v);
  return ctx.graph().from_dense(ctx.apply(dense));
}

NodeFunction apply_L(const LaplacianContext& ctx, const Nonlinearity& nl, const NodeFunction& u) {
  const Graph& g = ctx.graph();
  auto phi_u = g.to_dense(u);
  for (double& s : phi_u) s = nl.phi(s);

  std::set<NodeIndex> region;
  for (const auto& [id, value] : u.values()) {
    if (value == 0.0) continue;
    const NodeIndex x = g.index(id);
    region.insert(x);
    for (const Adjacent& a : g.neighbors(x)) region.insert(a.node);
  }
  NodeFunction::Map out;
  for (NodeIndex x : region) out.emplace(g.id(x), ctx.apply_at(phi_u, x));
  return NodeFunction(g.measure(), std::move(out));
}

double apply(const LazyGraph& graph, const NodeFunction& v, const std::string& x) {
  const double vx = v(x);
  CompensatedSum acc;
  if (graph.finite_neighborhood(x)) {
    for (const Neighbor& y : graph.neighbors(x)) acc += y.weight * (vx - v(y.id));
  } else {
    // Infinitely many neighbours: sum_y w(x,y)(v(x) - v(y)) = W(x) v(x) - sum_{y in supp v} w(x,y) v(y).
    acc += graph.weight_sum(x) * vx;
    for (const auto& [y, vy] : v.values()) {
      if (vy != 0.0 && y != x) acc += -graph.weight(x, y) * vy;
    }
  }
  acc += graph.kappa(x) * vx;
  return acc.value() / graph.mu(x);
}

NodeFunction apply_L(const LazyGraph& graph, const Nonlinearity& nl, const NodeFunction& u) {
  const NodeFunction phi_u = extend_phi(nl, u);
  std::set<std::string> region;
  for (const std::string& x : phi_u.support()) {
    if (!graph.finite_neighborhood(x)) {
      throw TruncationError("node '" + x + "' of supp u has infinitely many neighbours on '" + graph.name() +
                            "'; L u is not finitely supported");
    }
    region.insert(x);
    for (const Neighbor& y : graph.neighbors(x)) {
      if (y.weight > 0.0) region.insert(y.id);
    }
  }
  NodeFunction::Map out;
  for (const std::string& x : region) out.emplace(x, apply(graph, phi_u, x));
  return NodeFunction(graph.measure(), std::move(out));
}

double green_mass_rate(const LaplacianContext& ctx, const NodeFunction& v) {
  const Graph& g = ctx.graph();
  const auto dense = g.to_dense(v);
  CompensatedSum acc;
  for (NodeIndex x = 0; x < g.size(); ++x) acc += ctx.apply_at(dense, x) * g.mu(x);
  return acc.value();
}

double dirichlet_commutation_check(const Graph& g, std::span<const std::string> subset, const NodeFunction& v) {
  const DirichletSubgraph sub = dirichlet_restrict(g, subset);
  const std::unordered_set<std::string> in_a(subset.begin(), subset.end());
  for (const auto& [id, value] : v.values()) {
    if (value != 0.0 && !in_a.count(id)) {
      throw InvalidArgument("function is not supported in the subset (node '" + id + "')");
    }
  }
  const LaplacianContext parent(g);
  const LaplacianContext restricted(sub.graph);
  const auto v_parent = g.to_dense(v);
  const auto v_sub = sub.graph.to_dense(v);
  double worst = 0.0;
  for (NodeIndex i = 0; i < sub.graph.size(); ++i) {
    const double lhs = restricted.apply_at(v_sub, i);
    const double rhs = parent.apply_at(v_parent, g.index(sub.graph.id(i)));
    worst = std::max(worst, std::fabs(lhs - rhs));
  }
  return worst;
}

namespace {

// Dense L u - L v.
std::vector<double> l_difference(const LaplacianContext& ctx, const Nonlinearity& nl, std::span<const double> u,
                                 std::span<const double> v) {
  std::vector<double> pu(u.begin(), u.end());
  std::vector<double> pv(v.begin(), v.end());
  for (double& s : pu) s = nl.phi(s);
  for (double& s : pv) s = nl.phi(s);
  const auto lu = ctx.apply(pu);
  const auto lv = ctx.apply(pv);
  std::vector<double> out(lu.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = lu[i] - lv[i];
  return out;
}

double dense_norm(const Graph& g, std::span<const double> f, Lp p) {
  CompensatedSum acc;
  for (NodeIndex x = 0; x < f.size(); ++x) {
    acc += (p == Lp::one ? std::fabs(f[x]) : f[x] * f[x]) * g.mu(x);
  }
  return p == Lp::one ? acc.value() : std::sqrt(acc.value());
}

}  // namespace

double accretivity_residual(const LaplacianContext& ctx, const Nonlinearity& nl, const NodeFunction& u,
                            const NodeFunction& v, double lambda, Lp p) {
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
  if (p == Lp::inf) throw InvalidArgument("accretivity_residual supports p = 1 and p = 2");
  const Graph& g = ctx.graph();
  const auto du = g.to_dense(u);
  const auto dv = g.to_dense(v);
  const auto z = l_difference(ctx, nl, du, dv);
  std::vector<double> k(du.size());
  std::vector<double> perturbed(du.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    k[i] = du[i] - dv[i];
    perturbed[i] = k[i] + lambda * z[i];
  }
  return dense_norm(g, perturbed, p) - dense_norm(g, k, p);
}

double sign_pairing(const LaplacianContext& ctx, const Nonlinearity& nl, const NodeFunction& u,
                    const NodeFunction& v) {
  const Graph& g = ctx.graph();
  const auto du = g.to_dense(u);
  const auto dv = g.to_dense(v);
  const auto z = l_difference(ctx, nl, du, dv);
  CompensatedSum acc;
  for (NodeIndex x = 0; x < g.size(); ++x) {
    if (du[x] != dv[x]) acc += z[x] * sgn(du[x] - dv[x]) * g.mu(x);
  }
  return acc.value();
}

}  // namespace gpme
