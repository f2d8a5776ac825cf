#pragma once

#include <span>
#include <string>
#include <vector>

#include "gpme/graph.hpp"
#include "gpme/lazy_graph.hpp"
#include "gpme/node_function.hpp"
#include "gpme/nonlinearity.hpp"

namespace gpme {

/// The formal graph Laplacian of a finite graph
///   (Delta v)(x) = (1/mu(x)) sum_y w(x,y) (v(x) - v(y)) + (kappa(x)/mu(x)) v(x)
/// with deg/Deg cached at construction. Dirichlet Laplacians are obtained by
/// passing DirichletSubgraph::graph.
class LaplacianContext {
 public:
  explicit LaplacianContext(Graph graph);

  const Graph& graph() const noexcept { return graph_; }
  double deg(NodeIndex x) const { return deg_[x]; }
  double Deg(NodeIndex x) const { return Deg_[x]; }

  /// (Delta v)(x) for a dense vector v in node order.
  double apply_at(std::span<const double> v, NodeIndex x) const;
  std::vector<double> apply(std::span<const double> v) const;

 private:
  Graph graph_;
  std::vector<double> deg_;
  std::vector<double> Deg_;
};

double apply(const LaplacianContext& ctx, const NodeFunction& v, const std::string& x);
NodeFunction apply(const LaplacianContext& ctx, const NodeFunction& v);

/// L u = Delta Phi u, reported on supp u and its neighbours.
NodeFunction apply_L(const LaplacianContext& ctx, const Nonlinearity& nl, const NodeFunction& u);

/// (Delta v)(x) on a lazy graph for finitely supported v.
double apply(const LazyGraph& graph, const NodeFunction& v, const std::string& x);
/// L u on a lazy graph. Throws TruncationError when a node of supp u has
/// infinitely many neighbours (the result would not be finitely supported).
NodeFunction apply_L(const LazyGraph& graph, const Nonlinearity& nl, const NodeFunction& u);

/// sum_x (Delta v)(x) mu(x); equals sum_x kappa(x) v(x) by Green's identity.
double green_mass_rate(const LaplacianContext& ctx, const NodeFunction& v);

/// max over x in A of |Delta_dir v(x) - Delta(i v)(x)| where i extends by zero.
/// Throws InvalidArgument if v is not supported in A.
double dirichlet_commutation_check(const Graph& g, std::span<const std::string> subset, const NodeFunction& v);

/// ||(u-v) + lambda (Lu - Lv)||_p - ||u-v||_p, p in {1, 2}.
double accretivity_residual(const LaplacianContext& ctx, const Nonlinearity& nl, const NodeFunction& u,
                            const NodeFunction& v, double lambda, Lp p = Lp::one);

/// sum over {u != v} of (Lu - Lv)(x) sgn(u - v)(x) mu(x); nonnegative on finite graphs.
double sign_pairing(const LaplacianContext& ctx, const Nonlinearity& nl, const NodeFunction& u,
                    const NodeFunction& v);

}  // namespace gpme
