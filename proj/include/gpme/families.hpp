#pragma once

#include <memory>
#include <optional>
#include <string>

#include "gpme/expression.hpp"
#include "gpme/lazy_graph.hpp"

namespace gpme {

/// Node/edge profiles for the chain-like families, as expressions in the variable n.
/// For the half-line and the lattice n is the node label and w(n) is the weight of
/// the edge {n, n+1}; for the binary tree n is the depth and w(n) the weight of an
/// edge whose child sits at depth n.
struct ChainProfile {
  Expression mu = Expression::parse("1", "n");
  Expression kappa = Expression::parse("0", "n");
  Expression w = Expression::parse("1", "n");
  /// User-asserted bounds; computed automatically when every profile is constant.
  std::optional<double> mu_lower_bound;
  std::optional<double> deg_bound;
};

/// Star with centre "c" and leaves "1", "2", ...: w(c, k) = w * ratio^k,
/// mu(k) = mu_leaf * mu_ratio^k, mu(c) = mu_center, kappa constant.
struct StarProfile {
  double w = 1.0;
  double ratio = 0.5;
  double mu_center = 1.0;
  double mu_leaf = 1.0;
  double mu_ratio = 1.0;
  double kappa = 0.0;
};

/// Nodes "0", "1", "2", ... with n ~ n+1.
std::shared_ptr<const LazyGraph> half_line(const ChainProfile& profile = {});
/// Nodes "...", "-1", "0", "1", ... with n ~ n+1, rooted at "0".
std::shared_ptr<const LazyGraph> integer_lattice_1d(const ChainProfile& profile = {});
/// Rooted binary tree in heap numbering: node n has children 2n+1 and 2n+2.
std::shared_ptr<const LazyGraph> binary_tree(const ChainProfile& profile = {});
/// Star with infinitely many leaves (not locally finite).
std::shared_ptr<const LazyGraph> star_infinite(const StarProfile& profile = {});

}  // namespace gpme
