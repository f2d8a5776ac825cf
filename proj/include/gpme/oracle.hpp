#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpme/graph.hpp"
#include "gpme/node_function.hpp"
#include "gpme/nonlinearity.hpp"

// Reference computations for tests. Nothing here calls into the production solvers or
// their summation helpers.
namespace gpme::oracle {

/// Delta as a dense matrix in the graph's node order.
struct DenseOperator {
  Eigen::MatrixXd matrix;
  std::vector<std::string> nodes;
  std::vector<double> mu;
};

inline constexpr std::size_t kMaxDenseNodes = 2000;

DenseOperator assemble_dense(const Graph& graph);

/// exp(-t M) u0 through the eigendecomposition of the symmetrised operator
/// mu^{1/2} M mu^{-1/2}.
NodeFunction expm_apply(const DenseOperator& M, double t, const NodeFunction& u0);

/// Root of u + lambda (kappa / mu) phi(u) = g by grid scan and bisection.
double brute_resolvent_1d(double kappa, double mu, const Nonlinearity& nl, double lambda, double g);

/// ||k||_1 (||k + lambda z||_1 - ||k||_1) / lambda for each lambda in the sequence.
std::vector<double> bracket_by_limit(const NodeFunction& z, const NodeFunction& k, const std::vector<double>& lambdas);

}  // namespace gpme::oracle
