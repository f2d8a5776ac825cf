#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpme/graph.hpp"
#include "gpme/laplacian.hpp"
#include "gpme/lazy_graph.hpp"
#include "gpme/node_function.hpp"
#include "gpme/nonlinearity.hpp"

namespace gpme {

/// Tolerances and caps for the finite resolvent solver.
struct SolverOptions {
  /// Stop when ||Psi v + lambda Delta v - g||_1 <= residual_tol * max(1, ||g||_1), or when the
  /// residual is down at the rounding level of its own evaluation.
  double residual_tol = 1e-10;
  /// Scalar equations are solved to |h| <= scalar_tol * min(1, |rhs|) or to adjacent doubles.
  double scalar_tol = 1e-14;
  std::size_t max_sweeps = 100000;
  /// Newton takes over when a window of sweeps reduces the residual by less than stall_reduction,
  /// or when the observed rate projects more than projected_sweep_budget further sweeps.
  std::size_t stall_window = 50;
  double stall_reduction = 0.01;
  std::size_t projected_sweep_budget = 2000;
  std::size_t max_newton_iterations = 200;
  bool allow_newton = true;
};

enum class SolveMethod { gauss_seidel, newton };

const char* to_string(SolveMethod m);

/// One level of a Dirichlet exhaustion.
struct LevelRecord {
  std::size_t level = 0;
  std::size_t nodes = 0;
  /// ||u_n - u_{n-1}||_1, absent on the first level.
  std::optional<double> difference_l1;
  double residual_l1 = 0.0;
  std::size_t iterations = 0;
  SolveMethod method = SolveMethod::gauss_seidel;
  NodeFunction u;
};

struct ResolventSolution {
  NodeFunction u;
  NodeFunction v;  // Phi u
  double residual_l1 = 0.0;
  std::size_t iterations = 0;
  SolveMethod method = SolveMethod::gauss_seidel;
  std::optional<std::size_t> truncation_level;
  std::optional<bool> monotone_certificate;
  std::vector<LevelRecord> levels;
  std::vector<std::string> notes;
};

/// Dense solve of (Psi + lambda Delta) v = g on a finite graph; the building block of
/// everything else in this header.
struct DenseSolve {
  std::vector<double> u;
  std::vector<double> v;
  double residual_l1 = 0.0;
  std::size_t iterations = 0;
  SolveMethod method = SolveMethod::gauss_seidel;
};

DenseSolve solve_dense(const LaplacianContext& ctx, const Nonlinearity& nl, double lambda,
                       std::span<const double> g, const SolverOptions& opts = {});

/// ||Psi v + lambda Delta v - g||_1 for dense vectors.
double resolvent_residual(const LaplacianContext& ctx, const Nonlinearity& nl, double lambda,
                          std::span<const double> v, std::span<const double> g);

/// Rounding level of resolvent_residual at v. The solver also accepts residuals below it.
double resolvent_noise_floor(const LaplacianContext& ctx, const Nonlinearity& nl, double lambda,
                             std::span<const double> v, std::span<const double> g);

/// Root of psi(t) + a t = r for a >= 0, bracketed from the side of 0 that has the sign of r.
double solve_scalar(const Nonlinearity& nl, double a, double r, double guess, double tol);

/// (id + lambda Delta Phi) u = g on a finite graph.
ResolventSolution solve_finite(const Graph& graph, const Nonlinearity& nl, double lambda, const NodeFunction& g,
                               const SolverOptions& opts = {});

/// Same solution, obtained by solving each connected component separately.
ResolventSolution solve_componentwise(const Graph& graph, const Nonlinearity& nl, double lambda,
                                      const NodeFunction& g, const SolverOptions& opts = {});

/// Which of H1/H2/H3 hold for a lazy graph and nonlinearity, as far as the graph's
/// metadata certifies them.
struct Hypotheses {
  bool h1 = false;  // locally finite
  bool h2 = false;  // inf mu > 0
  bool h3 = false;  // sup sum w / mu < inf and Phi maps l^1 into l^1
  bool any() const noexcept { return h1 || h2 || h3; }
  std::string describe() const;
};

Hypotheses check_hypotheses(const LazyGraph& graph, const Nonlinearity& nl);

struct ExhaustionOptions {
  double tol = 1e-10;          // on ||u_{n+1} - u_n||_1
  std::size_t max_level = 60;
  std::size_t stagnation_levels = 3;
  double monotone_slack = 1e-10;
  SolverOptions solver;
};

/// Solutions on the Dirichlet truncations X_first, ..., X_last (fixed range, no stop rule).
/// Throws HypothesisRefusal for sign-changing g when none of H1/H2/H3 holds.
std::vector<LevelRecord> exhaustion_levels(const LazyGraph& graph, const Nonlinearity& nl, double lambda,
                                           const NodeFunction& g, std::size_t first, std::size_t last,
                                           const SolverOptions& opts = {});

/// Limit of the Dirichlet truncation solutions. Stops once stagnation_levels consecutive
/// level differences are <= tol, or as soon as the exhaustion covers the whole graph.
ResolventSolution solve_exhaustion(const LazyGraph& graph, const Nonlinearity& nl, double lambda,
                                   const NodeFunction& g, const ExhaustionOptions& opts = {});

/// Solves with g1 and g2 (g1 >= g2 required) and reports whether v1 >= v2 - tol pointwise.
bool comparison_check(const Graph& graph, const Nonlinearity& nl, double lambda, const NodeFunction& g1,
                      const NodeFunction& g2, double tol = 1e-10, const SolverOptions& opts = {});

}  // namespace gpme
