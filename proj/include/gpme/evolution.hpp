#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gpme/graph.hpp"
#include "gpme/lazy_graph.hpp"
#include "gpme/node_function.hpp"
#include "gpme/nonlinearity.hpp"
#include "gpme/resolvent.hpp"

namespace gpme {

/// Time-dependent source term f(t, x) on [0, T].
class Forcing {
 public:
  enum class Kind { zero, constant, piecewise_constant, sampled };

  /// Value on the half-open interval (t_start, t_end]; the first piece also covers t_start = 0.
  struct Piece {
    double t_start;
    double t_end;
    NodeFunction value;
  };
  using Sampler = std::function<NodeFunction(double)>;

  Forcing() = default;
  static Forcing zero();
  static Forcing constant(NodeFunction f);
  /// Pieces must be contiguous and start at 0.
  static Forcing piecewise(std::vector<Piece> pieces);
  static Forcing sampled(Sampler f);

  Kind kind() const noexcept { return kind_; }
  NodeFunction operator()(double t) const;
  const std::vector<Piece>& pieces() const noexcept { return pieces_; }
  /// Interior jump times of a piecewise forcing.
  std::vector<double> breakpoints() const;

 private:
  Kind kind_ = Kind::zero;
  std::vector<Piece> pieces_;
  Sampler sampler_;
};

struct EpsilonDiscretization {
  double epsilon = 0.0;
  double T = 0.0;
  std::vector<double> grid;             // t_0 = 0 < t_1 < ... < t_n = T
  std::vector<NodeFunction> f_samples;  // f_k = f(t_k), k = 1..n (index k - 1)
  /// sum_k int_{t_{k-1}}^{t_k} ||f(t) - f_k||_1 dt; exact unless the forcing is sampled.
  double integral_error = 0.0;
  bool integral_exact = true;

  std::size_t steps() const noexcept { return grid.empty() ? 0 : grid.size() - 1; }
  double step_length(std::size_t k) const { return grid[k] - grid[k - 1]; }
};

/// Uniform grid of ceil(T / eps) steps, refined at the jumps of a piecewise forcing.
/// Sampled forcings are checked with composite midpoint quadrature.
EpsilonDiscretization discretize(const Forcing& f, double T, double epsilon);

struct StepDiagnostic {
  std::size_t k = 0;
  double t = 0.0;
  double lambda = 0.0;
  /// ||(u_k - u_{k-1}) / lambda + L u_k - f_k||_1
  double residual_l1 = 0.0;
  std::size_t iterations = 0;
  SolveMethod method = SolveMethod::gauss_seidel;
  std::optional<std::size_t> truncation_level;
};

struct EvolutionResult {
  EpsilonDiscretization discretization;
  std::vector<NodeFunction> states;  // u_0, ..., u_n
  std::vector<StepDiagnostic> diagnostics;
  std::optional<double> delta_estimate;
  std::vector<double> delta_history;  // sup-in-time l1 gaps between consecutive refinements
  std::vector<std::string> notes;

  /// Piecewise-constant trajectory: u(0) = u_0 and u(t) = u_k on (t_{k-1}, t_k].
  const NodeFunction& state_at(double t) const;
};

/// u_k = (id + lambda L)^{-1}(u_prev + lambda f_k).
ResolventSolution step(const Graph& graph, const Nonlinearity& nl, const NodeFunction& u_prev, double lambda,
                       const NodeFunction& f_k, const SolverOptions& opts = {});
ResolventSolution step(const LazyGraph& graph, const Nonlinearity& nl, const NodeFunction& u_prev, double lambda,
                       const NodeFunction& f_k, const ExhaustionOptions& opts = {});

struct EvolveOptions {
  SolverOptions solver;
  ExhaustionOptions exhaustion;
  std::size_t max_refinements = 10;
};

EvolutionResult evolve(const Graph& graph, const Nonlinearity& nl, const NodeFunction& u0, const Forcing& f, double T,
                       double epsilon, const EvolveOptions& opts = {});
/// Each step is solved by Dirichlet exhaustion. Sign-changing data needs one of H1/H2/H3.
EvolutionResult evolve(const LazyGraph& graph, const Nonlinearity& nl, const NodeFunction& u0, const Forcing& f,
                       double T, double epsilon, const EvolveOptions& opts = {});

/// Runs eps, eps/2, eps/4, ... until consecutive trajectories differ by at most tol in
/// sup-over-coarse-grid l1 distance.
EvolutionResult evolve_mild(const Graph& graph, const Nonlinearity& nl, const NodeFunction& u0, const Forcing& f,
                            double T, double epsilon, double tol, const EvolveOptions& opts = {});
EvolutionResult evolve_mild(const LazyGraph& graph, const Nonlinearity& nl, const NodeFunction& u0, const Forcing& f,
                            double T, double epsilon, double tol, const EvolveOptions& opts = {});

/// max over grid times t_i < t_j of ||u(t_j) - w(t_j)||_1 - ||u(t_i) - w(t_i)||_1 - int_{t_i}^{t_j} ||f - g||_1,
/// with the integral taken over the sampled forcings of the two runs. Non-positive when the
/// l1 contraction holds.
double contraction_gap(const EvolutionResult& a, const EvolutionResult& b);

struct ClassicRegimeReport {
  bool classic = false;
  std::string report;
};

ClassicRegimeReport classic_regime_check(const Graph& graph, const Nonlinearity& nl);
ClassicRegimeReport classic_regime_check(const LazyGraph& graph, const Nonlinearity& nl);

}  // namespace gpme
