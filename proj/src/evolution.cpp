#include "gpme/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gpme/error.hpp"
#include "gpme/laplacian.hpp"
#include "gpme/summation.hpp"

namespace gpme {

Forcing Forcing::zero() { return Forcing(); }

Forcing Forcing::constant(NodeFunction f) {
  Forcing out;
  out.kind_ = Kind::constant;
  out.pieces_.push_back({0.0, INFINITY, std::move(f)});
  return out;
}

Forcing Forcing::piecewise(std::vector<Piece> pieces) {
  if (pieces.empty()) throw InvalidArgument("piecewise forcing needs at least one piece");
  if (pieces.front().t_start != 0.0) throw InvalidArgument("piecewise forcing must start at t = 0");
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!(pieces[i].t_end > pieces[i].t_start)) throw InvalidArgument("forcing piece has empty interval");
    if (i > 0 && pieces[i].t_start != pieces[i - 1].t_end) {
      throw InvalidArgument("forcing pieces must be contiguous without overlap");
    }
  }
  Forcing out;
  out.kind_ = Kind::piecewise_constant;
  out.pieces_ = std::move(pieces);
  return out;
}

Forcing Forcing::sampled(Sampler f) {
  if (!f) throw InvalidArgument("sampled forcing needs a callable");
  Forcing out;
  out.kind_ = Kind::sampled;
  out.sampler_ = std::move(f);
  return out;
}

NodeFunction Forcing::operator()(double t) const {
  switch (kind_) {
    case Kind::zero:
      return NodeFunction();
    case Kind::constant:
      return pieces_.front().value;
    case Kind::sampled:
      return sampler_(t);
    case Kind::piecewise_constant:
      break;
  }
  if (t <= pieces_.front().t_end) return pieces_.front().value;
  const auto it = std::lower_bound(pieces_.begin(), pieces_.end(), t,
                                   [](const Piece& p, double time) { return p.t_end < time; });
  if (it == pieces_.end()) throw InvalidArgument("forcing is not defined at t = " + std::to_string(t));
  return it->value;
}

std::vector<double> Forcing::breakpoints() const {
  std::vector<double> out;
  if (kind_ != Kind::piecewise_constant) return out;
  for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) out.push_back(pieces_[i].t_end);
  return out;
}

EpsilonDiscretization discretize(const Forcing& f, double T, double epsilon) {
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidArgument("T must be positive and finite");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidArgument("epsilon must be positive");
  if (f.kind() == Forcing::Kind::piecewise_constant && f.pieces().back().t_end < T) {
    throw InvalidArgument("piecewise forcing does not cover [0, T]");
  }

  EpsilonDiscretization d;
  d.epsilon = epsilon;
  d.T = T;
  const auto n = static_cast<std::size_t>(std::ceil(T / epsilon));
  for (std::size_t k = 0; k <= n; ++k) d.grid.push_back(k == n ? T : T * static_cast<double>(k) / static_cast<double>(n));

  const double snap = 1e-12 * T;
  for (double b : f.breakpoints()) {
    if (!(b > 0.0 && b < T)) continue;
    auto it = std::lower_bound(d.grid.begin(), d.grid.end(), b);
    if (it != d.grid.end() && *it - b <= snap) {
      if (*it != T) *it = b;
    } else if (it != d.grid.begin() && b - *(it - 1) <= snap) {
      if (*(it - 1) != 0.0) *(it - 1) = b;
    } else {
      d.grid.insert(it, b);
    }
  }

  for (std::size_t k = 1; k < d.grid.size(); ++k) d.f_samples.push_back(f(d.grid[k]));

  if (f.kind() == Forcing::Kind::sampled) {
    constexpr int kSub = 4;
    CompensatedSum acc;
    for (std::size_t k = 1; k < d.grid.size(); ++k) {
      const double h = d.step_length(k) / kSub;
      for (int j = 0; j < kSub; ++j) {
        const double t = d.grid[k - 1] + (j + 0.5) * h;
        acc += h * norm(f(t) - d.f_samples[k - 1], Lp::one);
      }
    }
    d.integral_error = acc.value();
    d.integral_exact = false;
    if (d.integral_error > epsilon) {
      std::ostringstream msg;
      msg << "sampled forcing: estimated integral error " << d.integral_error << " exceeds epsilon " << epsilon
          << "; use a smaller epsilon";
      throw InvalidArgument(msg.str());
    }
  }
  return d;
}

const NodeFunction& EvolutionResult::state_at(double t) const {
  const auto& grid = discretization.grid;
  if (states.empty()) throw InvalidArgument("empty trajectory");
  if (t <= grid.front()) return states.front();
  const auto it = std::lower_bound(grid.begin(), grid.end(), t);
  if (it == grid.end()) throw InvalidArgument("time " + std::to_string(t) + " lies beyond T");
  return states[static_cast<std::size_t>(it - grid.begin())];
}

ResolventSolution step(const Graph& graph, const Nonlinearity& nl, const NodeFunction& u_prev, double lambda,
                       const NodeFunction& f_k, const SolverOptions& opts) {
  if (!(lambda > 0.0)) throw InvalidArgument("step length must be positive");
  return solve_finite(graph, nl, lambda, u_prev + f_k * lambda, opts);
}

ResolventSolution step(const LazyGraph& graph, const Nonlinearity& nl, const NodeFunction& u_prev, double lambda,
                       const NodeFunction& f_k, const ExhaustionOptions& opts) {
  if (!(lambda > 0.0)) throw InvalidArgument("step length must be positive");
  return solve_exhaustion(graph, nl, lambda, u_prev + f_k * lambda, opts);
}

namespace {

SolverOptions step_options(SolverOptions opts, double lambda) {
  opts.residual_tol *= std::min(1.0, lambda);
  return opts;
}

[[noreturn]] void rethrow_at_step(std::size_t k, const Error& e) {
  const std::string msg = "step " + std::to_string(k) + ": " + e.what();
  if (const auto* c = dynamic_cast<const ConvergenceError*>(&e)) throw ConvergenceError(msg, c->best_residual());
  if (dynamic_cast<const HypothesisRefusal*>(&e)) {
    throw HypothesisRefusal(e.what(), "step " + std::to_string(k) + "; " + e.context());
  }
  if (dynamic_cast<const TruncationError*>(&e)) throw TruncationError(msg);
  throw;
}

bool same_sign(const NodeFunction& u0, const EpsilonDiscretization& d, bool positive) {
  if (positive ? !u0.nonnegative() : !u0.nonpositive()) return false;
  for (const NodeFunction& f : d.f_samples) {
    if (positive ? !f.nonnegative() : !f.nonpositive()) return false;
  }
  return true;
}

template <class Run>
EvolutionResult refine(Run run, double T, double epsilon, double tol, std::size_t max_refinements) {
  if (!(tol >= 0.0)) throw InvalidArgument("mild tolerance must be nonnegative");
  EvolutionResult coarse = run(epsilon);
  std::vector<double> history;
  double eps = epsilon;
  for (std::size_t r = 0; r < max_refinements; ++r) {
    eps *= 0.5;
    EvolutionResult fine = run(eps);
    double gap = 0.0;
    const auto& grid = coarse.discretization.grid;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      gap = std::max(gap, norm(fine.state_at(grid[j]) - coarse.states[j], Lp::one));
    }
    history.push_back(gap);
    if (gap <= tol) {
      fine.delta_history = history;
      fine.delta_estimate = gap;
      fine.notes.push_back("refined from epsilon " + std::to_string(epsilon) + " over [0, " + std::to_string(T) +
                           "], " + std::to_string(r + 1) + " halvings");
      return fine;
    }
    coarse = std::move(fine);
  }
  std::ostringstream msg;
  msg << "mild solution refinement did not reach tolerance " << tol << " after " << max_refinements
      << " halvings; differences:";
  for (double h : history) msg << ' ' << h;
  throw ConvergenceError(msg.str(), history.empty() ? INFINITY : history.back());
}

}  // namespace

EvolutionResult evolve(const Graph& graph, const Nonlinearity& nl, const NodeFunction& u0, const Forcing& f, double T,
                       double epsilon, const EvolveOptions& opts) {
  EvolutionResult out;
  out.discretization = discretize(f, T, epsilon);
  const EpsilonDiscretization& d = out.discretization;
  const LaplacianContext ctx(graph);
  const std::size_t n = graph.size();

  std::vector<double> u = graph.to_dense(u0);
  out.states.push_back(graph.from_dense(u));
  std::vector<double> g(n);
  for (std::size_t k = 1; k <= d.steps(); ++k) {
    const double lambda = d.step_length(k);
    const auto fk = graph.to_dense(d.f_samples[k - 1]);
    for (NodeIndex x = 0; x < n; ++x) g[x] = u[x] + lambda * fk[x];
    DenseSolve s;
    try {
      s = solve_dense(ctx, nl, lambda, g, step_options(opts.solver, lambda));
    } catch (const Error& e) {
      rethrow_at_step(k, e);
    }
    CompensatedSum res;
    for (NodeIndex x = 0; x < n; ++x) {
      const double r = (s.u[x] - u[x]) / lambda + ctx.apply_at(s.v, x) - fk[x];
      res += std::fabs(r) * graph.mu(x);
    }
    StepDiagnostic diag;
    diag.k = k;
    diag.t = d.grid[k];
    diag.lambda = lambda;
    diag.residual_l1 = res.value();
    diag.iterations = s.iterations;
    diag.method = s.method;
    out.diagnostics.push_back(diag);
    u = std::move(s.u);
    out.states.push_back(graph.from_dense(u));
  }
  return out;
}

EvolutionResult evolve(const LazyGraph& graph, const Nonlinearity& nl, const NodeFunction& u0, const Forcing& f,
                       double T, double epsilon, const EvolveOptions& opts) {
  EvolutionResult out;
  out.discretization = discretize(f, T, epsilon);
  const EpsilonDiscretization& d = out.discretization;
  for (const auto& [id, value] : u0.values()) {
    if (!graph.contains(id)) throw UnknownNode(id);
  }
  if (!same_sign(u0, d, true) && !same_sign(u0, d, false)) {
    const Hypotheses h = check_hypotheses(graph, nl);
    if (!h.any()) throw HypothesisRefusal("sign-changing data requires H1/H2/H3", h.describe());
  }

  out.states.push_back(u0);
  for (std::size_t k = 1; k <= d.steps(); ++k) {
    const double lambda = d.step_length(k);
    ExhaustionOptions eo = opts.exhaustion;
    eo.solver = step_options(eo.solver, lambda);
    ResolventSolution s;
    try {
      s = step(graph, nl, out.states.back(), lambda, d.f_samples[k - 1], eo);
    } catch (const Error& e) {
      rethrow_at_step(k, e);
    }
    StepDiagnostic diag;
    diag.k = k;
    diag.t = d.grid[k];
    diag.lambda = lambda;
    diag.residual_l1 = s.residual_l1 / lambda;
    diag.iterations = s.iterations;
    diag.method = s.method;
    diag.truncation_level = s.truncation_level;
    out.diagnostics.push_back(diag);
    out.states.push_back(std::move(s.u));
  }
  out.notes.push_back("step residuals are measured on the Dirichlet truncation used for each step");
  return out;
}

EvolutionResult evolve_mild(const Graph& graph, const Nonlinearity& nl, const NodeFunction& u0, const Forcing& f,
                            double T, double epsilon, double tol, const EvolveOptions& opts) {
  return refine([&](double eps) { return evolve(graph, nl, u0, f, T, eps, opts); }, T, epsilon, tol,
                opts.max_refinements);
}

EvolutionResult evolve_mild(const LazyGraph& graph, const Nonlinearity& nl, const NodeFunction& u0, const Forcing& f,
                            double T, double epsilon, double tol, const EvolveOptions& opts) {
  return refine([&](double eps) { return evolve(graph, nl, u0, f, T, eps, opts); }, T, epsilon, tol,
                opts.max_refinements);
}

double contraction_gap(const EvolutionResult& a, const EvolutionResult& b) {
  const auto& ga = a.discretization.grid;
  const auto& gb = b.discretization.grid;
  if (ga != gb) throw InvalidArgument("contraction_gap needs runs on the same grid");
  if (a.states.size() != ga.size() || b.states.size() != gb.size()) {
    throw InvalidArgument("trajectory length does not match its grid");
  }
  double integral = 0.0;
  double lowest = norm(a.states[0] - b.states[0], Lp::one);
  double gap = -INFINITY;
  CompensatedSum acc;
  for (std::size_t j = 1; j < ga.size(); ++j) {
    acc += (ga[j] - ga[j - 1]) *
           norm(a.discretization.f_samples[j - 1] - b.discretization.f_samples[j - 1], Lp::one);
    integral = acc.value();
    const double h = norm(a.states[j] - b.states[j], Lp::one) - integral;
    gap = std::max(gap, h - lowest);
    lowest = std::min(lowest, h);
  }
  return ga.size() < 2 ? 0.0 : gap;
}

ClassicRegimeReport classic_regime_check(const Graph& graph, const Nonlinearity&) {
  double sup = 0.0;
  for (NodeIndex x = 0; x < graph.size(); ++x) sup = std::max(sup, degree(graph, x).Deg);
  std::ostringstream s;
  s << "finite graph: sup Deg = " << sup << " < inf; mild solutions are classic solutions";
  return {true, s.str()};
}

ClassicRegimeReport classic_regime_check(const LazyGraph& graph, const Nonlinearity& nl) {
  const auto deg = graph.uniform_deg_bound();
  if (!deg) {
    return {false, "unverifiable: '" + graph.name() + "' carries no uniform bound on Deg"};
  }
  std::ostringstream s;
  s << "sup Deg <= " << *deg << " on '" << graph.name() << "'";
  if (nl.global_lipschitz()) {
    s << "; phi is globally Lipschitz (L = " << *nl.global_lipschitz() << "); mild solutions are classic solutions";
    return {true, s.str()};
  }
  const auto mu_lo = graph.uniform_mu_lower_bound();
  if (mu_lo && *mu_lo > 0.0 && nl.locally_lipschitz()) {
    s << "; inf mu >= " << *mu_lo
      << " keeps bounded data bounded and phi is locally Lipschitz; mild solutions are classic solutions";
    return {true, s.str()};
  }
  s << "; unverifiable: phi is not known to be Lipschitz on the range of the solution";
  return {false, s.str()};
}

}  // namespace gpme
