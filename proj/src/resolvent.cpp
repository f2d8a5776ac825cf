#include "gpme/resolvent.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>

#include "gpme/error.hpp"
#include "gpme/summation.hpp"

namespace gpme {

const char* to_string(SolveMethod m) {
  return m == SolveMethod::gauss_seidel ? "gauss_seidel" : "newton";
}

double solve_scalar(const Nonlinearity& nl, double a, double r, double guess, double tol) {
  if (r == 0.0) return 0.0;
  const double s = r > 0.0 ? 1.0 : -1.0;
  // e(t) = s * (psi(t) + a t - r): negative between 0 and the root, positive beyond it.
  auto excess = [&](double t) { return s * (nl.psi(t) + a * t - r); };
  const double accept = tol * std::min(1.0, std::fabs(r));

  double t = (guess != 0.0 && sgn(guess) == sgn(r)) ? guess : r / (1.0 + a);
  if (t == 0.0) t = r;  // r / (1 + a) underflowed
  double lo = 0.0;
  double e_lo = -std::fabs(r);
  double hi = 0.0;
  double e_hi = 0.0;
  double e = excess(t);
  if (e == 0.0) return t;
  if (std::isnan(e)) throw ConvergenceError("scalar equation is not finite at the initial guess", std::fabs(r));

  // Exponential search for a bracket [lo, hi] (in |.|) around the root.
  if (e > 0.0) {
    hi = t;
    e_hi = e;
    for (int i = 0; i < 4096; ++i) {
      t *= 0.5;
      if (t == 0.0) break;
      e = excess(t);
      if (e == 0.0) return t;
      if (e < 0.0) {
        lo = t;
        e_lo = e;
        break;
      }
      hi = t;
      e_hi = e;
    }
  } else {
    lo = t;
    e_lo = e;
    for (int i = 0; i < 4096; ++i) {
      t *= 2.0;
      if (!std::isfinite(t)) throw ConvergenceError("scalar bracket overflow", std::fabs(r));
      e = excess(t);
      if (e == 0.0) return t;
      if (e > 0.0) {
        hi = t;
        e_hi = e;
        break;
      }
      lo = t;
      e_lo = e;
    }
    if (hi == 0.0) throw ConvergenceError("scalar bracket search failed", std::fabs(r));
  }

  // Safeguarded Newton / bisection inside the bracket.
  const bool newton = nl.has_phi_prime();
  double x = std::fabs(e_lo) < std::fabs(e_hi) ? lo : hi;
  double e_x = x == lo ? e_lo : e_hi;
  bool force_bisect = false;
  for (int iter = 0; iter < 400; ++iter) {
    const double width = std::fabs(hi - lo);
    const double mid = lo + 0.5 * (hi - lo);
    if (mid == lo || mid == hi) break;

    double cand = mid;
    bool used_newton = false;
    if (newton && !force_bisect && x != 0.0) {
      const double dphi = nl.phi_prime(nl.psi(x));
      const double slope = (dphi > 0.0 ? 1.0 / dphi : INFINITY) + a;  // d/dt of psi(t) + a t
      if (std::isfinite(slope) && slope > 0.0) {
        const double step = x - s * e_x / slope;
        if (step > std::min(lo, hi) && step < std::max(lo, hi)) {
          cand = step;
          used_newton = true;
        }
      }
    }
    const double e_c = excess(cand);
    if (std::fabs(e_c) <= accept) return cand;
    if (e_c < 0.0) {
      lo = cand;
      e_lo = e_c;
    } else {
      hi = cand;
      e_hi = e_c;
    }
    x = cand;
    e_x = e_c;
    force_bisect = used_newton && std::fabs(hi - lo) > 0.5 * width;
  }
  // Bracket collapsed to adjacent doubles; keep the sign-correct end.
  if (lo == 0.0) return hi;
  return std::fabs(e_lo) <= std::fabs(e_hi) ? lo : hi;
}

double resolvent_residual(const LaplacianContext& ctx, const Nonlinearity& nl, double lambda,
                          std::span<const double> v, std::span<const double> g) {
  const Graph& graph = ctx.graph();
  CompensatedSum acc;
  for (NodeIndex x = 0; x < graph.size(); ++x) {
    const double f = nl.psi(v[x]) + lambda * ctx.apply_at(v, x) - g[x];
    acc += std::fabs(f) * graph.mu(x);
  }
  return acc.value();
}

namespace {

double l1(const Graph& graph, std::span<const double> f) {
  CompensatedSum acc;
  for (NodeIndex x = 0; x < graph.size(); ++x) acc += std::fabs(f[x]) * graph.mu(x);
  return acc.value();
}

// d psi / dv, regularised where psi is not differentiable (PME at 0).
double psi_slope(const Nonlinearity& nl, double v) {
  if (nl.has_phi_prime() && v != 0.0) {
    const double d = nl.phi_prime(nl.psi(v));
    if (d > 0.0 && std::isfinite(d)) return 1.0 / d;
    if (std::isinf(d)) return 0.0;
  }
  const double h = 1e-7 * std::max(std::fabs(v), 1e-12);
  return (nl.psi(v + h) - nl.psi(v - h)) / (2.0 * h);
}

}  // namespace

double resolvent_noise_floor(const LaplacianContext& ctx, const Nonlinearity& nl, double lambda, std::span<const double> v,
                   std::span<const double> g) {
  const Graph& graph = ctx.graph();
  double scale = 0.0;
  for (NodeIndex x = 0; x < graph.size(); ++x) {
    double coupling = graph.kappa(x) * std::fabs(v[x]);
    for (const Adjacent& a : graph.neighbors(x)) coupling += a.weight * (std::fabs(v[x]) + std::fabs(v[a.node]));
    scale += graph.mu(x) * (std::fabs(nl.psi(v[x])) + std::fabs(g[x])) + lambda * coupling;
  }
  return 8.0 * std::numeric_limits<double>::epsilon() * scale;
}

namespace {

using Converged = std::function<bool(double, std::span<const double>)>;

bool newton_polish(const LaplacianContext& ctx, const Nonlinearity& nl, double lambda, std::span<const double> g,
                   std::vector<double>& v, const Converged& met, const SolverOptions& opts, double& residual,
                   std::size_t& iterations) {
  const Graph& graph = ctx.graph();
  const std::size_t n = graph.size();
  std::vector<double> F(n);
  auto eval = [&](std::span<const double> vv, std::vector<double>& out) {
    for (NodeIndex x = 0; x < n; ++x) out[x] = nl.psi(vv[x]) + lambda * ctx.apply_at(vv, x) - g[x];
    return l1(graph, out);
  };
  residual = eval(v, F);
  std::vector<double> trial(n);
  std::vector<double> F_trial(n);
  for (std::size_t it = 0; it < opts.max_newton_iterations; ++it) {
    if (met(residual, v)) return true;
    std::vector<Eigen::Triplet<double>> triplets;
    for (NodeIndex x = 0; x < n; ++x) {
      const double c = lambda / graph.mu(x);
      triplets.emplace_back(x, x, psi_slope(nl, v[x]) + lambda * ctx.Deg(x));
      for (const Adjacent& a : graph.neighbors(x)) triplets.emplace_back(x, a.node, -c * a.weight);
    }
    Eigen::SparseMatrix<double> J(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    J.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) return false;
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
    for (NodeIndex x = 0; x < n; ++x) rhs[static_cast<Eigen::Index>(x)] = -F[x];
    const Eigen::VectorXd delta = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !delta.allFinite()) return false;

    double step = 1.0;
    bool accepted = false;
    while (step > 1e-12) {
      for (NodeIndex x = 0; x < n; ++x) trial[x] = v[x] + step * delta[static_cast<Eigen::Index>(x)];
      const double r = eval(trial, F_trial);
      if (r < (1.0 - 1e-4 * step) * residual) {
        v.swap(trial);
        F.swap(F_trial);
        residual = r;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++iterations;
    if (!accepted) return met(residual, v);
  }
  return met(residual, v);
}

}  // namespace

DenseSolve solve_dense(const LaplacianContext& ctx, const Nonlinearity& nl, double lambda,
                       std::span<const double> g, const SolverOptions& opts) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be positive");
  const Graph& graph = ctx.graph();
  const std::size_t n = graph.size();
  if (g.size() != n) throw InvalidArgument("right-hand side size does not match graph");

  DenseSolve out;
  out.v.resize(n);
  for (NodeIndex x = 0; x < n; ++x) out.v[x] = nl.phi(g[x]);
  const double target = opts.residual_tol * std::max(1.0, l1(graph, g));
  const Converged met = [&](double r, std::span<const double> v) {
    return r <= target || r <= resolvent_noise_floor(ctx, nl, lambda, v, g);
  };

  std::vector<double> diag(n);
  std::vector<double> coupling(n);
  for (NodeIndex x = 0; x < n; ++x) {
    coupling[x] = lambda / graph.mu(x);
    diag[x] = coupling[x] * ctx.deg(x);
  }

  double residual = resolvent_residual(ctx, nl, lambda, out.v, g);
  double window_start = residual;
  bool converged = met(residual, out.v);
  bool to_newton = false;
  std::size_t sweeps = 0;
  auto sweep = [&] {
    for (NodeIndex x = 0; x < n; ++x) {
      CompensatedSum pull;
      for (const Adjacent& a : graph.neighbors(x)) pull += a.weight * out.v[a.node];
      const double rhs = g[x] + coupling[x] * pull.value();
      out.v[x] = solve_scalar(nl, diag[x], rhs, out.v[x], opts.scalar_tol);
    }
    ++sweeps;
  };
  while (!converged && sweeps < opts.max_sweeps) {
    sweep();
    residual = resolvent_residual(ctx, nl, lambda, out.v, g);
    if (met(residual, out.v)) {
      converged = true;
      break;
    }
    if (opts.allow_newton && sweeps % opts.stall_window == 0) {
      const double ratio = residual / window_start;
      bool slow = ratio > 1.0 - opts.stall_reduction;
      if (!slow) {
        const double windows_left = std::log(target / residual) / std::log(ratio);
        slow = windows_left * static_cast<double>(opts.stall_window) > static_cast<double>(opts.projected_sweep_budget);
      }
      if (slow) {
        to_newton = true;
        break;
      }
      window_start = residual;
    }
  }
  out.iterations = sweeps;

  if (!converged && (to_newton || opts.allow_newton)) {
    out.method = SolveMethod::newton;
    std::vector<double> v = out.v;
    double r = residual;
    std::size_t its = 0;
    const bool ok = newton_polish(ctx, nl, lambda, g, v, met, opts, r, its);
    out.iterations += its;
    if (r < residual) {
      out.v = std::move(v);
      residual = r;
    }
    converged = ok;
  }
  // Sign-definite data: a node joins the support only through a sweep, so keep sweeping
  // until the support is closed under adjacency and no entry has the wrong sign.
  const int data_sign = std::all_of(g.begin(), g.end(), [](double t) { return t >= 0.0; })   ? 1
                        : std::all_of(g.begin(), g.end(), [](double t) { return t <= 0.0; }) ? -1
                                                                                             : 0;
  auto unsettled = [&] {
    for (NodeIndex x = 0; x < n; ++x) {
      const int s = sgn(out.v[x]);
      if (s == -data_sign) return true;
      if (s == 0) {
        if (g[x] != 0.0) return true;
        for (const Adjacent& a : graph.neighbors(x)) {
          if (sgn(out.v[a.node]) == data_sign) return true;
        }
      }
    }
    return false;
  };
  if (converged && data_sign != 0) {
    const std::size_t cap = sweeps + n + opts.stall_window;
    while (sweeps < cap && (unsettled() || !met(residual, out.v))) {
      sweep();
      residual = resolvent_residual(ctx, nl, lambda, out.v, g);
    }
    out.iterations = std::max(out.iterations, sweeps);
    converged = met(residual, out.v);
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "resolvent solve did not reach residual " << target << " (best " << residual << " after "
        << out.iterations << " iterations)";
    throw ConvergenceError(msg.str(), residual);
  }

  out.residual_l1 = residual;
  out.u.resize(n);
  for (NodeIndex x = 0; x < n; ++x) out.u[x] = nl.psi(out.v[x]);
  return out;
}

namespace {

ResolventSolution package(const Graph& graph, const DenseSolve& d) {
  ResolventSolution out;
  out.u = graph.from_dense(d.u);
  out.v = graph.from_dense(d.v);
  out.residual_l1 = d.residual_l1;
  out.iterations = d.iterations;
  out.method = d.method;
  return out;
}

}  // namespace

ResolventSolution solve_finite(const Graph& graph, const Nonlinearity& nl, double lambda, const NodeFunction& g,
                               const SolverOptions& opts) {
  const LaplacianContext ctx(graph);
  const auto dense_g = graph.to_dense(g);
  return package(graph, solve_dense(ctx, nl, lambda, dense_g, opts));
}

ResolventSolution solve_componentwise(const Graph& graph, const Nonlinearity& nl, double lambda,
                                      const NodeFunction& g, const SolverOptions& opts) {
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
  const auto dense_g = graph.to_dense(g);
  DenseSolve all;
  all.u.assign(graph.size(), 0.0);
  all.v.assign(graph.size(), 0.0);
  for (const auto& block : connected_components(graph)) {
    const Graph sub = induced_subgraph(graph, block);
    std::vector<double> g_block(block.size());
    for (std::size_t k = 0; k < block.size(); ++k) g_block[k] = dense_g[block[k]];
    const DenseSolve part = solve_dense(LaplacianContext(sub), nl, lambda, g_block, opts);
    for (std::size_t k = 0; k < block.size(); ++k) {
      all.u[block[k]] = part.u[k];
      all.v[block[k]] = part.v[k];
    }
    all.iterations = std::max(all.iterations, part.iterations);
    if (part.method == SolveMethod::newton) all.method = SolveMethod::newton;
  }
  all.residual_l1 = resolvent_residual(LaplacianContext(graph), nl, lambda, all.v, dense_g);
  return package(graph, all);
}

std::string Hypotheses::describe() const {
  std::ostringstream s;
  s << "H1 (locally finite): " << (h1 ? "yes" : "no") << "; H2 (inf mu > 0): " << (h2 ? "yes" : "no")
    << "; H3 (bounded sum w/mu, Phi(l1) in l1): " << (h3 ? "yes" : "no");
  return s.str();
}

Hypotheses check_hypotheses(const LazyGraph& graph, const Nonlinearity& nl) {
  Hypotheses h;
  h.h1 = graph.locally_finite();
  const auto mu_lo = graph.uniform_mu_lower_bound();
  h.h2 = mu_lo && *mu_lo > 0.0;
  h.h3 = graph.uniform_deg_bound().has_value() && nl.global_lipschitz().has_value();
  return h;
}

namespace {

void require_hypotheses(const LazyGraph& graph, const Nonlinearity& nl, const NodeFunction& g) {
  if (g.nonnegative() || g.nonpositive()) return;
  const Hypotheses h = check_hypotheses(graph, nl);
  if (!h.any()) {
    throw HypothesisRefusal("sign-changing data requires H1/H2/H3", h.describe());
  }
}

// Checks asserted H2/H3 metadata on the nodes of a truncation.
void verify_on_truncation(const LazyGraph& graph, std::span<const std::string> nodes) {
  const auto mu_lo = graph.uniform_mu_lower_bound();
  const auto deg_hi = graph.uniform_deg_bound();
  for (const std::string& x : nodes) {
    const double mu = graph.mu(x);
    if (mu_lo && mu < *mu_lo * (1.0 - 1e-12)) {
      throw InvalidArgument("asserted lower bound " + std::to_string(*mu_lo) + " on mu fails at node '" + x + "'");
    }
    if (deg_hi) {
      const double Deg = (graph.weight_sum(x) + graph.kappa(x)) / mu;
      if (Deg > *deg_hi * (1.0 + 1e-12)) {
        throw InvalidArgument("asserted bound " + std::to_string(*deg_hi) + " on Deg fails at node '" + x + "'");
      }
    }
  }
}

// Measure of the whole lazy graph when it is shared-owned, else that of the truncation.
Measure node_measure(const LazyGraph& graph, const Graph& truncation) {
  try {
    return graph.measure();
  } catch (const std::bad_weak_ptr&) {
    return truncation.measure();
  }
}

LevelRecord solve_level(const LazyGraph& graph, const Nonlinearity& nl, double lambda, const NodeFunction& g,
                        std::span<const std::string> nodes, std::size_t level, const SolverOptions& opts) {
  verify_on_truncation(graph, nodes);
  const DirichletSubgraph sub = dirichlet_restrict(graph, nodes);
  std::vector<double> g_n(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) g_n[i] = g(nodes[i]);
  const DenseSolve d = solve_dense(LaplacianContext(sub.graph), nl, lambda, g_n, opts);
  LevelRecord rec;
  rec.level = level;
  rec.nodes = nodes.size();
  rec.residual_l1 = d.residual_l1;
  rec.iterations = d.iterations;
  rec.method = d.method;
  NodeFunction::Map values;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (d.u[i] != 0.0) values.emplace(nodes[i], d.u[i]);
  }
  rec.u = NodeFunction(node_measure(graph, sub.graph), std::move(values));
  return rec;
}

void check_support(const LazyGraph& graph, const NodeFunction& g) {
  for (const auto& [id, value] : g.values()) {
    if (!graph.contains(id)) throw UnknownNode(id);
  }
}

}  // namespace

std::vector<LevelRecord> exhaustion_levels(const LazyGraph& graph, const Nonlinearity& nl, double lambda,
                                           const NodeFunction& g, std::size_t first, std::size_t last,
                                           const SolverOptions& opts) {
  if (first < 1 || last < first) throw InvalidArgument("level range must satisfy 1 <= first <= last");
  check_support(graph, g);
  require_hypotheses(graph, nl, g);
  Exhauster ex(graph);
  std::vector<LevelRecord> out;
  for (std::size_t level = 1; level <= last; ++level) {
    if (level >= first) {
      LevelRecord rec = solve_level(graph, nl, lambda, g, ex.nodes(), level, opts);
      if (!out.empty()) rec.difference_l1 = norm(rec.u - out.back().u, Lp::one);
      out.push_back(std::move(rec));
    }
    if (level < last) ex.advance();
  }
  return out;
}

ResolventSolution solve_exhaustion(const LazyGraph& graph, const Nonlinearity& nl, double lambda,
                                   const NodeFunction& g, const ExhaustionOptions& opts) {
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
  if (opts.max_level < 1) throw InvalidArgument("max_level must be at least 1");
  check_support(graph, g);
  require_hypotheses(graph, nl, g);

  const int sign = g.nonnegative() ? 1 : (g.nonpositive() ? -1 : 0);
  ResolventSolution out;
  if (sign != 0) out.monotone_certificate = true;

  Exhauster ex(graph);
  std::size_t quiet_levels = 0;
  bool done = false;
  for (std::size_t level = 1; level <= opts.max_level; ++level) {
    LevelRecord rec = solve_level(graph, nl, lambda, g, ex.nodes(), level, opts.solver);
    if (!out.levels.empty()) {
      const NodeFunction& prev = out.levels.back().u;
      rec.difference_l1 = norm(rec.u - prev, Lp::one);
      if (sign != 0) {
        for (const auto& [id, value] : prev.values()) {
          const double next = rec.u(id);
          const bool ok = sign > 0 ? value <= next + opts.monotone_slack : value >= next - opts.monotone_slack;
          if (!ok) *out.monotone_certificate = false;
        }
      }
      quiet_levels = *rec.difference_l1 <= opts.tol ? quiet_levels + 1 : 0;
    }
    out.levels.push_back(std::move(rec));
    if (quiet_levels >= opts.stagnation_levels) {
      done = true;
      break;
    }
    if (!ex.advance()) {
      out.notes.push_back("exhaustion covers the whole graph at level " + std::to_string(level));
      done = true;
      break;
    }
  }

  if (!done) {
    std::ostringstream msg;
    msg << "exhaustion reached max_level " << opts.max_level << " without stabilising; level differences:";
    for (const LevelRecord& r : out.levels) {
      if (r.difference_l1) msg << ' ' << *r.difference_l1;
    }
    const double last = out.levels.back().difference_l1.value_or(INFINITY);
    throw ConvergenceError(msg.str(), last);
  }

  const LevelRecord& final_level = out.levels.back();
  out.u = final_level.u;
  out.v = extend_phi(nl, out.u);
  out.residual_l1 = final_level.residual_l1;
  out.truncation_level = final_level.level;
  for (const LevelRecord& l : out.levels) {
    out.iterations += l.iterations;
    if (l.method == SolveMethod::newton) out.method = SolveMethod::newton;
  }
  out.notes.push_back(std::string("exhaustion scheme: ") +
                      (ex.scheme() == ExhaustionScheme::balls ? "balls" : "forward_neighbors"));
  out.notes.push_back(check_hypotheses(graph, nl).describe());
  out.notes.push_back("asserted mu/Deg bounds verified-on-truncation (" + std::to_string(final_level.nodes) +
                      " nodes)");
  out.notes.push_back("sign of the exact limit along infinite paths is not checked at truncation");
  return out;
}

bool comparison_check(const Graph& graph, const Nonlinearity& nl, double lambda, const NodeFunction& g1,
                      const NodeFunction& g2, double tol, const SolverOptions& opts) {
  const auto d1 = graph.to_dense(g1);
  const auto d2 = graph.to_dense(g2);
  for (NodeIndex x = 0; x < graph.size(); ++x) {
    if (d1[x] < d2[x]) throw InvalidArgument("comparison_check requires g1 >= g2 (fails at '" + graph.id(x) + "')");
  }
  const LaplacianContext ctx(graph);
  const DenseSolve s1 = solve_dense(ctx, nl, lambda, d1, opts);
  const DenseSolve s2 = solve_dense(ctx, nl, lambda, d2, opts);
  for (NodeIndex x = 0; x < graph.size(); ++x) {
    if (s1.v[x] < s2.v[x] - tol) return false;
  }
  return true;
}

}  // namespace gpme
