#include "gpme/suites.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "gpme/error.hpp"
#include "gpme/evolution.hpp"
#include "gpme/families.hpp"
#include "gpme/laplacian.hpp"
#include "gpme/nonlinearity.hpp"
#include "gpme/oracle.hpp"
#include "gpme/resolvent.hpp"

namespace gpme::suites {

namespace {

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  if (lo == hi) return lo;
  std::uniform_real_distribution<double> d(std::log(lo), std::log(hi));
  return std::exp(d(rng));
}

bool coin(std::mt19937_64& rng, double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

constexpr double kLambdas[] = {1e-3, 1.0, 1e3};
constexpr double kExponents[] = {0.5, 1.0, 2.0, 4.0};

class Tally {
 public:
  explicit Tally(std::string name) { report_.name = std::move(name); report_.worst = -INFINITY; }

  void record(bool ok, double metric, const std::function<std::string()>& describe) {
    ++report_.cases;
    report_.worst = std::max(report_.worst, metric);
    if (ok) {
      ++report_.passed;
    } else if (report_.failures.size() < 5) {
      report_.failures.push_back(describe());
    }
  }

  void fail(const std::string& why) {
    ++report_.cases;
    if (report_.failures.size() < 5) report_.failures.push_back(why);
  }

  SuiteReport finish(const std::string& metric_name) {
    if (report_.cases == 0) report_.worst = 0.0;
    std::ostringstream s;
    s << report_.passed << "/" << report_.cases << " passed; worst " << metric_name << " " << report_.worst;
    report_.summary = s.str();
    return std::move(report_);
  }

 private:
  SuiteReport report_;
};

std::string case_label(std::size_t i, const Graph& g, double m, double lambda) {
  std::ostringstream s;
  s << "case " << i << " (" << g.size() << " nodes, m=" << m << ", lambda=" << lambda << ")";
  return s.str();
}

}  // namespace

Graph random_graph(std::mt19937_64& rng, const RandomGraphOptions& opts) {
  const std::size_t n = pick(rng, std::max<std::size_t>(1, opts.min_nodes), std::max(opts.min_nodes, opts.max_nodes));
  GraphBuilder b;
  for (std::size_t i = 0; i < n; ++i) {
    const double mu = log_uniform(rng, opts.mu_min, opts.mu_max);
    const double kappa = coin(rng, opts.kappa_probability) ? log_uniform(rng, 0.01, 1.0) : 0.0;
    b.add_node("x" + std::to_string(i), mu, kappa);
  }
  std::vector<std::vector<bool>> linked(n, std::vector<bool>(n, false));
  if (opts.connected) {
    for (std::size_t i = 1; i < n; ++i) {
      const std::size_t j = pick(rng, 0, i - 1);
      linked[i][j] = linked[j][i] = true;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!linked[i][j] && coin(rng, opts.edge_probability)) linked[i][j] = linked[j][i] = true;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (linked[i][j]) b.add_edge("x" + std::to_string(i), "x" + std::to_string(j), log_uniform(rng, opts.w_min, opts.w_max));
    }
  }
  return b.build();
}

NodeFunction random_function(std::mt19937_64& rng, const Graph& graph, int sign, double scale,
                             double zero_probability) {
  const double lo = sign > 0 ? 0.0 : -scale;
  const double hi = sign < 0 ? 0.0 : scale;
  std::uniform_real_distribution<double> d(lo, hi);
  NodeFunction::Map values;
  for (NodeIndex x = 0; x < graph.size(); ++x) {
    if (coin(rng, zero_probability)) continue;
    const double v = d(rng);
    if (v != 0.0) values.emplace(graph.id(x), v);
  }
  return NodeFunction(graph.measure(), std::move(values));
}

SuiteReport example(std::size_t cases) {
  Tally t("example");
  for (std::size_t i = 0; i < cases; ++i) {
    GraphBuilder b;
    for (int k = 0; k < 4; ++k) b.add_node("x" + std::to_string(k));
    for (int k = 0; k + 1 < 4; ++k) b.add_edge("x" + std::to_string(k), "x" + std::to_string(k + 1), 1.0);
    const Graph g = b.build();
    const LaplacianContext ctx(g);
    const Nonlinearity nl = Nonlinearity::power_law(4.0);
    const NodeFunction u(g.measure(), {{"x0", 3.0}, {"x1", 4.0}});
    const NodeFunction v(g.measure(), {{"x1", 3.0}});
    const double value = bracket_plus(apply_L(ctx, nl, u) - apply_L(ctx, nl, v), u - v, Lp::two);
    const double err = std::fabs(value - (-13.0));
    t.record(err <= 1e-9, err, [&] { return "bracket = " + std::to_string(value) + ", expected -13"; });
  }
  return t.finish("|bracket + 13|");
}

SuiteReport accretivity(std::uint64_t seed, std::size_t cases) {
  std::mt19937_64 rng(seed);
  Tally t("accretivity");
  for (std::size_t i = 0; i < cases; ++i) {
    const Graph g = random_graph(rng);
    const double lambda = kLambdas[i % 3];
    const double m = kExponents[(i / 3) % 4];
    const Nonlinearity nl = Nonlinearity::power_law(m);
    const NodeFunction u = random_function(rng, g);
    NodeFunction::Map vv;
    for (NodeIndex x = 0; x < g.size(); ++x) {
      const std::string& id = g.id(x);
      // Shared values exercise the zero set of u - v.
      vv[id] = coin(rng, 0.3) ? u(id) : std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    }
    const NodeFunction v(g.measure(), std::move(vv));
    const LaplacianContext ctx(g);
    const double res = accretivity_residual(ctx, nl, u, v, lambda, Lp::one);
    const double scale = 1.0 + norm(u - v, Lp::one);
    t.record(res >= -1e-10 * scale, -res / scale,
             [&] { return case_label(i, g, m, lambda) + ": residual " + std::to_string(res); });
  }
  return t.finish("-residual/(1+|u-v|)");
}

SuiteReport contractivity(std::uint64_t seed, std::size_t cases) {
  std::mt19937_64 rng(seed);
  Tally t("contractivity");
  for (std::size_t i = 0; i < cases; ++i) {
    const Graph g = random_graph(rng);
    const double lambda = kLambdas[i % 3];
    const double m = kExponents[(i / 3) % 4];
    const Nonlinearity nl = Nonlinearity::power_law(m);
    const NodeFunction data = random_function(rng, g, 0, 2.0);
    try {
      const ResolventSolution s = solve_finite(g, nl, lambda, data);
      const double gn = norm(data, Lp::one);
      const double excess = norm(s.u, Lp::one) - gn;
      const LaplacianContext ctx(g);
      const double residual = norm(s.u + apply_L(ctx, nl, s.u) * lambda - data, Lp::one);
      const auto dv = g.to_dense(s.v);
      const auto dg = g.to_dense(data);
      const double target = std::max(SolverOptions{}.residual_tol * std::max(1.0, gn),
                                     resolvent_noise_floor(ctx, nl, lambda, dv, dg));
      const bool ok = excess <= 1e-8 * (1.0 + gn) && s.residual_l1 <= target;
      t.record(ok, excess / (1.0 + gn), [&] {
        return case_label(i, g, m, lambda) + ": |u|-|g| = " + std::to_string(excess) +
               ", residual " + std::to_string(residual);
      });
    } catch (const Error& e) {
      t.fail(case_label(i, g, m, lambda) + ": " + e.what());
    }
  }
  return t.finish("(|u|-|g|)/(1+|g|)");
}

SuiteReport positivity(std::uint64_t seed, std::size_t cases) {
  std::mt19937_64 rng(seed);
  Tally t("positivity");
  RandomGraphOptions go;
  go.min_nodes = 2;
  go.max_nodes = 12;
  go.connected = true;
  go.edge_probability = 0.5;
  go.w_min = 0.5;
  go.w_max = 5.0;
  constexpr double lambdas[] = {0.1, 1.0, 10.0};
  for (std::size_t i = 0; i < cases; ++i) {
    const Graph g = random_graph(rng, go);
    const double lambda = lambdas[i % 3];
    const double m = kExponents[(i / 3) % 4];
    const Nonlinearity nl = Nonlinearity::power_law(m);
    NodeFunction data = random_function(rng, g, 1, 1.0, 0.7);
    if (data.is_zero()) data = NodeFunction(g.measure(), {{g.id(pick(rng, 0, g.size() - 1)), 0.5}});
    try {
      const ResolventSolution pos = solve_finite(g, nl, lambda, data);
      const ResolventSolution neg = solve_finite(g, nl, lambda, -data);
      double least = INFINITY;
      for (NodeIndex x = 0; x < g.size(); ++x) {
        least = std::min({least, pos.u(g.id(x)), -neg.u(g.id(x))});
      }
      t.record(least > 0.0, -least, [&] { return case_label(i, g, m, lambda) + ": min |u| = " + std::to_string(least); });
    } catch (const Error& e) {
      t.fail(case_label(i, g, m, lambda) + ": " + e.what());
    }
  }
  return t.finish("-min(sign * u)");
}

SuiteReport comparison(std::uint64_t seed, std::size_t cases) {
  std::mt19937_64 rng(seed);
  Tally t("comparison");
  SolverOptions opts;
  opts.residual_tol = 1e-13;
  for (std::size_t i = 0; i < cases; ++i) {
    const Graph g = random_graph(rng);
    const double lambda = kLambdas[i % 3];
    const double m = kExponents[(i / 3) % 4];
    const Nonlinearity nl = Nonlinearity::power_law(m);
    const NodeFunction g2 = random_function(rng, g);
    const NodeFunction g1 = g2 + random_function(rng, g, 1, 1.0, 0.5);
    try {
      const ResolventSolution s1 = solve_finite(g, nl, lambda, g1, opts);
      const ResolventSolution s2 = solve_finite(g, nl, lambda, g2, opts);
      double worst = -INFINITY;
      for (NodeIndex x = 0; x < g.size(); ++x) worst = std::max(worst, s2.u(g.id(x)) - s1.u(g.id(x)));
      t.record(worst <= 1e-10, worst, [&] { return case_label(i, g, m, lambda) + ": max(u2-u1) = " + std::to_string(worst); });
    } catch (const Error& e) {
      t.fail(case_label(i, g, m, lambda) + ": " + e.what());
    }
  }
  return t.finish("max(u2-u1)");
}

SuiteReport exhaustion(std::size_t cases) {
  Tally t("exhaustion");
  for (std::size_t i = 0; i < cases; ++i) {
    const auto line = half_line();
    const Nonlinearity nl = Nonlinearity::power_law(2.0);
    const NodeFunction delta(line->measure(), {{"0", 1.0}});
    const auto levels = exhaustion_levels(*line, nl, 1.0, delta, 2, 20);
    double drop = -INFINITY;
    for (std::size_t k = 1; k < levels.size(); ++k) {
      for (const auto& [id, value] : levels[k - 1].u.values()) drop = std::max(drop, value - levels[k].u(id));
    }
    const double first = *levels[1].difference_l1;   // |u_3 - u_2|
    const double last = *levels.back().difference_l1;  // |u_20 - u_19|
    const bool ok = drop <= 1e-10 && last < first;
    t.record(ok, drop, [&] {
      std::ostringstream s;
      s << "largest decrease " << drop << ", |u20-u19| = " << last << ", |u3-u2| = " << first;
      return s.str();
    });
  }
  return t.finish("max(u_{n-1}-u_n)");
}

SuiteReport heat_order(std::uint64_t seed, std::size_t cases) {
  std::mt19937_64 rng(seed);
  Tally t("heat-order");
  RandomGraphOptions go;
  go.min_nodes = 2;
  go.max_nodes = 50;
  go.edge_probability = 0.1;
  go.connected = true;
  go.w_min = 0.2;
  go.w_max = 2.0;
  const Nonlinearity nl = Nonlinearity::power_law(1.0);
  constexpr double eps = 0.02;
  for (std::size_t i = 0; i < cases; ++i) {
    const Graph g = random_graph(rng, go);
    NodeFunction u0 = random_function(rng, g, 1, 1.0, 0.5);
    if (u0.is_zero()) u0 = NodeFunction(g.measure(), {{g.id(0), 1.0}});
    const oracle::DenseOperator M = oracle::assemble_dense(g);
    const NodeFunction exact = oracle::expm_apply(M, 1.0, u0);
    const double e1 = norm(evolve(g, nl, u0, Forcing::zero(), 1.0, eps).states.back() - exact, Lp::one);
    const double e2 = norm(evolve(g, nl, u0, Forcing::zero(), 1.0, eps / 2).states.back() - exact, Lp::one);
    const double ratio = e1 / e2;
    const double order = std::log2(ratio);
    const bool ok = ratio >= 1.6 && ratio <= 2.4 && order >= 0.8 && order <= 1.2;
    t.record(ok, std::fabs(ratio - 2.0), [&] {
      std::ostringstream s;
      s << "case " << i << " (" << g.size() << " nodes): E(eps) = " << e1 << ", E(eps/2) = " << e2 << ", ratio " << ratio;
      return s.str();
    });
  }
  return t.finish("|ratio-2|");
}

SuiteReport mass(std::uint64_t seed, std::size_t cases) {
  std::mt19937_64 rng(seed);
  Tally t("mass");
  RandomGraphOptions go;
  go.kappa_probability = 0.0;
  constexpr double exponents[] = {0.5, 1.0, 2.0};
  for (std::size_t i = 0; i < cases; ++i) {
    const Graph g = random_graph(rng, go);
    const double m = exponents[i % 3];
    const Nonlinearity nl = Nonlinearity::power_law(m);
    const NodeFunction u0 = random_function(rng, g);
    try {
      const EvolutionResult r = evolve(g, nl, u0, Forcing::zero(), 1.0, 0.1);
      auto total = [&](const NodeFunction& u) {
        double s = 0.0;
        for (NodeIndex x = 0; x < g.size(); ++x) s += u(g.id(x)) * g.mu(x);
        return s;
      };
      const double m0 = total(u0);
      const double scale = 1.0 + norm(u0, Lp::one);
      double drift = 0.0;
      for (const NodeFunction& u : r.states) drift = std::max(drift, std::fabs(total(u) - m0));
      t.record(drift <= 1e-8 * scale, drift / scale,
               [&] { return case_label(i, g, m, 0.1) + ": mass drift " + std::to_string(drift); });
    } catch (const Error& e) {
      t.fail(case_label(i, g, m, 0.1) + ": " + e.what());
    }
  }
  return t.finish("drift/(1+|u0|)");
}

SuiteReport contraction(std::uint64_t seed, std::size_t cases) {
  std::mt19937_64 rng(seed);
  Tally t("contraction");
  RandomGraphOptions go;
  go.max_nodes = 20;
  for (std::size_t i = 0; i < cases; ++i) {
    const Graph g = random_graph(rng, go);
    const double m = kExponents[i % 4];
    const Nonlinearity nl = Nonlinearity::power_law(m);
    const NodeFunction u0 = random_function(rng, g);
    const NodeFunction w0 = random_function(rng, g);
    Forcing f1 = Forcing::zero();
    Forcing f2 = Forcing::zero();
    if (i % 3 == 1) {
      f1 = Forcing::constant(random_function(rng, g));
      f2 = Forcing::constant(random_function(rng, g));
    } else if (i % 3 == 2) {
      f1 = Forcing::piecewise({{0.0, 0.37, random_function(rng, g)}, {0.37, 1.0, random_function(rng, g)}});
      f2 = Forcing::piecewise({{0.0, 0.37, random_function(rng, g)}, {0.37, 1.0, random_function(rng, g)}});
    }
    try {
      const EvolutionResult a = evolve(g, nl, u0, f1, 1.0, 0.1);
      const EvolutionResult b = evolve(g, nl, w0, f2, 1.0, 0.1);
      const double gap = contraction_gap(a, b);
      t.record(gap <= 1e-8, gap, [&] { return case_label(i, g, m, 0.1) + ": gap " + std::to_string(gap); });
    } catch (const Error& e) {
      t.fail(case_label(i, g, m, 0.1) + ": " + e.what());
    }
  }
  return t.finish("gap");
}

SuiteReport commutation(std::uint64_t seed, std::size_t cases) {
  std::mt19937_64 rng(seed);
  Tally t("commutation");
  for (std::size_t i = 0; i < cases; ++i) {
    const Graph g = random_graph(rng);
    std::vector<std::string> subset;
    for (NodeIndex x = 0; x < g.size(); ++x) {
      if (coin(rng, 0.5)) subset.push_back(g.id(x));
    }
    if (subset.empty()) subset.push_back(g.id(pick(rng, 0, g.size() - 1)));
    NodeFunction::Map values;
    for (const std::string& id : subset) {
      if (!coin(rng, 0.2)) values.emplace(id, std::uniform_real_distribution<double>(-1.0, 1.0)(rng));
    }
    const NodeFunction v(g.measure(), std::move(values));
    const double gap = dirichlet_commutation_check(g, subset, v);
    t.record(gap <= 1e-12, gap, [&] {
      return "case " + std::to_string(i) + " (" + std::to_string(g.size()) + " nodes, |A| = " +
             std::to_string(subset.size()) + "): discrepancy " + std::to_string(gap);
    });
  }
  return t.finish("discrepancy");
}

SuiteReport bracket_limit(std::uint64_t seed, std::size_t cases) {
  std::mt19937_64 rng(seed);
  Tally t("bracket-limit");
  const std::vector<double> lambdas{1.0, 0.1, 0.01, 0.001};
  for (std::size_t i = 0; i < cases; ++i) {
    const Graph g = random_graph(rng);
    const NodeFunction z = random_function(rng, g);
    NodeFunction::Map kv;
    for (NodeIndex x = 0; x < g.size(); ++x) {
      if (coin(rng, 0.3)) continue;
      const double mag = std::uniform_real_distribution<double>(0.5, 2.0)(rng);
      kv.emplace(g.id(x), coin(rng, 0.5) ? mag : -mag);
    }
    if (kv.empty()) kv.emplace(g.id(0), 1.0);
    const NodeFunction k(g.measure(), std::move(kv));
    const auto seq = oracle::bracket_by_limit(z, k, lambdas);
    const double closed = bracket_plus(z, k, Lp::one);
    bool monotone = true;
    for (std::size_t j = 1; j < seq.size(); ++j) {
      if (seq[j] > seq[j - 1] + 1e-12 * (1.0 + std::fabs(seq[j - 1]))) monotone = false;
    }
    const double rel = std::fabs(seq.back() - closed) / std::max(std::fabs(closed), 1e-12);
    t.record(monotone && rel <= 1e-4, rel, [&] {
      std::ostringstream s;
      s << "case " << i << ": closed form " << closed << ", limit sequence";
      for (double x : seq) s << ' ' << x;
      return s.str();
    });
  }
  return t.finish("relative error at lambda=1e-3");
}

const std::vector<std::string>& names() {
  static const std::vector<std::string> all{"accretivity", "contractivity", "comparison",  "mass",
                                            "exhaustion",  "heat-order",    "positivity",  "contraction",
                                            "commutation", "bracket-limit", "example"};
  return all;
}

bool needs_seed(const std::string& name) {
  return name != "exhaustion" && name != "heat-order" && name != "example";
}

std::size_t default_cases(const std::string& name) {
  static const std::map<std::string, std::size_t> defaults{
      {"accretivity", 1000}, {"contractivity", 500}, {"comparison", 200},   {"mass", 100},
      {"exhaustion", 1},     {"heat-order", 5},      {"positivity", 200},   {"contraction", 100},
      {"commutation", 200},  {"bracket-limit", 200}, {"example", 1}};
  const auto it = defaults.find(name);
  if (it == defaults.end()) throw InvalidArgument("unknown suite '" + name + "'");
  return it->second;
}

SuiteReport run_suite(const std::string& name, const SuiteOptions& opts) {
  const std::size_t cases = opts.cases.value_or(default_cases(name));
  if (cases > 0 && needs_seed(name) && !opts.seed) {
    throw InvalidArgument("suite '" + name + "' is randomized and needs a seed");
  }
  const std::uint64_t seed = opts.seed.value_or(0);
  if (name == "accretivity") return accretivity(seed, cases);
  if (name == "contractivity") return contractivity(seed, cases);
  if (name == "comparison") return comparison(seed, cases);
  if (name == "mass") return mass(seed, cases);
  if (name == "exhaustion") return exhaustion(cases);
  if (name == "heat-order") return heat_order(seed, cases);
  if (name == "positivity") return positivity(seed, cases);
  if (name == "contraction") return contraction(seed, cases);
  if (name == "commutation") return commutation(seed, cases);
  if (name == "bracket-limit") return bracket_limit(seed, cases);
  if (name == "example") return example(cases);
  throw InvalidArgument("unknown suite '" + name + "'");
}

}  // namespace gpme::suites
