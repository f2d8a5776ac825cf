#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "doctest.h"
#include "gpme/error.hpp"
#include "gpme/families.hpp"
#include "gpme/laplacian.hpp"
#include "gpme/oracle.hpp"
#include "gpme/resolvent.hpp"
#include "gpme/suites.hpp"
#include "helpers.hpp"

using namespace gpme;

namespace {

Graph two_heat_copies() {
  return GraphBuilder()
      .add_node("a0")
      .add_node("a1")
      .add_node("b0")
      .add_node("b1")
      .add_edge("a0", "a1", 1)
      .add_edge("b0", "b1", 1)
      .build();
}

}  // namespace

TEST_CASE("finite resolvent examples") {
  const Graph iso = GraphBuilder().add_node("a", 2.0).build();
  for (double m : {0.5, 1.0, 3.0})
    for (double lambda : {1e-3, 1.0, 1e3}) {
      const NodeFunction g(Measure{}, {{"a", -1.75}});
      CHECK(solve_finite(iso, Nonlinearity::power_law(m), lambda, g).u("a") == doctest::Approx(-1.75).epsilon(1e-14));
    }

  const ResolventSolution heat =
      solve_finite(testing::path(2), Nonlinearity::power_law(1.0), 1.0, NodeFunction(Measure{}, {{"x0", 3.0}}));
  CHECK(heat.u("x0") == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(heat.u("x1") == doctest::Approx(1.0).epsilon(1e-9));

  const Graph single = GraphBuilder().add_node("a", 1.0, 1.0).build();
  const ResolventSolution quad =
      solve_finite(single, Nonlinearity::power_law(2.0), 1.0, NodeFunction(Measure{}, {{"a", 6.0}}));
  CHECK(quad.u("a") == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(quad.v("a") == doctest::Approx(4.0).epsilon(1e-13));

  CHECK_THROWS_AS(solve_finite(single, Nonlinearity::power_law(2.0), 0.0, NodeFunction{}), InvalidArgument);
  CHECK_THROWS_AS(solve_finite(single, Nonlinearity::power_law(2.0), -1.0, NodeFunction{}), InvalidArgument);
}

TEST_CASE("single node against the brute-force scalar oracle") {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const double mu = 0.2 + 3 * unit(rng);
    const double kappa = 5 * unit(rng);
    const double m = std::vector<double>{0.3, 0.5, 1.0, 2.0, 3.0}[t % 5];
    const double lambda = std::pow(10.0, -3 + 6 * unit(rng));
    const double g = -10 + 20 * unit(rng);
    const Nonlinearity nl = Nonlinearity::power_law(m);
    const Graph node = GraphBuilder().add_node("a", mu, kappa).build();
    const double u = solve_finite(node, nl, lambda, NodeFunction(node.measure(), {{"a", g}})).u("a");
    const double ref = oracle::brute_resolvent_1d(kappa, mu, nl, lambda, g);
    CHECK(std::fabs(u - ref) <= 1e-9 * std::max(1.0, std::fabs(g)));
  }
}

TEST_CASE("linear resolvent against a dense solve") {
  std::mt19937_64 rng(61);
  for (int t = 0; t < 50; ++t) {
    const Graph g = suites::random_graph(rng);
    const NodeFunction data = suites::random_function(rng, g);
    const double lambda = std::vector<double>{1e-2, 1.0, 1e2}[t % 3];
    const oracle::DenseOperator M = oracle::assemble_dense(g);
    const Eigen::Index n = static_cast<Eigen::Index>(g.size());
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) rhs[i] = data(M.nodes[i]);
    const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) + lambda * M.matrix;
    const Eigen::VectorXd ref = A.partialPivLu().solve(rhs);
    const ResolventSolution s = solve_finite(g, Nonlinearity::power_law(1.0), lambda, data);
    for (Eigen::Index i = 0; i < n; ++i)
      CHECK(std::fabs(s.u(M.nodes[i]) - ref[i]) <= 1e-8 * std::max(1.0, rhs.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("componentwise solve") {
  const Graph iso = GraphBuilder().add_node("a").add_node("b").build();
  const NodeFunction g(Measure{}, {{"a", 1.5}, {"b", -2.0}});
  CHECK(solve_componentwise(iso, Nonlinearity::power_law(2.0), 1.0, g).u == g);

  const Graph twice = two_heat_copies();
  const NodeFunction data(Measure{}, {{"a0", 3.0}, {"b0", 3.0}});
  const ResolventSolution s = solve_componentwise(twice, Nonlinearity::power_law(1.0), 1.0, data);
  CHECK(s.u("a0") == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(s.u("a1") == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.u("b0") == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(s.u("b1") == doctest::Approx(1.0).epsilon(1e-9));

  const NodeFunction mixed(Measure{}, {{"a0", 3.0}, {"a1", 1.0}, {"b0", -2.0}});
  const ResolventSolution m = solve_componentwise(twice, Nonlinearity::power_law(2.0), 1.0, mixed);
  CHECK(m.u("a0") > 0.0);
  CHECK(m.u("a1") > 0.0);
  CHECK(m.u("b0") < 0.0);
  CHECK(m.u("b1") < 0.0);

  std::mt19937_64 rng(67);
  suites::RandomGraphOptions sparse;
  sparse.edge_probability = 0.05;
  for (int t = 0; t < 30; ++t) {
    const Graph h = suites::random_graph(rng, sparse);
    const NodeFunction f = suites::random_function(rng, h);
    const Nonlinearity nl = Nonlinearity::power_law(2.0);
    const ResolventSolution a = solve_finite(h, nl, 1.0, f);
    const ResolventSolution b = solve_componentwise(h, nl, 1.0, f);
    CHECK(norm(a.u - b.u, Lp::one) <= 1e-9 * (1.0 + norm(f, Lp::one)));
  }
}

TEST_CASE("resolvent properties on random graphs") {
  std::mt19937_64 rng(71);
  for (int t = 0; t < 100; ++t) {
    const Graph g = suites::random_graph(rng);
    const Nonlinearity nl = Nonlinearity::power_law(std::vector<double>{0.5, 1.0, 2.0, 3.0}[t % 4]);
    const double lambda = std::vector<double>{1e-3, 1.0, 1e3}[t % 3];
    const NodeFunction g1 = suites::random_function(rng, g);
    const NodeFunction g2 = suites::random_function(rng, g);
    const ResolventSolution s1 = solve_finite(g, nl, lambda, g1);
    const ResolventSolution s2 = solve_finite(g, nl, lambda, g2);
    const double n1 = norm(g1, Lp::one);
    CHECK(norm(s1.u, Lp::one) <= n1 + 1e-8 * (1.0 + n1));
    const double d = norm(g1 - g2, Lp::one);
    CHECK(norm(s1.u - s2.u, Lp::one) <= d + 1e-8 * (1.0 + n1 + norm(g2, Lp::one)));

    const NodeFunction pos = suites::random_function(rng, g, 1);
    const ResolventSolution sp = solve_finite(g, nl, lambda, pos);
    for (const auto& [id, value] : sp.u.values()) CHECK(value >= 0.0);
  }
}

TEST_CASE("strict positivity on connected graphs") {
  std::mt19937_64 rng(73);
  suites::RandomGraphOptions small;
  small.max_nodes = 10;
  small.connected = true;
  small.w_min = 0.5;
  small.w_max = 5.0;
  for (int t = 0; t < 50; ++t) {
    const Graph g = suites::random_graph(rng, small);
    NodeFunction data(g.measure(), {{g.id(rng() % g.size()), 1.0}});
    const ResolventSolution s = solve_finite(g, Nonlinearity::power_law(t % 2 ? 2.0 : 1.0), 1.0, data);
    for (const auto& id : g.ids()) CHECK(s.u(id) > 1e-14);
  }
}

TEST_CASE("comparison") {
  const Graph p2 = testing::path(2);
  const Nonlinearity heat = Nonlinearity::power_law(1.0);
  const NodeFunction g1(Measure{}, {{"x0", 3.0}});
  CHECK(comparison_check(p2, heat, 1.0, g1, g1));
  CHECK(comparison_check(p2, heat, 1.0, g1, NodeFunction{}));
  CHECK_THROWS_AS(comparison_check(p2, heat, 1.0, NodeFunction{}, g1), InvalidArgument);

  std::mt19937_64 rng(79);
  for (int t = 0; t < 40; ++t) {
    const Graph g = suites::random_graph(rng);
    const NodeFunction lo = suites::random_function(rng, g);
    const NodeFunction hi = lo + suites::random_function(rng, g, 1);
    const Nonlinearity nl = Nonlinearity::power_law(std::vector<double>{0.5, 1.0, 2.0, 3.0}[t % 4]);
    CHECK(comparison_check(g, nl, 1.0, hi, lo));
  }
}

TEST_CASE("non-convergence carries the best residual") {
  std::mt19937_64 rng(83);
  suites::RandomGraphOptions dense;
  dense.min_nodes = 30;
  dense.connected = true;
  const Graph g = suites::random_graph(rng, dense);
  SolverOptions o;
  o.max_sweeps = 1;
  o.allow_newton = false;
  try {
    solve_finite(g, Nonlinearity::power_law(2.0), 1e3, suites::random_function(rng, g, 0, 1.0, 0.0), o);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.best_residual() > 0.0);
    CHECK(std::string(e.code()) == "no_convergence");
  }
}

TEST_CASE("scalar equation") {
  const Nonlinearity pme = Nonlinearity::power_law(2.0);
  // psi(t) + t = 6 has root t = 4
  CHECK(solve_scalar(pme, 1.0, 6.0, 0.0, 1e-15) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(solve_scalar(pme, 1.0, 0.0, 1.0, 1e-15) == 0.0);
  CHECK(solve_scalar(pme, 0.0, -3.0, 0.0, 1e-15) == doctest::Approx(-9.0).epsilon(1e-14));
  // tiny right-hand sides stay representable
  CHECK(solve_scalar(Nonlinearity::power_law(0.5), 1e300, 1e-300, 0.0, 1e-14) > 0.0);
}

TEST_CASE("hypotheses") {
  const Nonlinearity pme = Nonlinearity::power_law(2.0);
  const Hypotheses line = check_hypotheses(*half_line(), pme);
  CHECK(line.h1);
  CHECK(line.h2);
  const Hypotheses star = check_hypotheses(*star_infinite(), pme);
  CHECK_FALSE(star.h1);
  CHECK(star.h2);
  StarProfile bare;
  bare.mu_ratio = 0.5;
  bare.ratio = 0.9;
  const Hypotheses none = check_hypotheses(*star_infinite(bare), pme);
  CHECK_FALSE(none.any());
  CHECK_FALSE(none.describe().empty());
}

TEST_CASE("exhaustion solves") {
  const Nonlinearity pme = Nonlinearity::power_law(2.0);

  SUBCASE("monotone truncations on the half-line") {
    const auto line = half_line();
    const NodeFunction d0(line->measure(), {{"0", 1.0}});
    const auto levels = exhaustion_levels(*line, pme, 1.0, d0, 2, 20);
    REQUIRE(levels.size() == 19);
    for (std::size_t n = 1; n < levels.size(); ++n) {
      for (const auto& [id, value] : levels[n - 1].u.values()) CHECK(levels[n].u(id) >= value - 1e-12);
      if (n >= 2) CHECK(*levels[n].difference_l1 <= *levels[n - 1].difference_l1 + 1e-15);
    }
    const ResolventSolution s = solve_exhaustion(*line, pme, 1.0, d0);
    CHECK(s.monotone_certificate.value_or(false));
    CHECK(norm(s.u, Lp::one) <= 1.0 + 1e-8);
  }

  SUBCASE("finite lazy graph matches the finite solve") {
    std::mt19937_64 rng(89);
    suites::RandomGraphOptions o;
    o.connected = true;
    o.max_nodes = 15;
    const Graph g = suites::random_graph(rng, o);
    const auto lazy = std::make_shared<FiniteLazyGraph>(g, g.id(0));
    const NodeFunction data = suites::random_function(rng, g);
    const ResolventSolution a = solve_finite(g, pme, 0.7, data);
    const ResolventSolution b = solve_exhaustion(*lazy, pme, 0.7, data);
    CHECK(norm(a.u - b.u, Lp::one) <= 1e-9 * (1.0 + norm(data, Lp::one)));
  }

  SUBCASE("zero data") {
    const auto tree = binary_tree();
    const ResolventSolution s = solve_exhaustion(*tree, pme, 1.0, NodeFunction(tree->measure()));
    CHECK(s.u.is_zero());
    for (const LevelRecord& l : s.levels) CHECK(l.u.is_zero());
  }

  SUBCASE("refusal without hypotheses") {
    StarProfile bare;
    bare.mu_ratio = 0.5;
    bare.ratio = 0.9;
    const auto star = star_infinite(bare);
    const NodeFunction signed_data(star->measure(), {{"c", 1.0}, {"1", -1.0}});
    try {
      solve_exhaustion(*star, pme, 1.0, signed_data);
      FAIL("expected refusal");
    } catch (const HypothesisRefusal& e) {
      CHECK(std::string(e.what()) == "sign-changing data requires H1/H2/H3");
      CHECK(std::string(e.code()) == "hypothesis_refusal");
    }
    // sign-definite data is fine
    const auto plain = star_infinite();
    const NodeFunction pos(plain->measure(), {{"c", 1.0}, {"1", 1.0}});
    const ResolventSolution s = solve_exhaustion(*plain, pme, 1.0, pos);
    CHECK(s.u.nonnegative());
    CHECK(norm(s.u, Lp::one) <= norm(pos, Lp::one) + 1e-8);
  }

  SUBCASE("sign-changing data on a graph with a hypothesis") {
    const auto lattice = integer_lattice_1d();
    const NodeFunction data(lattice->measure(), {{"-2", -1.0}, {"3", 2.0}});
    const ResolventSolution s = solve_exhaustion(*lattice, pme, 1.0, data);
    CHECK(norm(s.u, Lp::one) <= 3.0 + 1e-8);
    CHECK(s.u("3") > 0.0);
    CHECK(s.u("-2") < 0.0);
  }
}
