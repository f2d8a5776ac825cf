#include <cmath>
#include <random>

#include "doctest.h"
#include "gpme/error.hpp"
#include "gpme/families.hpp"
#include "gpme/laplacian.hpp"
#include "gpme/suites.hpp"
#include "helpers.hpp"

using namespace gpme;

TEST_CASE("apply") {
  const LaplacianContext p3(testing::path(3));
  const NodeFunction c(Measure{}, {{"x0", 4.0}, {"x1", 4.0}, {"x2", 4.0}});
  CHECK(apply(p3, c).is_zero());

  const LaplacianContext single(GraphBuilder().add_node("a", 0.5, 2.0).build());
  CHECK(apply(single, NodeFunction(Measure{}, {{"a", 3.0}}), "a") == 12.0);

  const LaplacianContext p2(testing::path(2));
  const NodeFunction v(Measure{}, {{"x0", 1.0}});
  CHECK(apply(p2, v) == NodeFunction(Measure{}, {{"x0", 1.0}, {"x1", -1.0}}));
}

TEST_CASE("apply_L") {
  const LaplacianContext p4(testing::path(4));
  const Nonlinearity quartic = Nonlinearity::power_law(4.0);
  CHECK(apply_L(p4, quartic, NodeFunction{}).is_zero());

  const NodeFunction u(Measure{}, {{"x0", 3.0}, {"x1", 4.0}});
  const NodeFunction v(Measure{}, {{"x1", 3.0}});
  const NodeFunction z = apply_L(p4, quartic, u) - apply_L(p4, quartic, v);
  CHECK(z == NodeFunction(Measure{}, {{"x0", -94.0}, {"x1", 269.0}, {"x2", -175.0}}));
  CHECK(bracket_plus(z, u - v, Lp::two) == -13.0);
  // the l1 bracket of the same data is not negative
  CHECK(bracket_plus(z, u - v, Lp::one) >= 0.0);

  std::mt19937_64 rng(41);
  for (int t = 0; t < 20; ++t) {
    const Graph g = suites::random_graph(rng);
    const LaplacianContext ctx(g);
    const NodeFunction f = suites::random_function(rng, g);
    CHECK(apply_L(ctx, Nonlinearity::power_law(1.0), f) == apply(ctx, f));
  }
}

TEST_CASE("apply on lazy graphs") {
  const auto line = half_line();
  const NodeFunction d0(line->measure(), {{"0", 1.0}});
  CHECK(apply(*line, d0, "0") == 1.0);
  CHECK(apply(*line, d0, "1") == -1.0);
  CHECK(apply_L(*line, Nonlinearity::power_law(2.0), NodeFunction(line->measure(), {{"2", 2.0}})) ==
        NodeFunction(Measure{}, {{"1", -4.0}, {"2", 8.0}, {"3", -4.0}}));

  const auto star = star_infinite();
  CHECK_THROWS_AS(apply_L(*star, Nonlinearity::power_law(1.0), NodeFunction(star->measure(), {{"c", 1.0}})),
                  TruncationError);
  // a leaf only sees the centre
  const NodeFunction leaf(star->measure(), {{"3", 1.0}});
  CHECK(apply_L(*star, Nonlinearity::power_law(1.0), leaf) ==
        NodeFunction(Measure{}, {{"3", 0.125}, {"c", -0.125}}));
}

TEST_CASE("green mass rate") {
  std::mt19937_64 rng(43);
  suites::RandomGraphOptions no_kappa;
  no_kappa.kappa_probability = 0.0;
  const Graph g = suites::random_graph(rng, no_kappa);
  CHECK(std::fabs(green_mass_rate(LaplacianContext(g), suites::random_function(rng, g))) <= 1e-12);

  const LaplacianContext single(GraphBuilder().add_node("a", 1.0, 2.0).build());
  CHECK(green_mass_rate(single, NodeFunction(Measure{}, {{"a", 3.0}})) == 6.0);

  const Graph p3 = GraphBuilder()
                       .add_node("x0", 1.0, 1.0)
                       .add_node("x1")
                       .add_node("x2")
                       .add_edge("x0", "x1", 1)
                       .add_edge("x1", "x2", 1)
                       .build();
  CHECK(green_mass_rate(LaplacianContext(p3), NodeFunction(Measure{}, {{"x0", 2.0}, {"x1", 5.0}, {"x2", -1.0}})) ==
        doctest::Approx(2.0).epsilon(1e-15));

  for (int t = 0; t < 100; ++t) {
    const Graph h = suites::random_graph(rng);
    const NodeFunction v = suites::random_function(rng, h);
    double expected = 0.0;
    double scale = 0.0;
    for (NodeIndex i = 0; i < h.size(); ++i) {
      expected += h.kappa(i) * v(h.id(i));
      scale += std::fabs(h.kappa(i) * v(h.id(i)));
      for (const Adjacent& a : h.neighbors(i)) scale += a.weight * (std::fabs(v(h.id(i))) + std::fabs(v(h.id(a.node))));
    }
    CHECK(std::fabs(green_mass_rate(LaplacianContext(h), v) - expected) <= 1e-12 * std::max(1.0, scale));
  }
}

TEST_CASE("dirichlet commutation") {
  const Graph p3 = testing::path(3);
  const std::vector<std::string> all{"x0", "x1", "x2"};
  const std::vector<std::string> a{"x0", "x1"};
  CHECK(dirichlet_commutation_check(p3, all, NodeFunction(Measure{}, {{"x0", 1.0}, {"x2", -2.0}})) == 0.0);
  CHECK(dirichlet_commutation_check(p3, a, NodeFunction(Measure{}, {{"x0", 1.0}, {"x1", 1.0}})) == 0.0);
  CHECK(dirichlet_commutation_check(p3, a, NodeFunction{}) == 0.0);
  CHECK_THROWS_AS(dirichlet_commutation_check(p3, a, NodeFunction(Measure{}, {{"x2", 1.0}})), InvalidArgument);

  std::mt19937_64 rng(47);
  for (int t = 0; t < 100; ++t) {
    const Graph g = suites::random_graph(rng);
    std::vector<std::string> subset;
    for (const auto& id : g.ids())
      if (rng() % 2) subset.push_back(id);
    if (subset.empty()) subset.push_back(g.id(0));
    NodeFunction::Map values;
    for (const auto& id : subset) values[id] = std::uniform_real_distribution<double>(-3, 3)(rng);
    CHECK(dirichlet_commutation_check(g, subset, NodeFunction(g.measure(), values)) <= 1e-12);
  }
}

TEST_CASE("accretivity and sign pairing") {
  const LaplacianContext p4(testing::path(4));
  const Nonlinearity pme = Nonlinearity::power_law(2.0);
  const NodeFunction u(Measure{}, {{"x0", 3.0}, {"x1", -1.0}});
  CHECK(accretivity_residual(p4, pme, u, u, 1.0) == 0.0);

  std::mt19937_64 rng(53);
  for (int t = 0; t < 200; ++t) {
    const Graph g = suites::random_graph(rng);
    const LaplacianContext ctx(g);
    const NodeFunction a = suites::random_function(rng, g);
    const NodeFunction b = suites::random_function(rng, g);
    const double gap = norm(a - b, Lp::one);
    for (double lambda : {1e-3, 1.0, 1e3}) {
      const double r = accretivity_residual(ctx, pme, a, b, lambda);
      CHECK(r >= -1e-10 * (1.0 + gap));
    }
    CHECK(sign_pairing(ctx, pme, a, b) >= -1e-10);
    // linear Delta is accretive in l2
    const NodeFunction d = apply(ctx, a);
    CHECK(bracket_plus(d, a, Lp::two) >= -1e-10);
  }
}
