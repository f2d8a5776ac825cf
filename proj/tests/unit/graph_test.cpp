#include <algorithm>
#include <random>

#include "doctest.h"
#include "gpme/error.hpp"
#include "gpme/families.hpp"
#include "gpme/graph.hpp"
#include "gpme/lazy_graph.hpp"
#include "helpers.hpp"

using namespace gpme;

TEST_CASE("degree") {
  {
    const Graph g = GraphBuilder().add_node("a").build();
    CHECK(degree(g, "a").deg == 0.0);
    CHECK(degree(g, "a").Deg == 0.0);
  }
  {
    const Graph g = GraphBuilder().add_node("a", 0.5, 2.0).build();
    CHECK(degree(g, "a").deg == 2.0);
    CHECK(degree(g, "a").Deg == 4.0);
  }
  const Graph g = GraphBuilder().add_node("a").add_node("b").add_node("c").add_edge("a", "b", 1).add_edge("b", "c", 1).build();
  CHECK(degree(g, "b").deg == 2.0);
  CHECK(degree(g, "b").Deg == 2.0);
  CHECK_THROWS_AS(degree(g, "zz"), UnknownNode);
}

TEST_CASE("builder rejects malformed graphs") {
  GraphBuilder b;
  b.add_node("a").add_node("b");
  CHECK_THROWS_AS(b.add_edge("a", "a", 1.0), InvalidArgument);
  b.add_edge("a", "b", 1.0);
  CHECK_THROWS_AS(b.add_edge("b", "a", 2.0), InvalidArgument);
  CHECK_THROWS_AS(b.add_edge("a", "c", 1.0), UnknownNode);
  CHECK_THROWS_AS(GraphBuilder().add_node("a", 0.0), InvalidArgument);
  CHECK_THROWS_AS(GraphBuilder().add_node("a", 1.0, -1.0), InvalidArgument);
  CHECK_THROWS_AS(GraphBuilder().add_node("a").add_node("b").add_edge("a", "b", -1.0), InvalidArgument);
  CHECK_THROWS_AS(GraphBuilder().add_node("a").add_node("a"), InvalidArgument);
}

TEST_CASE("weights are symmetric and zero weights are dropped") {
  const Graph g = GraphBuilder().add_node("a").add_node("b").add_node("c").add_edge("a", "b", 2.5).add_edge("b", "c", 0.0).build();
  CHECK(g.weight(0, 1) == 2.5);
  CHECK(g.weight(1, 0) == 2.5);
  CHECK(g.weight(1, 2) == 0.0);
  CHECK(g.edges().size() == 1);
  CHECK(g.neighbors(2).empty());
}

TEST_CASE("connected components") {
  const Graph k3 = GraphBuilder().add_node("a").add_node("b").add_node("c").add_edge("a", "b", 1).add_edge("b", "c", 1).add_edge("a", "c", 1).build();
  CHECK(connected_components(k3).size() == 1);
  CHECK(connected_components(k3)[0].size() == 3);

  const Graph two = GraphBuilder().add_node("a").add_node("b").add_node("c").add_node("d").add_edge("a", "b", 1).add_edge("c", "d", 1).build();
  const auto blocks = connected_components(two);
  REQUIRE(blocks.size() == 2);
  CHECK(blocks[0] == std::vector<NodeIndex>{0, 1});
  CHECK(blocks[1] == std::vector<NodeIndex>{2, 3});

  CHECK(connected_components(testing::ten_node_graph()).size() == 1);
}

TEST_CASE("components partition the node set") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    GraphBuilder b;
    const int n = 1 + static_cast<int>(rng() % 25);
    for (int i = 0; i < n; ++i) b.add_node(std::to_string(i));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng() % 10 == 0) b.add_edge(std::to_string(i), std::to_string(j), 1.0);
    const Graph g = b.build();
    std::vector<int> block_of(n, -1);
    const auto blocks = connected_components(g);
    for (std::size_t k = 0; k < blocks.size(); ++k)
      for (NodeIndex x : blocks[k]) {
        CHECK(block_of[x] == -1);
        block_of[x] = static_cast<int>(k);
      }
    CHECK(std::count(block_of.begin(), block_of.end(), -1) == 0);
    for (const Edge& e : g.edges()) CHECK(block_of[e.u] == block_of[e.v]);
  }
}

TEST_CASE("dirichlet restriction") {
  const Graph p3 = testing::path(3);
  SUBCASE("whole node set") {
    const std::vector<std::string> all{"x0", "x1", "x2"};
    const DirichletSubgraph d = dirichlet_restrict(p3, all);
    for (NodeIndex i = 0; i < 3; ++i) {
      CHECK(d.b_dir[i] == 0.0);
      CHECK(d.kappa_dir(i) == p3.kappa(i));
    }
  }
  SUBCASE("one crossing edge") {
    const std::vector<std::string> a{"x0", "x1"};
    const DirichletSubgraph d = dirichlet_restrict(p3, a);
    CHECK(d.b_dir == std::vector<double>{0.0, 1.0});
    CHECK(d.kappa_dir(0) == 0.0);
    CHECK(d.kappa_dir(1) == 1.0);
    CHECK(d.interior == std::vector<bool>{true, false});
  }
  SUBCASE("a whole component") {
    const Graph two = GraphBuilder().add_node("a").add_node("b").add_node("c").add_edge("a", "b", 3).build();
    const std::vector<std::string> a{"a", "b"};
    const DirichletSubgraph d = dirichlet_restrict(two, a);
    CHECK(d.b_dir == std::vector<double>{0.0, 0.0});
  }
  SUBCASE("ten-node graph") {
    const Graph g = testing::ten_node_graph();
    const std::vector<std::string> a{"x4", "x5", "x6", "x7", "x8", "x9"};
    const DirichletSubgraph d = dirichlet_restrict(g, a);
    CHECK(d.b_dir == std::vector<double>{2.0, 0.0, 0.0, 1.0, 0.0, 1.0});
    CHECK(d.interior == std::vector<bool>{false, true, true, false, true, false});
  }
  const std::vector<std::string> none;
  CHECK_THROWS_AS(dirichlet_restrict(p3, none), InvalidArgument);
  const std::vector<std::string> twice{"x0", "x0"};
  CHECK_THROWS_AS(dirichlet_restrict(p3, twice), InvalidArgument);
}

TEST_CASE("b_dir equals the weight leaving A on random graphs") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    GraphBuilder b;
    const int n = 2 + static_cast<int>(rng() % 20);
    for (int i = 0; i < n; ++i) b.add_node(std::to_string(i), 1.0, (rng() % 3) * 0.25);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng() % 4 == 0) b.add_edge(std::to_string(i), std::to_string(j), 0.1 + (rng() % 100) / 10.0);
    const Graph g = b.build();
    std::vector<std::string> a;
    for (int i = 0; i < n; ++i)
      if (rng() % 2) a.push_back(std::to_string(i));
    if (a.empty()) a.push_back("0");
    const DirichletSubgraph d = dirichlet_restrict(g, a);
    for (NodeIndex i = 0; i < a.size(); ++i) {
      const NodeIndex x = g.index(a[i]);
      double out = 0.0;
      for (const Adjacent& y : g.neighbors(x))
        if (std::find(a.begin(), a.end(), g.id(y.node)) == a.end()) out += y.weight;
      CHECK(d.kappa_dir(i) - g.kappa(x) == doctest::Approx(out).epsilon(1e-14));
    }
  }
}

TEST_CASE("exhaustion by balls on the half-line") {
  const auto line = half_line();
  const auto sets = exhaustion(*line, 5);
  REQUIRE(sets.size() == 5);
  for (std::size_t k = 0; k < sets.size(); ++k) {
    std::vector<std::string> expected;
    for (std::size_t i = 0; i <= k; ++i) expected.push_back(std::to_string(i));
    CHECK(sets[k] == expected);
  }
}

TEST_CASE("exhaustion of a finite lazy graph stabilizes") {
  const auto lazy = std::make_shared<FiniteLazyGraph>(testing::path(4), "x0");
  Exhauster ex(*lazy);
  CHECK(ex.scheme() == ExhaustionScheme::balls);
  CHECK(ex.advance());
  CHECK(ex.advance());
  CHECK(ex.advance());
  CHECK(ex.nodes().size() == 4);
  CHECK_FALSE(ex.advance());
}

TEST_CASE("forward-neighbour exhaustion of the infinite star") {
  const auto star = star_infinite();
  CHECK_FALSE(star->locally_finite());
  Exhauster ex(*star);
  CHECK(ex.scheme() == ExhaustionScheme::forward_neighbors);
  CHECK(ex.nodes() == std::vector<std::string>{"c"});
  for (int k = 1; k <= 6; ++k) {
    REQUIRE(ex.advance());
    CHECK(ex.nodes().size() == static_cast<std::size_t>(k + 1));
    CHECK(ex.nodes().back() == std::to_string(k));
    CHECK(ex.nodes().size() <= (std::size_t{1} << ex.level()));
  }
}

TEST_CASE("exhaustion telescoping of the Dirichlet killing term") {
  ChainProfile p;
  p.w = Expression::parse("1 + n/3", "n");
  p.kappa = Expression::parse("0.1", "n");
  const std::vector<std::shared_ptr<const LazyGraph>> graphs{half_line(p), integer_lattice_1d(p), binary_tree(p),
                                                             star_infinite()};
  for (const auto& g : graphs) {
    Exhauster ex(*g);
    for (int level = 0; level < 6; ++level) {
      const std::vector<std::string> small = ex.nodes();
      ex.advance();
      const std::vector<std::string> big = ex.nodes();
      const DirichletSubgraph ds = dirichlet_restrict(*g, small);
      const DirichletSubgraph db = dirichlet_restrict(*g, big);
      for (NodeIndex i = 0; i < small.size(); ++i) {
        double added = 0.0;
        for (std::size_t j = small.size(); j < big.size(); ++j) added += g->weight(small[i], big[j]);
        const NodeIndex ib = db.graph.index(small[i]);
        CHECK(ds.kappa_dir(i) == doctest::Approx(db.kappa_dir(ib) + added).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("exhaustion eventually covers random-walk targets") {
  std::mt19937_64 rng(3);
  const auto tree = binary_tree();
  const auto lattice = integer_lattice_1d();
  for (const auto& g : {tree, lattice}) {
    for (int walk = 0; walk < 20; ++walk) {
      std::string x = g->root();
      for (int s = 0; s < 6; ++s) {
        const auto nb = g->neighbors(x);
        x = nb[rng() % nb.size()].id;
      }
      Exhauster ex(*g);
      bool found = false;
      for (int level = 0; level < 10 && !found; ++level) {
        found = std::find(ex.nodes().begin(), ex.nodes().end(), x) != ex.nodes().end();
        ex.advance();
      }
      CHECK(found);
    }
  }
}

TEST_CASE("family neighbour lists are symmetric") {
  for (const auto& g : {half_line(), integer_lattice_1d(), binary_tree(), star_infinite()}) {
    const auto sets = exhaustion(*g, 6);
    CHECK_FALSE(find_asymmetry(*g, sets.back()).has_value());
  }
}
