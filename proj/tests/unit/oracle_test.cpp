#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "gpme/laplacian.hpp"
#include "gpme/oracle.hpp"
#include "gpme/suites.hpp"
#include "helpers.hpp"

using namespace gpme;

TEST_CASE("dense assembly") {
  const oracle::DenseOperator p2 = oracle::assemble_dense(testing::path(2));
  Eigen::MatrixXd expected(2, 2);
  expected << 1, -1, -1, 1;
  CHECK(p2.matrix == expected);

  const oracle::DenseOperator one = oracle::assemble_dense(GraphBuilder().add_node("a", 0.5, 2.0).build());
  CHECK(one.matrix.rows() == 1);
  CHECK(one.matrix(0, 0) == 4.0);

  // columns reproduce Delta applied to indicator functions
  std::mt19937_64 rng(107);
  for (int t = 0; t < 20; ++t) {
    const Graph g = suites::random_graph(rng);
    const oracle::DenseOperator M = oracle::assemble_dense(g);
    const LaplacianContext ctx(g);
    for (NodeIndex j = 0; j < g.size(); ++j) {
      std::vector<double> e(g.size(), 0.0);
      e[j] = 1.0;
      const auto col = ctx.apply(e);
      for (NodeIndex i = 0; i < g.size(); ++i) CHECK(std::fabs(col[i] - M.matrix(i, j)) <= 1e-12 * (1 + std::fabs(col[i])));
    }
  }
}

TEST_CASE("matrix exponential") {
  const Graph single = GraphBuilder().add_node("a", 1.0, 2.0).build();
  const NodeFunction u0(Measure{}, {{"a", 1.0}});
  CHECK(oracle::expm_apply(oracle::assemble_dense(single), 1.0, u0)("a") ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-14));

  const oracle::DenseOperator p3 = oracle::assemble_dense(testing::path(3));
  const NodeFunction spike(Measure{}, {{"x0", 3.0}});
  CHECK(oracle::expm_apply(p3, 0.0, spike) == spike);
  const NodeFunction late = oracle::expm_apply(p3, 60.0, spike);
  for (const char* id : {"x0", "x1", "x2"}) CHECK(late(id) == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937_64 rng(109);
  for (int t = 0; t < 20; ++t) {
    const Graph g = suites::random_graph(rng);
    const oracle::DenseOperator M = oracle::assemble_dense(g);
    const NodeFunction f = suites::random_function(rng, g);
    const NodeFunction twice = oracle::expm_apply(M, 0.3, oracle::expm_apply(M, 0.2, f));
    const NodeFunction once = oracle::expm_apply(M, 0.5, f);
    CHECK(norm(twice - once, Lp::one) <= 1e-10 * (1 + norm(f, Lp::one)));

    // independent route: Pade scaling-and-squaring on the raw matrix
    const Eigen::MatrixXd E = (-0.5 * M.matrix).exp();
    Eigen::VectorXd x(static_cast<Eigen::Index>(g.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = f(M.nodes[i]);
    const Eigen::VectorXd y = E * x;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      CHECK(std::fabs(y[i] - once(M.nodes[i])) <= 1e-9 * (1 + x.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("brute scalar resolvent") {
  const Nonlinearity pme = Nonlinearity::power_law(2.0);
  CHECK(oracle::brute_resolvent_1d(1.0, 1.0, pme, 1.0, 6.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(oracle::brute_resolvent_1d(1.0, 1.0, pme, 1.0, 0.0) == 0.0);
  CHECK(oracle::brute_resolvent_1d(0.0, 1.0, pme, 1.0, -4.5) == -4.5);
  CHECK(oracle::brute_resolvent_1d(2.0, 0.5, Nonlinearity::power_law(1.0), 0.5, 3.0) == doctest::Approx(1.0));
}

TEST_CASE("bracket by limit") {
  const NodeFunction k(Measure{}, {{"a", 2.0}, {"b", 0.5}});
  const NodeFunction z(Measure{}, {{"a", -1.0}, {"b", 4.0}, {"c", 1.0}});
  const auto seq = oracle::bracket_by_limit(z, k, {1e-2, 1e-4, 1e-6});
  REQUIRE(seq.size() == 3);
  // closed form: 2.5 * (-1 + 4 + 1) = 10, reached once lambda z no longer flips any sign
  for (double v : seq) CHECK(v == doctest::Approx(10.0).epsilon(1e-8));
}
