#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "gpme/error.hpp"
#include "gpme/expression.hpp"
#include "gpme/io.hpp"
#include "gpme/suites.hpp"

using namespace gpme;
using io::Json;

TEST_CASE("expressions") {
  CHECK(Expression::parse("1 + 2 * 3")(0.0) == 7.0);
  CHECK(Expression::parse("2 ^ 3 ^ 2")(0.0) == 512.0);
  CHECK(Expression::parse("-2 ^ 2")(0.0) == -4.0);
  CHECK(Expression::parse("(1 + s) / 2")(3.0) == 2.0);
  CHECK(Expression::parse("s * abs(s)")(-3.0) == -9.0);
  CHECK(Expression::parse("sgn(s) * abs(s) ^ 0.5")(-4.0) == -2.0);
  CHECK(Expression::parse("1.5e2")(0.0) == 150.0);
  CHECK(Expression::parse("0.5 ^ n", "n")(3.0) == 0.125);
  CHECK(Expression::parse("3").is_constant());
  CHECK_FALSE(Expression::parse("s - s").is_constant());
  for (const char* bad : {"", "1 +", "(1", "1)", "foo(s)", "x", "2 * * 3", "abs s", "1..2"}) {
    CHECK_THROWS_AS(Expression::parse(bad), ParseError);
  }
}

TEST_CASE("graph json") {
  const Json j = Json::parse(R"({"nodes":[{"id":"a","mu":2,"kappa":0.5},{"id":"b"}],"edges":[{"u":"a","v":"b","w":3}]})");
  const Graph g = io::graph_from_json(j);
  CHECK(g.size() == 2);
  CHECK(g.mu(0) == 2.0);
  CHECK(g.kappa(0) == 0.5);
  CHECK(g.mu(1) == 1.0);
  CHECK(g.kappa(1) == 0.0);
  CHECK(g.weight(0, 1) == 3.0);

  std::mt19937_64 rng(113);
  for (int t = 0; t < 20; ++t) {
    const Graph h = suites::random_graph(rng);
    const Graph back = io::graph_from_json(Json::parse(io::graph_to_json(h).dump()));
    CHECK(io::graph_to_json(back) == io::graph_to_json(h));
  }

  for (const char* bad : {R"({"nodes":[{"id":"a"}],"edges":[{"u":"a","v":"a","w":1}]})",
                          R"({"nodes":[{"id":"a"},{"id":"b"}],"edges":[{"u":"a","v":"b","w":1},{"u":"b","v":"a","w":1}]})",
                          R"({"nodes":[{"id":"a","mu":0}],"edges":[]})",
                          R"({"nodes":[{"id":"a","kappa":-1}],"edges":[]})",
                          R"({"nodes":[{"id":"a"}],"edges":[{"u":"a","v":"z","w":1}]})",
                          R"({"nodes":[{"mu":1}],"edges":[]})", R"({"edges":[]})", R"([1,2])"}) {
    CHECK_THROWS_AS(io::graph_from_json(Json::parse(bad)), ParseError);
  }
}

TEST_CASE("function formats") {
  const NodeFunction f(Measure{}, {{"a", 1.25}, {"b", -3.0}});
  CHECK(io::function_from_json(io::function_to_json(f)) == f);
  CHECK(io::function_from_csv(io::function_to_csv(f)) == f);
  CHECK(io::function_from_csv("node,value\na,1.25\nb,-3\n") == f);
  CHECK(io::function_from_csv("a,1.25\nb,-3") == f);
  CHECK_THROWS_AS(io::function_from_csv("a;1\n"), ParseError);
  CHECK_THROWS_AS(io::function_from_csv("a,zz\n"), ParseError);
  CHECK_THROWS_AS(io::function_from_json(Json::parse(R"({"a":"x"})")), ParseError);

  // values survive the text round trip bit for bit
  std::mt19937_64 rng(127);
  NodeFunction::Map m;
  for (int i = 0; i < 50; ++i) m[std::to_string(i)] = std::uniform_real_distribution<double>(-1e6, 1e6)(rng);
  const NodeFunction r(Measure{}, m);
  CHECK(io::function_from_csv(io::function_to_csv(r)).values() == r.values());
  CHECK(io::function_from_json(Json::parse(io::function_to_json(r).dump())).values() == r.values());

  const auto dir = std::filesystem::temp_directory_path() / "gpme_io_test";
  std::filesystem::create_directories(dir);
  io::write_text_file(dir / "f.csv", io::function_to_csv(f));
  io::write_text_file(dir / "f.json", io::function_to_json(f).dump());
  CHECK(io::load_function(dir / "f.csv") == f);
  CHECK(io::load_function(dir / "f.json") == f);
  CHECK_THROWS_AS(io::load_function(dir / "missing.json"), ParseError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("phi configuration") {
  const Nonlinearity p = io::parse_phi(R"({"family":"power_law","m":2})");
  CHECK(p.exponent() == 2.0);
  CHECK(p.phi(-3.0) == -9.0);

  const Nonlinearity c = io::parse_phi(
      R"j({"family":"custom","phi":"s + s*abs(s)","psi":"2*s / (1 + (1 + 4*abs(s))^0.5)","lipschitz":null})j");
  CHECK(c.regime() == Regime::custom);
  CHECK(c.psi(c.phi(1.7)) == doctest::Approx(1.7).epsilon(1e-13));

  const Nonlinearity lip = io::parse_phi(R"({"family":"custom","phi":"2*s","psi":"s/2","phi_prime":"2","lipschitz":2})");
  CHECK(lip.global_lipschitz() == 2.0);
  CHECK(lip.phi_prime(5.0) == 2.0);

  CHECK_THROWS_AS(io::parse_phi(R"({"family":"power_law","m":-1})"), ParseError);
  CHECK_THROWS_AS(io::parse_phi(R"({"family":"cubic"})"), ParseError);
  CHECK_THROWS_AS(io::parse_phi(R"({"family":"custom","phi":"s+1","psi":"s-1"})"), ParseError);
  CHECK_THROWS_AS(io::parse_phi("{not json"), ParseError);
}

TEST_CASE("families and forcings from json") {
  const auto line = io::family_from_json("half_line", Json::object());
  CHECK(line->name() == "half_line");
  const auto tree = io::family_from_json("binary_tree", Json::parse(R"({"w":"0.5^n","mu":"1"})"));
  CHECK(tree->weight("0", "1") == 0.5);
  const auto star = io::family_from_json("star_infinite", Json::parse(R"({"ratio":0.25})"));
  CHECK(star->weight("c", "2") == 0.0625);
  CHECK_THROWS_AS(io::family_from_json("moebius", Json::object()), ParseError);
  CHECK_THROWS_AS(io::family_from_json("star_infinite", Json::parse(R"({"ratio":2})")), ParseError);

  const Forcing z = io::forcing_from_json(Json::parse(R"({"kind":"zero"})"));
  CHECK(z.kind() == Forcing::Kind::zero);
  const Forcing c = io::forcing_from_json(Json::parse(R"({"kind":"constant","f":{"a":1}})"));
  CHECK(c(0.3)("a") == 1.0);
  const Forcing p = io::forcing_from_json(Json::parse(
      R"({"kind":"piecewise","pieces":[{"t_start":0,"t_end":0.4,"f":{"a":1}},{"t_start":0.4,"t_end":1,"f":{"a":2}}]})"));
  CHECK(p(0.4)("a") == 1.0);
  CHECK(p(0.41)("a") == 2.0);
  CHECK_THROWS_AS(io::forcing_from_json(Json::parse(R"({"kind":"sampled"})")), ParseError);
}
