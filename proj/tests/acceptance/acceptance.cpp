// Runs every acceptance criterion once and prints one PASS/FAIL line each.
#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "gpme/suites.hpp"

namespace {

struct Criterion {
  int id;
  const char* title;
  double limit_s;
  std::function<gpme::suites::SuiteReport()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gpme acceptance criteria"};
  std::uint64_t seed = 20240611;
  app.add_option("--seed", seed, "seed shared by the randomized criteria");
  CLI11_PARSE(app, argc, argv);

  namespace s = gpme::suites;
  const std::vector<Criterion> criteria{
      {1, "s|s|^3 counterexample bracket equals -13", 1e-3, [] { return s::example(1); }},
      {2, "l1 accretivity, 1000 random graphs", 10, [&] { return s::accretivity(seed, 1000); }},
      {3, "resolvent contractivity, 500 solves", 30, [&] { return s::contractivity(seed, 500); }},
      {4, "sign preservation and strict positivity, 200 graphs", 10, [&] { return s::positivity(seed, 200); }},
      {5, "comparison principle, 200 pairs", 10, [&] { return s::comparison(seed, 200); }},
      {6, "exhaustion monotonicity on the half-line, levels 2..20", 5, [] { return s::exhaustion(1); }},
      {7, "heat equation order against expm, 20 graphs", 30, [&] { return s::heat_order(seed, 20); }},
      {8, "mass conservation, 100 graphs", 30, [&] { return s::mass(seed, 100); }},
      {9, "l1 contraction between paired runs, 100 pairs", 60, [&] { return s::contraction(seed, 100); }},
      {10, "Dirichlet commutation, 200 subsets", 5, [&] { return s::commutation(seed, 200); }},
      {11, "bracket limit consistency, 200 pairs", 5, [&] { return s::bracket_limit(seed, 200); }},
  };

  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    const s::SuiteReport rep = c.run();
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = dt < c.limit_s;
    const bool ok = rep.ok() && in_time;
    failed += ok ? 0 : 1;
    std::printf("%s %2d. %s: %s [%.3g s, limit %g s%s]\n", ok ? "PASS" : "FAIL", c.id, c.title, rep.summary.c_str(), dt,
                c.limit_s, in_time ? "" : ", too slow");
    for (const std::string& f : rep.failures) std::printf("      %s\n", f.c_str());
  }
  std::printf("%d/%zu criteria passed (seed %llu)\n", static_cast<int>(criteria.size()) - failed, criteria.size(),
              static_cast<unsigned long long>(seed));
  return failed == 0 ? 0 : 1;
}
