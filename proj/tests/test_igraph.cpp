#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "trigroup/experiments.hpp"
#include "trigroup/igraph.hpp"

using namespace trigroup;

namespace {

SplitSample split_with_r1(std::uint32_t n, std::vector<std::string> words) {
  SplitSample s;
  s.partition = make_partition(n);
  s.p = 0.01;
  for (auto& w : words) s.r1.push_back(parse_word(w));
  return s;
}

double edge_density(const IntersectionGraph& g) {
  const double pairs = 0.5 * g.vertex_count * (g.vertex_count - 1.0);
  return double(edges(g).size()) / pairs;
}

}  // namespace

TEST_CASE("sample_rig extremes") {
  Rng rng(1);
  const auto empty = sample_rig(20, 100, 0.0, rng);
  CHECK(edges(empty).empty());
  CHECK(components(empty).sizes.size() == 20);

  const auto full = sample_rig(20, 5, 1.0, rng);
  for (const auto& f : full.features) CHECK(f.size() == 5);
  CHECK(edges(full).size() == 190);
  CHECK(components(full).largest_size() == 20);
  CHECK_THROWS_AS(sample_rig(5, 5, -0.1, rng), std::invalid_argument);
}

TEST_CASE("sample_rig edge density matches the closed form") {
  const std::uint32_t n = 500;
  const std::uint64_t m = 10000;
  const double rho = 0.002;
  const double expected = edge_probability(rho, m);
  std::vector<double> densities;
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng(s);
    densities.push_back(edge_density(sample_rig(n, m, rho, rng)));
  }
  const double mean = std::accumulate(densities.begin(), densities.end(), 0.0) / 50;
  double var = 0.0;
  for (double d : densities) var += (d - mean) * (d - mean);
  var /= 49;
  CHECK(std::abs(mean - expected) <= 3 * std::sqrt(var / 50));
}

TEST_CASE("derive_rig follows the feature assignment rule") {
  SUBCASE("single relation") {
    const auto d = derive_rig(split_with_r1(8, {"x0 x5 x6"}));
    CHECK(d.graph.vertex_count == 8);
    CHECK(d.graph.feature_count == 56);  // n(n-1) for even n
    CHECK(d.vertex_letter[0] == Letter(0, false));
    CHECK(d.graph.features[0].size() == 1);
    CHECK(edges(d.graph).empty());
  }
  SUBCASE("empty stage one") {
    const auto d = derive_rig(split_with_r1(8, {}));
    CHECK(edges(d.graph).empty());
    CHECK(components(d.graph).largest_size() == 1);
  }
  SUBCASE("shared feature gives an edge") {
    const auto d = derive_rig(split_with_r1(8, {"x0 x5 x6", "x1 x5 x6"}));
    const auto e = edges(d.graph);
    REQUIRE(e.size() == 1);
    CHECK(d.vertex_letter[e[0].first] == Letter(0, false));
    CHECK(d.vertex_letter[e[0].second] == Letter(1, false));
  }
  SUBCASE("the three rotations carry the same feature") {
    const auto d = derive_rig(split_with_r1(8, {"x0 x5 x6", "x5 x6 X1", "x6 X2 x5"}));
    CHECK(components(d.graph).largest_size() == 3);
  }
  SUBCASE("ordered pairs: cd and dc are different features") {
    const auto d = derive_rig(split_with_r1(8, {"x0 x5 x6", "x1 x6 x5"}));
    CHECK(edges(d.graph).empty());
  }
  SUBCASE("odd n uses the exact S2 alphabet") {
    const auto d = derive_rig(split_with_r1(7, {}));
    CHECK(d.graph.vertex_count == 8);
    CHECK(d.graph.feature_count == 30);
  }
  SUBCASE("rejects stage-two words") {
    CHECK_THROWS_AS(derive_rig(split_with_r1(8, {"x0 x1 x5"})), std::invalid_argument);
  }
  SUBCASE("reports rho and beta with their lower bounds") {
    auto s = split_with_r1(10, {});
    const auto d = derive_rig(s);
    CHECK(d.rho == doctest::Approx(1 - std::pow(0.99, 3)));
    CHECK(d.rho >= d.rho_lower);
    CHECK(d.beta >= d.beta_lower);
    CHECK(d.beta_lower == doctest::Approx(0.0001 * 100 * 9));
  }
}

TEST_CASE("components agree with a breadth-first search oracle") {
  Rng rng(42);
  std::uniform_int_distribution<std::uint32_t> size(1, 50);
  std::uniform_int_distribution<std::uint64_t> features(1, 200);
  std::uniform_real_distribution<double> prob(0.0, 0.05);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = sample_rig(size(rng), features(rng), prob(rng), rng);
    const auto summary = components(g);
    REQUIRE(oracle::canonical_labels(summary.component_of) == oracle::bfs_components(g));
    REQUIRE(std::accumulate(summary.sizes.begin(), summary.sizes.end(), 0u) == g.vertex_count);
    for (auto s : summary.sizes) REQUIRE(s <= summary.largest_size());
  }
}

TEST_CASE("largest component ties go to the smallest component id") {
  IntersectionGraph g{6, 3, {{0}, {0}, {1}, {1}, {}, {2}}};
  const auto s = components(g);
  CHECK(s.sizes == std::vector<std::uint32_t>{2, 2, 1, 1});
  CHECK(s.largest_id == 0);
  CHECK(s.largest_members == std::vector<std::uint32_t>{0, 1});
}

TEST_CASE("edge list export") {
  IntersectionGraph g{4, 3, {{0, 1}, {1}, {0}, {2}}};
  std::ostringstream out;
  write_edge_list(out, g);
  CHECK(out.str() == "0 1\n0 2\n");
}

TEST_CASE("edge_probability") {
  CHECK(edge_probability(1.0, 1) == 1.0);
  CHECK(edge_probability(0.0, 1000) == 0.0);
  CHECK(edge_probability(0.01, 100) == doctest::Approx(0.009950661308628095).epsilon(1e-12));
  // Tiny rho^2 m stays accurate.
  CHECK(edge_probability(1e-9, 1000) == doctest::Approx(1e-15).epsilon(1e-9));
}

TEST_CASE("gamma_solve") {
  CHECK(gamma_solve(0.5) == 1.0);
  CHECK(gamma_solve(1.0) == 1.0);
  const double g = gamma_solve(1.42);
  CHECK(g == doctest::Approx(0.47346151309035955).epsilon(1e-9));
  CHECK(giant_fraction(1.42) >= 0.52);
  CHECK(gamma_solve(100.0) < 1e-40);
  CHECK(gamma_solve(4.0) == doctest::Approx(0.019827401281778415).epsilon(1e-9));

  for (double beta = 1.01; beta <= 50.0; beta += 0.37) {
    const double x = gamma_solve(beta);
    REQUIRE(x > 0.0);
    REQUIRE(x < 1.0);
    REQUIRE(std::abs(x - std::exp(beta * (x - 1.0))) <= 1e-10);
  }
  CHECK(std::abs(gamma_solve(1.0 + 1e-9) - 1.0) < 1e-6);
  CHECK_THROWS_AS(gamma_solve(-1.0), std::invalid_argument);
}

TEST_CASE("giant_fraction is nondecreasing in beta") {
  CHECK(giant_fraction(0.9) == 0.0);
  const double grid[] = {1.1, 1.42, 2.0, 4.0};
  for (std::size_t i = 1; i < 4; ++i) CHECK(giant_fraction(grid[i]) >= giant_fraction(grid[i - 1]));
  CHECK(giant_fraction(1.42) == doctest::Approx(0.5265).epsilon(1e-3));
}

TEST_CASE("coupled sampling is monotone in rho") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::uint32_t last = 0;
    const std::uint32_t n = 150;
    const std::uint64_t m = 400;
    for (double beta : {0.2, 0.6, 1.0, 1.4, 2.0, 3.0}) {
      const double rho = std::sqrt(beta / (double(n) * m));
      const auto g = sample_rig_coupled(n, m, rho, seed);
      const auto largest = components(g).largest_size();
      REQUIRE(largest >= last);
      last = largest;
    }
  }
}

TEST_CASE("giant component appears above beta = 1") {
  const std::uint32_t n = 2000;
  const std::uint64_t m = static_cast<std::uint64_t>(std::ceil(std::pow(n, 1.5)));
  for (std::uint64_t s = 0; s < 3; ++s) {
    Rng rng(s);
    const auto sub = sample_rig(n, m, std::sqrt(0.5 / (double(n) * m)), rng);
    CHECK(components(sub).largest_size() < 0.05 * n);
    const auto super = sample_rig(n, m, std::sqrt(4.0 / (double(n) * m)), rng);
    CHECK(components(super).largest_size() > 0.9 * n);
  }
}

TEST_CASE("finite-n giant fraction follows the clustered branching process") {
  // Each vertex holds Poisson(rho m) features and each feature reaches
  // Poisson(rho (n-1)) other vertices, so survival solves
  // s = 1 - exp(-lam (1 - exp(-mu s))). Solved here by plain bisection.
  const std::uint32_t n = 3000;
  const GiantTable t = giant_experiment(n, 1.5, 1.42, 30, 1);
  const double lam = t.rho * double(t.m), mu = t.rho * (n - 1.0);
  double lo = 1e-9, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid < 1 - std::exp(-lam * (1 - std::exp(-mu * mid))) ? lo : hi) = mid;
  }
  CHECK(lo == doctest::Approx(0.4829107901568228).epsilon(1e-6));
  double var = 0.0;
  for (const auto& r : t.rows) var += (r.fraction - t.mean_fraction()) * (r.fraction - t.mean_fraction());
  const double se = std::sqrt(var / 29 / 30);
  CHECK(std::abs(t.mean_fraction() - lo) <= 3 * se);
  // The Poisson-limit fraction sits well above both.
  CHECK(giant_fraction(1.42) - lo > 0.04);
}
