#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "honest_forest/data.hpp"
#include "honest_forest/splitters.hpp"

using namespace honest_forest;

TEST_CASE("schedule values match the defining formulas") {
  CHECK(evaluate_schedule({ScheduleKind::PolyNodeSize, 0.6}, 1000) == 64);
  CHECK(evaluate_schedule({ScheduleKind::LogDepth, 0.1}, 1000) == 6);
  CHECK(evaluate_schedule({ScheduleKind::Log2PowerDepth, 2.0 / 3.0}, 4096) == 4);
  CHECK(evaluate_schedule({ScheduleKind::PolySubsample, 0.6}, 1000) == 64);
  CHECK(evaluate_schedule({ScheduleKind::SqrtLogNodeSize, 2.0}, 1000) ==
        static_cast<long>(std::ceil(std::sqrt(1000.0 * std::pow(std::log(1000.0), 2.0)))));

  CHECK_THROWS_AS(evaluate_schedule({ScheduleKind::PolyNodeSize, 1.2}, 1000), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_schedule({ScheduleKind::LogDepth, -0.1}, 1000), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_schedule({ScheduleKind::PolyNodeSize, 0.6}, 1), std::invalid_argument);
}

TEST_CASE("uniform splitting basics") {
  CHECK(grow_uniform(3, 0, 1).leaf_count() == 1);

  const Tree tree = grow_uniform(1, 1, 5);
  REQUIRE(tree.leaf_count() == 2);
  const double c = tree.leaves()[0].cell.upper[0];
  CHECK(c > 0.0);
  CHECK(c < 1.0);
  CHECK(tree.leaves()[0].cell.lower[0] == 0.0);
  CHECK(tree.leaves()[1].cell.lower[0] == c);
  CHECK(tree.leaves()[1].cell.upper[0] == 1.0);
}

TEST_CASE("non-adaptive growers depend only on theta") {
  const Tree a = grow_uniform(2, 5, 77);
  const Tree b = grow_uniform(2, 5, 77);
  CHECK(a == b);
  CHECK(!(a == grow_uniform(2, 5, 78)));

  const Tree c = grow_centered(2, {0.3, 0.7}, 6, 13);
  const Tree d = grow_centered(2, {0.3, 0.7}, 6, 13);
  CHECK(c == d);
}

TEST_CASE("centered leaves all have volume two to the minus depth") {
  const long depth = 6;
  const Tree tree = grow_centered(2, {0.25, 0.75}, depth, 21);
  REQUIRE(tree.leaf_count() == (1u << depth));
  const double expected = std::ldexp(1.0, -static_cast<int>(depth));
  for (const auto& leaf : tree.leaves()) {
    CHECK(leaf.cell.volume() == expected);
    CHECK(leaf.counts.total == depth);
  }
  CHECK(tree.min_leaf_volume() == expected);
}

TEST_CASE("centered per-coordinate split counts are binomial in the mean") {
  const long depth = 8;
  const double p0 = 1.0 / 3.0;
  const std::size_t trees = 30000;
  const std::vector<double> x{0.37, 0.81};
  double sum = 0.0, sumsq = 0.0;
  Rng seeds(404);
  for (std::size_t t = 0; t < trees; ++t) {
    const Tree tree = grow_centered(2, {p0, 1.0 - p0}, depth, seeds.next_u64());
    const double s1 = static_cast<double>(tree.leaf_of(x).counts.per_coordinate[0]);
    sum += s1;
    sumsq += s1 * s1;
  }
  const double mean = sum / static_cast<double>(trees);
  const double var = sumsq / static_cast<double>(trees) - mean * mean;
  const double expect_mean = depth * p0;
  const double expect_var = depth * p0 * (1.0 - p0);
  const double se_mean = std::sqrt(expect_var / static_cast<double>(trees));
  CHECK(std::abs(mean - expect_mean) <= 4.0 * se_mean);
  CHECK(var == doctest::Approx(expect_var).epsilon(0.1));
}

TEST_CASE("modified centered splitting enforces the rotation") {
  {
    const Tree tree = grow_modified_centered(2, {2, 2}, 4, 9);
    for (const auto& leaf : tree.leaves()) {
      CHECK(leaf.counts.per_coordinate == std::vector<long>{2, 2});
    }
  }
  {
    const Tree tree = grow_modified_centered(2, {3, 3}, 9, 10);
    for (const auto& leaf : tree.leaves()) {
      CHECK(leaf.counts.per_coordinate[0] >= 3);
      CHECK(leaf.counts.per_coordinate[1] >= 3);
    }
  }
  CHECK(grow_modified_centered(2, {2, 2}, 0, 1).leaf_count() == 1);

  // Guaranteed floor from the residue classes on every path.
  const std::vector<long> periods{2, 4};
  const Tree tree = grow_modified_centered(2, periods, 11, 44);
  for (const auto& leaf : tree.leaves()) {
    CHECK(leaf.counts.per_coordinate[0] >= 11 / periods[0]);
    CHECK(leaf.counts.per_coordinate[1] >= 11 / periods[1]);
  }
}

TEST_CASE("residue assignment feasibility") {
  CHECK(assign_rotation_residues({2, 2}) == std::vector<long>{0, 1});
  CHECK(assign_rotation_residues({3, 3, 3}) == std::vector<long>{0, 1, 2});
  CHECK_THROWS_AS(assign_rotation_residues({1, 2}), std::invalid_argument);  // load > 1
  CHECK_THROWS_AS(assign_rotation_residues({2, 3}), std::invalid_argument);  // gcd collision
  CHECK_THROWS_AS(grow_modified_centered(2, {1, 4}, 3, 1), std::invalid_argument);  // period < d
}

namespace {

Matrix uniform_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) m(i, j) = rng.uniform01();
  }
  return m;
}

}  // namespace

TEST_CASE("adaptive growth stop rule and preconditions") {
  const Matrix data = uniform_matrix(100, 2, 8);
  const std::vector<double> ones(100, 1.0);
  RegularAdaptiveConfig cfg;
  cfg.alpha = 0.3;
  cfg.feature_floor = {0.5, 0.5};

  // Root mass below 2 tau: single leaf.
  const AdaptiveGrowth root_only = grow_regular_adaptive(data, ones, cfg, 80, 100, 5);
  CHECK(root_only.tree.leaf_count() == 1);
  CHECK(root_only.leaf_mass == std::vector<double>{100.0});
  CHECK(root_only.stop_threshold == 80);

  // Root mass below tau: precondition failure.
  CHECK_THROWS_AS(grow_regular_adaptive(data, ones, cfg, 150, 100, 5), std::invalid_argument);
}

TEST_CASE("alpha one half gives median splits with counts differing by at most one") {
  const Matrix data = uniform_matrix(257, 1, 12);
  const std::vector<double> ones(257, 1.0);
  RegularAdaptiveConfig cfg;
  cfg.alpha = 0.5;
  cfg.feature_floor = {1.0};

  const AdaptiveGrowth growth = grow_regular_adaptive(data, ones, cfg, 16, 257, 3);
  CHECK(growth.split_count > 0);
  // Verify recursive halving: every internal node's children differ by <= 1
  // point, via the leaf masses and tree structure invariant that leaf
  // masses sum back up the tree. Directly check all leaf masses lie in
  // [tau, 2 tau - 1 + 1] and sibling balance via min_child_fraction.
  for (double mass : growth.leaf_mass) {
    CHECK(mass >= growth.stop_threshold);
  }
  // Min child fraction of a median split on M points is floor(M/2)/M >= (M-1)/(2M).
  CHECK(growth.min_child_fraction >= 0.5 - 1.0 / (2.0 * 16.0));
}

TEST_CASE("adaptive splits keep the alpha band exactly on unit weights") {
  const std::size_t n_j = 10000;
  const Matrix data = uniform_matrix(n_j, 2, 99);
  const std::vector<double> ones(n_j, 1.0);
  RegularAdaptiveConfig cfg;
  cfg.alpha = 0.3;
  cfg.feature_floor = {0.5, 0.5};

  const AdaptiveGrowth growth = grow_regular_adaptive(data, ones, cfg, 100, n_j, 7);
  CHECK(growth.split_count > 0);
  CHECK(growth.slack_splits == 0);
  CHECK(growth.degenerate_stops == 0);
  CHECK(growth.min_child_fraction >= 0.3);
  CHECK(growth.min_child_fraction <= 0.7);
  for (double mass : growth.leaf_mass) CHECK(mass >= growth.stop_threshold);

  // Determinism.
  const AdaptiveGrowth again = grow_regular_adaptive(data, ones, cfg, 100, n_j, 7);
  CHECK(growth.tree == again.tree);
  const AdaptiveGrowth other = grow_regular_adaptive(data, ones, cfg, 100, n_j, 8);
  CHECK(!(growth.tree == other.tree));
}

TEST_CASE("adaptive growth with lumpy weights keeps the tau floor") {
  const std::size_t n_j = 2000;
  const Matrix data = uniform_matrix(n_j, 2, 500);
  // Multinomial-like integer weights scaled to unit mean: many zeros.
  Rng rng(501);
  std::vector<double> weights(n_j, 0.0);
  for (int k = 0; k < 200; ++k) weights[rng.index(n_j)] += static_cast<double>(n_j) / 200.0;
  RegularAdaptiveConfig cfg;
  cfg.alpha = 0.3;
  cfg.feature_floor = {0.5, 0.5};

  const AdaptiveGrowth growth = grow_regular_adaptive(data, weights, cfg, 100, n_j, 77);
  for (double mass : growth.leaf_mass) {
    CHECK(mass >= static_cast<double>(growth.stop_threshold));
  }
  CHECK(growth.tree.leaf_count() == growth.leaf_mass.size());
}
