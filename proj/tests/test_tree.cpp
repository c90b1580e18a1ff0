#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "honest_forest/splitters.hpp"
#include "honest_forest/tree.hpp"

using namespace honest_forest;

namespace {

// Depth-3 tree on [0,1]^2 whose path for x = (0.9, 0.1) splits features
// (0, 1, 0); off-path subtrees are closed immediately.
Tree hand_tree() {
  Tree tree = Tree::empty(2);
  const int root = tree.add_internal(0, 0.5);
  const int left_leaf = tree.add_leaf(AxisRectangle{{0.0, 0.0}, {0.5, 1.0}}, SplitCounts{1, {1, 0}});
  const int right = tree.add_internal(1, 0.5);
  const int rl = tree.add_internal(0, 0.75);
  const int rll = tree.add_leaf(AxisRectangle{{0.5, 0.0}, {0.75, 0.5}}, SplitCounts{3, {2, 1}});
  const int rlr = tree.add_leaf(AxisRectangle{{0.75, 0.0}, {1.0, 0.5}}, SplitCounts{3, {2, 1}});
  const int rr = tree.add_leaf(AxisRectangle{{0.5, 0.5}, {1.0, 1.0}}, SplitCounts{2, {1, 1}});
  tree.set_children(root, left_leaf, right);
  tree.set_children(right, rl, rr);
  tree.set_children(rl, rll, rlr);
  return tree;
}

}  // namespace

TEST_CASE("root-only tree maps every point to the unit cell") {
  const Tree tree = Tree::single_leaf(3);
  const auto& leaf = tree.leaf_of({0.2, 0.9, 0.0});
  CHECK(leaf.cell.volume() == 1.0);
  CHECK(leaf.counts.total == 0);
  for (long c : leaf.counts.per_coordinate) CHECK(c == 0);
  CHECK(tree.min_leaf_volume() == 1.0);
  CHECK(tree.max_side_length(1) == 1.0);
}

TEST_CASE("centered depth-2 lookup in one dimension") {
  const Tree tree = grow_centered(1, {1.0}, 2, 7);
  const auto& leaf = tree.leaf_of({0.6});
  CHECK(leaf.cell.lower[0] == doctest::Approx(0.5));
  CHECK(leaf.cell.upper[0] == doctest::Approx(0.75));
  CHECK(leaf.counts.total == 2);
}

TEST_CASE("hand-built depth-3 path counts") {
  const Tree tree = hand_tree();
  const auto& leaf = tree.leaf_of({0.9, 0.1});
  CHECK(leaf.counts.per_coordinate == std::vector<long>{2, 1});
  CHECK(leaf.cell.lower[0] == 0.75);
  // Boundary convention: at the threshold the point goes left.
  const auto& tie = tree.leaf_of({0.5, 0.3});
  CHECK(tie.cell.upper[0] == 0.5);
  // Zero lower bounds are inclusive.
  const auto& origin = tree.leaf_of({0.0, 0.0});
  CHECK(origin.cell.contains({0.0, 0.0}));
}

TEST_CASE("rectangle volumes") {
  AxisRectangle unit{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}};
  CHECK(unit.volume() == 1.0);
  const Tree centered = grow_centered(1, {1.0}, 3, 5);
  CHECK(centered.leaf_of({0.9}).cell.volume() == 0.125);
  AxisRectangle box{{0.0, 0.5}, {0.25, 1.0}};
  CHECK(box.volume() == 0.125);
}

TEST_CASE("min leaf volume and max side lengths") {
  const Tree centered = grow_centered(2, {0.5, 0.5}, 4, 11);
  CHECK(centered.min_leaf_volume() == std::ldexp(1.0, -4));

  const Tree modified = grow_modified_centered(2, {2, 2}, 4, 3);
  CHECK(modified.max_side_length(0) == doctest::Approx(0.25));
  CHECK(modified.max_side_length(1) == doctest::Approx(0.25));

  // Exhaustive-scan oracle on a uniform tree.
  const Tree uniform = grow_uniform(2, 5, 17);
  double best = 1.0;
  for (const auto& leaf : uniform.leaves()) {
    double v = 1.0;
    for (std::size_t j = 0; j < 2; ++j) v *= leaf.cell.upper[j] - leaf.cell.lower[j];
    best = std::min(best, v);
  }
  CHECK(uniform.min_leaf_volume() == doctest::Approx(best).epsilon(1e-15));
}

TEST_CASE("leaves partition the cube") {
  Rng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const Tree tree = grow_uniform(2, 6, rng.next_u64());
    double volume = 0.0;
    for (const auto& leaf : tree.leaves()) volume += leaf.cell.volume();
    CHECK(volume == doctest::Approx(1.0).epsilon(1e-12));

    for (int probe = 0; probe < 10000; ++probe) {
      const std::vector<double> x{rng.uniform01(), rng.uniform01()};
      std::size_t containing = 0;
      for (const auto& leaf : tree.leaves()) {
        if (leaf.cell.contains(x)) ++containing;
      }
      CHECK(containing == 1);
      CHECK(tree.leaf_of(x).cell.contains(x));
      CHECK(tree.min_leaf_volume() <= tree.leaf_of(x).cell.volume());
    }
  }
}

TEST_CASE("split counts are consistent at every leaf") {
  const Tree tree = grow_uniform(3, 7, 23);
  for (const auto& leaf : tree.leaves()) {
    long sum = 0;
    for (long c : leaf.counts.per_coordinate) sum += c;
    CHECK(sum == leaf.counts.total);
    CHECK(leaf.counts.total == 7);
  }
}

TEST_CASE("JSON round trip preserves the tree") {
  const Tree tree = grow_uniform(2, 5, 99);
  const Tree back = Tree::from_json(tree.to_json());
  CHECK(tree == back);
  const Tree other = grow_uniform(2, 5, 100);
  CHECK(!(tree == other));
}
