#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace honest_forest {

// Half-open axis-aligned cell prod_j (lower_j, upper_j] inside [0,1]^d.
// A lower bound of exactly 0 is treated as inclusive so that cells tile
// all of [0,1]^d; this is the only boundary convention in the project and
// every membership test goes through contains()/coordinate_in_interval().
struct AxisRectangle {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dimension() const { return lower.size(); }
  double side(std::size_t j) const { return upper[j] - lower[j]; }

  double volume() const {
    double v = 1.0;
    for (std::size_t j = 0; j < lower.size(); ++j) v *= upper[j] - lower[j];
    return v;
  }

  bool coordinate_in_interval(std::size_t j, double value) const {
    const bool above = lower[j] == 0.0 ? value >= 0.0 : value > lower[j];
    return above && value <= upper[j];
  }

  bool contains(const std::vector<double>& x) const {
    for (std::size_t j = 0; j < lower.size(); ++j) {
      if (!coordinate_in_interval(j, x[j])) return false;
    }
    return true;
  }
};

// Number of splits on the path to a leaf, total and per coordinate.
struct SplitCounts {
  long total = 0;
  std::vector<long> per_coordinate;
};

// Binary axis-aligned partition tree of [0,1]^d. Internal nodes route on
// (feature, threshold) with ties going left; leaves carry their cell and
// split counts explicitly. Immutable once grown.
class Tree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int leaf_index = -1;
  };

  struct Leaf {
    AxisRectangle cell;
    SplitCounts counts;
  };

  // Builder interface used by the growers. empty() has no nodes and is not
  // usable until a root has been added; growers append in preorder.
  static Tree empty(std::size_t d);
  static Tree single_leaf(std::size_t d);
  void reserve(std::size_t nodes, std::size_t leaves);
  int add_internal(int feature, double threshold);  // children attached later
  int add_leaf(AxisRectangle cell, SplitCounts counts);
  void set_children(int node, int left, int right);

  std::size_t dimension() const { return dimension_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t leaf_count() const { return leaves_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Leaf>& leaves() const { return leaves_; }
  const Leaf& leaf(std::size_t idx) const { return leaves_[idx]; }

  // Index of the unique leaf whose cell contains x; total on [0,1]^d.
  std::size_t leaf_index_of(const std::vector<double>& x) const;
  const Leaf& leaf_of(const std::vector<double>& x) const { return leaves_[leaf_index_of(x)]; }

  // Exact extremes over the (finite) leaf set.
  double min_leaf_volume() const;
  double max_side_length(std::size_t j) const;

  // Preorder JSON document for debugging and golden tests.
  std::string to_json() const;
  static Tree from_json(const std::string& text);

  bool operator==(const Tree& other) const;

 private:
  explicit Tree(std::size_t d) : dimension_(d) {}

  std::size_t dimension_ = 0;
  std::vector<Node> nodes_;
  std::vector<Leaf> leaves_;
};

}  // namespace honest_forest
