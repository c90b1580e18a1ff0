#include "honest_forest/tree.hpp"

#include <stdexcept>

#include "json.hpp"

namespace honest_forest {

using nlohmann::json;

Tree Tree::empty(std::size_t d) { return Tree(d); }

void Tree::reserve(std::size_t nodes, std::size_t leaves) {
  nodes_.reserve(nodes);
  leaves_.reserve(leaves);
}

Tree Tree::single_leaf(std::size_t d) {
  Tree tree(d);
  AxisRectangle cell;
  cell.lower.assign(d, 0.0);
  cell.upper.assign(d, 1.0);
  SplitCounts counts;
  counts.per_coordinate.assign(d, 0);
  tree.add_leaf(std::move(cell), std::move(counts));
  return tree;
}

int Tree::add_internal(int feature, double threshold) {
  Node node;
  node.feature = feature;
  node.threshold = threshold;
  nodes_.push_back(node);
  return static_cast<int>(nodes_.size()) - 1;
}

int Tree::add_leaf(AxisRectangle cell, SplitCounts counts) {
  Node node;
  node.leaf_index = static_cast<int>(leaves_.size());
  leaves_.push_back(Leaf{std::move(cell), std::move(counts)});
  nodes_.push_back(node);
  return static_cast<int>(nodes_.size()) - 1;
}

void Tree::set_children(int node, int left, int right) {
  nodes_[static_cast<std::size_t>(node)].left = left;
  nodes_[static_cast<std::size_t>(node)].right = right;
}

std::size_t Tree::leaf_index_of(const std::vector<double>& x) const {
  std::size_t idx = 0;
  for (;;) {
    const Node& node = nodes_[idx];
    if (node.feature < 0) return static_cast<std::size_t>(node.leaf_index);
    idx = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] <= node.threshold
                                       ? node.left
                                       : node.right);
  }
}

double Tree::min_leaf_volume() const {
  double best = leaves_[0].cell.volume();
  for (std::size_t i = 1; i < leaves_.size(); ++i) {
    const double v = leaves_[i].cell.volume();
    if (v < best) best = v;
  }
  return best;
}

double Tree::max_side_length(std::size_t j) const {
  double best = 0.0;
  for (const Leaf& leaf : leaves_) {
    const double s = leaf.cell.side(j);
    if (s > best) best = s;
  }
  return best;
}

bool Tree::operator==(const Tree& other) const {
  if (dimension_ != other.dimension_ || nodes_.size() != other.nodes_.size() ||
      leaves_.size() != other.leaves_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& a = nodes_[i];
    const Node& b = other.nodes_[i];
    if (a.feature != b.feature || a.threshold != b.threshold || a.left != b.left ||
        a.right != b.right || a.leaf_index != b.leaf_index) {
      return false;
    }
  }
  for (std::size_t i = 0; i < leaves_.size(); ++i) {
    const Leaf& a = leaves_[i];
    const Leaf& b = other.leaves_[i];
    if (a.cell.lower != b.cell.lower || a.cell.upper != b.cell.upper ||
        a.counts.total != b.counts.total || a.counts.per_coordinate != b.counts.per_coordinate) {
      return false;
    }
  }
  return true;
}

std::string Tree::to_json() const {
  json nodes = json::array();
  for (const Node& node : nodes_) {
    if (node.feature >= 0) {
      nodes.push_back(json{{"feature", node.feature},
                           {"threshold", node.threshold},
                           {"left", node.left},
                           {"right", node.right}});
    } else {
      const Leaf& leaf = leaves_[static_cast<std::size_t>(node.leaf_index)];
      nodes.push_back(json{{"leaf", json{{"lower", leaf.cell.lower},
                                         {"upper", leaf.cell.upper},
                                         {"counts", json{{"total", leaf.counts.total},
                                                         {"per_coordinate", leaf.counts.per_coordinate}}}}}});
    }
  }
  return json{{"dimension", dimension_}, {"nodes", nodes}}.dump();
}

Tree Tree::from_json(const std::string& text) {
  const json doc = json::parse(text);
  Tree tree(doc.at("dimension").get<std::size_t>());
  for (const json& entry : doc.at("nodes")) {
    if (entry.contains("feature")) {
      const int idx = tree.add_internal(entry.at("feature").get<int>(), entry.at("threshold").get<double>());
      tree.set_children(idx, entry.at("left").get<int>(), entry.at("right").get<int>());
    } else {
      const json& leaf = entry.at("leaf");
      AxisRectangle cell;
      cell.lower = leaf.at("lower").get<std::vector<double>>();
      cell.upper = leaf.at("upper").get<std::vector<double>>();
      SplitCounts counts;
      counts.total = leaf.at("counts").at("total").get<long>();
      counts.per_coordinate = leaf.at("counts").at("per_coordinate").get<std::vector<long>>();
      tree.add_leaf(std::move(cell), std::move(counts));
    }
  }
  if (tree.nodes_.empty()) throw std::invalid_argument("Tree::from_json: empty node list");
  return tree;
}

}  // namespace honest_forest
