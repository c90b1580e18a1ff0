#include "honest_forest/estimators.hpp"

#include <stdexcept>

namespace honest_forest {

LeafStats leaf_stats(const Tree& tree, const PredictionSample& sample, const std::vector<double>& x) {
  const Matrix& features = *sample.features;
  const std::vector<double>& responses = *sample.responses;
  if (sample.weights && sample.weights->size() != features.rows()) {
    throw std::invalid_argument("leaf_stats: weights length must equal the I-sample size");
  }

  const AxisRectangle& cell = tree.leaf_of(x).cell;
  const std::size_t d = features.cols();

  LeafStats stats;
  stats.per_coordinate_in_interval.assign(d, 0.0);
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const double w = sample.weights ? (*sample.weights)[i] : 1.0;
    if (w == 0.0) continue;
    bool in_leaf = true;
    for (std::size_t j = 0; j < d; ++j) {
      if (cell.coordinate_in_interval(j, features(i, j))) {
        stats.per_coordinate_in_interval[j] += w;
      } else {
        in_leaf = false;
      }
    }
    if (in_leaf) {
      stats.n_in_leaf += w;
      stats.response_sum += w * responses[i];
    }
  }
  return stats;
}

double density_estimate(const Tree& tree, const PredictionSample& sample, const std::vector<double>& x) {
  const LeafStats stats = leaf_stats(tree, sample, x);
  const double volume = tree.leaf_of(x).cell.volume();
  return stats.n_in_leaf / (static_cast<double>(sample.n()) * sample.mean_w * volume);
}

Prediction tree_predict(const Tree& tree, const PredictionSample& sample, const std::vector<double>& x) {
  Prediction pred;
  pred.stats = leaf_stats(tree, sample, x);
  pred.leaf_volume = tree.leaf_of(x).cell.volume();
  if (pred.stats.n_in_leaf > 0.0) {
    pred.value = pred.stats.response_sum / pred.stats.n_in_leaf;
  }
  return pred;
}

double m_numerator_estimate(const Tree& tree, const PredictionSample& sample, const std::vector<double>& x) {
  const LeafStats stats = leaf_stats(tree, sample, x);
  if (stats.n_in_leaf == 0.0) return 0.0;
  const double volume = tree.leaf_of(x).cell.volume();
  const double t = stats.response_sum / stats.n_in_leaf;
  const double f = stats.n_in_leaf / (static_cast<double>(sample.n()) * sample.mean_w * volume);
  return t * f;
}

ForestPrediction forest_predict(const std::vector<ForestMember>& members, const Matrix& i_features,
                                const std::vector<double>& i_responses, const std::vector<double>& x) {
  ForestPrediction out;
  out.total_trees = members.size();
  double sum = 0.0;
  std::size_t used = 0;
  for (const ForestMember& member : members) {
    PredictionSample sample;
    sample.features = &i_features;
    sample.responses = &i_responses;
    sample.weights = member.weights;
    sample.mean_w = member.mean_w;
    const Prediction pred = tree_predict(*member.tree, sample, x);
    if (pred.value) {
      sum += *pred.value;
      ++used;
    } else {
      ++out.skipped_empty;
    }
  }
  if (used > 0) out.value = sum / static_cast<double>(used);
  return out;
}

}  // namespace honest_forest
