#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "honest_forest/data.hpp"
#include "honest_forest/tree.hpp"

namespace honest_forest {

// Prediction-side sample: the I-rows of a dataset, optionally carrying
// bootstrap weights. mean_w is the analytic E[W1] used to normalize the
// bootstrap estimators; it is 1 when no weights are attached.
struct PredictionSample {
  const Matrix* features = nullptr;
  const std::vector<double>* responses = nullptr;
  const std::vector<double>* weights = nullptr;  // nullptr means all ones
  double mean_w = 1.0;

  std::size_t n() const { return features->rows(); }
};

// (Weighted) counts of I-observations in the leaf of a query point and,
// per coordinate, in the leaf's coordinate interval.
struct LeafStats {
  double n_in_leaf = 0.0;
  std::vector<double> per_coordinate_in_interval;
  double response_sum = 0.0;
};

// Leaf-mean prediction. value is empty exactly when the (weighted) leaf
// count is zero; an empty prediction is a first-class outcome.
struct Prediction {
  std::optional<double> value;
  double leaf_volume = 0.0;
  LeafStats stats;
};

LeafStats leaf_stats(const Tree& tree, const PredictionSample& sample, const std::vector<double>& x);

// (sum_i w_i 1{X_i in L}) / (n_I mean_w lambda(L)).
double density_estimate(const Tree& tree, const PredictionSample& sample, const std::vector<double>& x);

Prediction tree_predict(const Tree& tree, const PredictionSample& sample, const std::vector<double>& x);

// The product T(x) * f_hat(x) computed from one shared leaf scan, so the
// factorization holds bit-exactly; 0 when the leaf is empty.
double m_numerator_estimate(const Tree& tree, const PredictionSample& sample, const std::vector<double>& x);

struct ForestPrediction {
  std::optional<double> value;  // empty when every tree was empty at x
  std::size_t skipped_empty = 0;
  std::size_t total_trees = 0;
};

struct ForestMember {
  const Tree* tree = nullptr;
  const std::vector<double>* weights = nullptr;  // per-tree I-weights, may be nullptr
  double mean_w = 1.0;
};

// Average of the nonempty tree predictions in member order; empty trees
// are skipped and counted.
ForestPrediction forest_predict(const std::vector<ForestMember>& members, const Matrix& i_features,
                                const std::vector<double>& i_responses, const std::vector<double>& x);

}  // namespace honest_forest
