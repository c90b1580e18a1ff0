#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "honest_forest/data.hpp"
#include "honest_forest/tree.hpp"

namespace honest_forest {

// Deterministic hyperparameter sequences. The integer value is the exact
// ceiling/floor of the defining formula; a relative guard of 1e-9 protects
// mathematically integral values from floating-point drift.
//   PolyNodeSize(beta)     k_n = ceil(n^beta)
//   SqrtLogNodeSize(beta)  k_n = ceil(sqrt(n * log(n)^beta))
//   LogDepth(eps)          s_n = floor(log(n) / (1 + eps))
//   Log2PowerDepth(beta)   s_n = ceil(log2(n^(1 - beta)))
//   PolySubsample(gamma)   m_n = ceil(n^gamma)
enum class ScheduleKind { PolyNodeSize, SqrtLogNodeSize, LogDepth, Log2PowerDepth, PolySubsample };

struct Schedule {
  ScheduleKind kind = ScheduleKind::PolyNodeSize;
  double param = 0.0;

  bool operator==(const Schedule&) const = default;
};

long evaluate_schedule(const Schedule& schedule, std::size_t n);

enum class SplitterKind { Uniform, Centered, ModifiedCentered, RegularAdaptive };

struct RegularAdaptiveConfig {
  double alpha = 0.3;                 // in (0, 1/2]
  std::vector<double> feature_floor;  // positive, sums to at most 1
};

struct SplitterConfig {
  SplitterKind kind = SplitterKind::Centered;
  Schedule schedule;                   // depth schedule, or node-size schedule for RegularAdaptive
  std::vector<double> feature_probs;   // Centered
  std::vector<long> rotation_periods;  // ModifiedCentered
  RegularAdaptiveConfig adaptive;      // RegularAdaptive

  void validate(std::size_t d) const;  // throws std::invalid_argument
};

// Fully balanced tree of depth s_n; each node splits a uniformly chosen
// feature at a threshold uniform in the node's interval. Ignores all data.
Tree grow_uniform(std::size_t d, long s_n, std::uint64_t theta);

// Balanced tree with 2^{s_n} leaves; features drawn with probabilities p,
// thresholds at interval midpoints. Ignores all data.
Tree grow_centered(std::size_t d, const std::vector<double>& p, long s_n, std::uint64_t theta);

// Centered splitting where feature j is forced at every depth t with
// t = r_j (mod periods[j]) for fixed pairwise-disjoint residue classes,
// and free depths draw uniformly among the unforced features. Guarantees
// s_{n,j} >= floor(s_n / periods[j]) on every path.
Tree grow_modified_centered(std::size_t d, const std::vector<long>& periods, long s_n, std::uint64_t theta);

// The residue classes used by grow_modified_centered, assigned greedily.
// Throws when no pairwise-disjoint assignment exists (in particular when
// sum_j 1/periods[j] > 1).
std::vector<long> assign_rotation_residues(const std::vector<long>& periods);

struct AdaptiveGrowth {
  Tree tree;
  long stop_threshold = 0;          // tau_n, in units of the given weights
  double total_mass = 0.0;          // sum of weights at the root
  double min_child_fraction = 1.0;  // min over splits of child mass / parent mass
  long split_count = 0;
  long degenerate_stops = 0;  // nodes closed early: no admissible split boundary
  long slack_splits = 0;      // splits that fell back to the one-point-slack median
  std::vector<double> leaf_mass;  // J-mass per leaf, leaf index order

  AdaptiveGrowth() : tree(Tree::single_leaf(1)) {}
};

// Data-adaptive growth on the J-sample. At each node a feature is drawn
// with probabilities proportional to cfg.feature_floor, a balance fraction
// q ~ U[alpha, 1-alpha] is drawn, and the node splits at the weighted
// q-quantile of its J-values on that feature, with the split position
// clamped so that each child keeps at least fraction alpha of the parent
// J-mass and at least tau_n of J-mass overall. When discreteness leaves no
// position satisfying the alpha band (e.g. alpha = 1/2 on an odd count),
// the split falls back to the median with at most one boundary point of
// slack; the tau floor is never relaxed. Nodes whose mass is below
// 2 tau_n become leaves, so every leaf holds J-mass >= tau_n.
//
// j_weights are unit-mean observation weights (all ones when not
// bootstrapping; bootstrap weights divided by their analytic mean
// otherwise). tau_n = ceil(k_n * total_weight / n_i) calibrates leaf
// I-counts to concentrate in [k_n, 2 k_n - 1].
//
// Points with zero weight carry no J-mass and do not participate in
// quantiles. Requires root mass >= tau_n.
AdaptiveGrowth grow_regular_adaptive(const Matrix& j_features, const std::vector<double>& j_weights,
                                     const RegularAdaptiveConfig& cfg, long k_n, std::size_t n_i,
                                     std::uint64_t theta);

}  // namespace honest_forest
