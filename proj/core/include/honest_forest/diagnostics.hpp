#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "honest_forest/estimators.hpp"
#include "honest_forest/splitters.hpp"
#include "honest_forest/tree.hpp"

namespace honest_forest {

// Per-coordinate sorted values with weighted prefix sums, for O(log n)
// interval counts against the half-open cell convention.
class SortedCoordinates {
 public:
  SortedCoordinates(const Matrix& features, const std::vector<double>* weights);

  // Weighted count of points whose j'th coordinate lies in the interval
  // (a, b], inclusive at a == 0.
  double interval_weight(std::size_t j, double a, double b) const;

  double total_weight() const { return total_; }

 private:
  std::vector<std::vector<double>> values_;
  std::vector<std::vector<double>> prefix_;  // prefix_[j][k] = weight of first k sorted points
  double total_ = 0.0;
};

// Snapshot of the quantities driving the consistency conditions at one
// query point: exact side lengths, leaf mass n_I E[W1] lambda(L), balance
// fractions N_L^j / (n_I E[W1]), and exact extremes over all leaves.
struct AssumptionTrace {
  std::size_t n_i = 0;
  std::vector<double> side_lengths;
  double leaf_mass = 0.0;
  std::vector<double> balance_fractions;
  double min_volume = 0.0;
  std::vector<double> sup_side_lengths;
  std::vector<double> sup_balance_fractions;
  long depth = 0;
  std::vector<long> per_coord_depth;
};

AssumptionTrace trace_assumptions(const Tree& tree, const PredictionSample& sample,
                                  const std::vector<double>& x);
AssumptionTrace trace_assumptions(const Tree& tree, const PredictionSample& sample,
                                  const SortedCoordinates& sorted, const std::vector<double>& x);

// Per-leaf audit of the node-size window [k_n, 2k_n - 1] on raw I-counts,
// of the depth lower bound log(n_I / (2k_n - 1)) / log(1/alpha) on leaves
// inside the window, and of the per-coordinate balance bound
// N_L^j / n_I <= (1 - alpha)^{s_{n,j}}.
struct RegularityAudit {
  double depth_bound = 0.0;
  std::size_t leaf_count = 0;
  std::size_t leaves_in_window = 0;
  double window_fraction = 0.0;
  std::vector<std::size_t> node_size_violations;   // leaves outside the window
  std::vector<std::size_t> depth_violations;       // windowed leaves shallower than the bound
  std::vector<std::size_t> balance_violations;     // leaves breaking the coordinate bound
  std::vector<long> leaf_i_counts;                 // leaf index order
  std::vector<long> leaf_depths;
};

RegularityAudit regularity_audit(const Tree& tree, const Matrix& i_features, double alpha, long k_n);

// G_k(1) for the minimum number of splits on a tracked feature across all
// paths of a depth-k balanced centered tree:
//   G_k(1) = p + (1 - p) G_{k-1}(1)^2,  G_1(1) = p,
// with limit p/(1-p) for p < 1/2 (else 1) and limiting probability
// (1 - 2p)/(1 - p) (else 0) that some path has no tracked split.
struct MinSplitRecursion {
  double g1 = 0.0;               // G_depth(1)
  double limit = 0.0;            // lim_k G_k(1)
  double zero_prob_limit = 0.0;  // lim P(inf_x s_j(x) = 0)
};

MinSplitRecursion centered_min_split_recursion(double p, long depth);

// Monte Carlo fraction of fully grown depth-d centered trees that contain
// a root-to-leaf path with zero splits on the tracked feature. Agrees with
// 1 - G_depth(1) in expectation. depth <= 16.
double empirical_min_split(double p, long depth, std::size_t reps, std::uint64_t seed);

enum class ProbeMode { WeakCondition, StrongPartialSum, BootstrapPartialSum };

struct ProbePoint {
  std::size_t n = 0;
  double log_term = 0.0;
  double value = 0.0;  // term (WeakCondition) or running partial sum
};

// Numerical evidence, not proof: terms are evaluated in log space, partial
// sums over every n <= n_max, and the decay verdict extrapolates the
// log-term along a geometric ladder far beyond n_max where the asymptotic
// behaviour is visible.
struct ProbeSeries {
  ProbeMode mode = ProbeMode::WeakCondition;
  std::vector<ProbePoint> points;  // geometric ladder within [2, n_max]
  double final_log_term = 0.0;
  double final_term = 0.0;
  double partial_sum = 0.0;  // partial-sum modes only
  bool decays = false;
  bool plateaus = false;
  std::string verdict;
};

// Terms: n^{4d} e^{-k_n^2 / (2n)} for WeakCondition and StrongPartialSum,
// n^{4d} e^{-k_n^2 / (8 n E[W1])} with E[W1] = m_n / n for
// BootstrapPartialSum (m_n from the subsample schedule).
ProbeSeries summability_probe(const Schedule& node_size, std::size_t d, std::size_t n_max,
                              ProbeMode mode,
                              const std::optional<Schedule>& subsample = std::nullopt);

}  // namespace honest_forest
