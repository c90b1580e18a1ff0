#include "honest_forest/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace honest_forest {

SortedCoordinates::SortedCoordinates(const Matrix& features, const std::vector<double>* weights) {
  const std::size_t n = features.rows();
  const std::size_t d = features.cols();
  if (weights && weights->size() != n) {
    throw std::invalid_argument("SortedCoordinates: weights length must equal the row count");
  }
  values_.resize(d);
  prefix_.resize(d);
  std::vector<std::pair<double, double>> column(n);  // (value, weight)
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      column[i] = {features(i, j), weights ? (*weights)[i] : 1.0};
    }
    std::sort(column.begin(), column.end());
    values_[j].resize(n);
    prefix_[j].resize(n + 1);
    prefix_[j][0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      values_[j][i] = column[i].first;
      prefix_[j][i + 1] = prefix_[j][i] + column[i].second;
    }
  }
  total_ = prefix_.empty() ? 0.0 : prefix_[0][n];
}

double SortedCoordinates::interval_weight(std::size_t j, double a, double b) const {
  const std::vector<double>& vals = values_[j];
  const auto hi = std::upper_bound(vals.begin(), vals.end(), b) - vals.begin();
  const auto lo =
      a == 0.0 ? 0 : std::upper_bound(vals.begin(), vals.end(), a) - vals.begin();
  return prefix_[j][static_cast<std::size_t>(hi)] - prefix_[j][static_cast<std::size_t>(lo)];
}

AssumptionTrace trace_assumptions(const Tree& tree, const PredictionSample& sample,
                                  const std::vector<double>& x) {
  const SortedCoordinates sorted(*sample.features, sample.weights);
  return trace_assumptions(tree, sample, sorted, x);
}

AssumptionTrace trace_assumptions(const Tree& tree, const PredictionSample& sample,
                                  const SortedCoordinates& sorted, const std::vector<double>& x) {
  const std::size_t d = tree.dimension();
  const double scale = static_cast<double>(sample.n()) * sample.mean_w;
  const Tree::Leaf& leaf = tree.leaf_of(x);

  AssumptionTrace trace;
  trace.n_i = sample.n();
  trace.depth = leaf.counts.total;
  trace.per_coord_depth = leaf.counts.per_coordinate;
  trace.side_lengths.resize(d);
  trace.balance_fractions.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    trace.side_lengths[j] = leaf.cell.side(j);
    trace.balance_fractions[j] =
        sorted.interval_weight(j, leaf.cell.lower[j], leaf.cell.upper[j]) / scale;
  }
  trace.leaf_mass = scale * leaf.cell.volume();
  trace.min_volume = tree.min_leaf_volume();

  trace.sup_side_lengths.assign(d, 0.0);
  trace.sup_balance_fractions.assign(d, 0.0);
  for (const Tree::Leaf& other : tree.leaves()) {
    for (std::size_t j = 0; j < d; ++j) {
      trace.sup_side_lengths[j] = std::max(trace.sup_side_lengths[j], other.cell.side(j));
      const double frac =
          sorted.interval_weight(j, other.cell.lower[j], other.cell.upper[j]) / scale;
      trace.sup_balance_fractions[j] = std::max(trace.sup_balance_fractions[j], frac);
    }
  }
  return trace;
}

RegularityAudit regularity_audit(const Tree& tree, const Matrix& i_features, double alpha, long k_n) {
  if (!(alpha > 0.0 && alpha <= 0.5)) {
    throw std::invalid_argument("regularity_audit: alpha must lie in (0, 1/2]");
  }
  if (k_n < 1) throw std::invalid_argument("regularity_audit: k_n must be >= 1");

  const std::size_t n_i = i_features.rows();
  const std::size_t d = i_features.cols();
  const std::size_t leaf_count = tree.leaf_count();

  RegularityAudit audit;
  audit.leaf_count = leaf_count;
  audit.depth_bound = std::log(static_cast<double>(n_i) / (2.0 * static_cast<double>(k_n) - 1.0)) /
                      std::log(1.0 / alpha);
  audit.leaf_i_counts.assign(leaf_count, 0);
  audit.leaf_depths.resize(leaf_count);

  std::vector<double> x(d);
  for (std::size_t i = 0; i < n_i; ++i) {
    for (std::size_t j = 0; j < d; ++j) x[j] = i_features(i, j);
    ++audit.leaf_i_counts[tree.leaf_index_of(x)];
  }

  const SortedCoordinates sorted(i_features, nullptr);
  for (std::size_t leaf = 0; leaf < leaf_count; ++leaf) {
    const Tree::Leaf& entry = tree.leaf(leaf);
    audit.leaf_depths[leaf] = entry.counts.total;
    const long count = audit.leaf_i_counts[leaf];
    const bool in_window = count >= k_n && count <= 2 * k_n - 1;
    if (in_window) {
      ++audit.leaves_in_window;
      if (static_cast<double>(entry.counts.total) < audit.depth_bound - 1e-12) {
        audit.depth_violations.push_back(leaf);
      }
    } else {
      audit.node_size_violations.push_back(leaf);
    }
    for (std::size_t j = 0; j < d; ++j) {
      const double fraction =
          sorted.interval_weight(j, entry.cell.lower[j], entry.cell.upper[j]) /
          static_cast<double>(n_i);
      const double bound =
          std::pow(1.0 - alpha, static_cast<double>(entry.counts.per_coordinate[j]));
      if (fraction > bound + 1e-12) {
        audit.balance_violations.push_back(leaf);
        break;
      }
    }
  }
  audit.window_fraction =
      leaf_count == 0 ? 0.0
                      : static_cast<double>(audit.leaves_in_window) / static_cast<double>(leaf_count);
  return audit;
}

MinSplitRecursion centered_min_split_recursion(double p, long depth) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("centered_min_split_recursion: p in (0,1)");
  if (depth < 1) throw std::invalid_argument("centered_min_split_recursion: depth must be >= 1");
  MinSplitRecursion out;
  double g = p;
  for (long k = 2; k <= depth; ++k) g = p + (1.0 - p) * g * g;
  out.g1 = g;
  if (p < 0.5) {
    out.limit = p / (1.0 - p);
    out.zero_prob_limit = (1.0 - 2.0 * p) / (1.0 - p);
  } else {
    out.limit = 1.0;
    out.zero_prob_limit = 0.0;
  }
  return out;
}

namespace {

// Does some root-to-leaf path of a depth-`remaining` subtree avoid the
// tracked feature entirely? Split indicators are drawn on the fly; any
// node that splits on the tracked feature covers all paths through it.
bool zero_path_exists(Rng& rng, double p, long remaining) {
  if (remaining == 0) return true;
  if (rng.uniform01() < p) return false;
  if (zero_path_exists(rng, p, remaining - 1)) return true;
  return zero_path_exists(rng, p, remaining - 1);
}

}  // namespace

double empirical_min_split(double p, long depth, std::size_t reps, std::uint64_t seed) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("empirical_min_split: p in (0,1]");
  if (depth < 1 || depth > 16) {
    throw std::invalid_argument("empirical_min_split: depth must lie in [1,16]");
  }
  if (reps < 1) throw std::invalid_argument("empirical_min_split: reps must be >= 1");
  Rng rng(seed);
  std::size_t hits = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    if (zero_path_exists(rng, p, depth)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(reps);
}

namespace {

double probe_log_term(const Schedule& node_size, std::size_t d, std::size_t n, ProbeMode mode,
                      const std::optional<Schedule>& subsample) {
  const double nn = static_cast<double>(n);
  const double k = static_cast<double>(evaluate_schedule(node_size, n));
  double exponent;
  if (mode == ProbeMode::BootstrapPartialSum) {
    if (!subsample) {
      throw std::invalid_argument("summability_probe: bootstrap mode needs a subsample schedule");
    }
    const double m = static_cast<double>(evaluate_schedule(*subsample, n));
    exponent = k * k / (8.0 * m);  // 8 n E[W1] = 8 m
  } else {
    exponent = k * k / (2.0 * nn);
  }
  return 4.0 * static_cast<double>(d) * std::log(nn) - exponent;
}

}  // namespace

ProbeSeries summability_probe(const Schedule& node_size, std::size_t d, std::size_t n_max,
                              ProbeMode mode, const std::optional<Schedule>& subsample) {
  if (n_max < 2) throw std::invalid_argument("summability_probe: n_max must be >= 2");
  if (d < 1) throw std::invalid_argument("summability_probe: d must be >= 1");

  ProbeSeries series;
  series.mode = mode;

  // Reporting ladder: powers of two within [2, n_max] plus n_max itself.
  std::vector<std::size_t> ladder;
  for (std::size_t n = 2; n < n_max; n *= 2) ladder.push_back(n);
  ladder.push_back(n_max);

  if (mode == ProbeMode::WeakCondition) {
    for (std::size_t n : ladder) {
      const double lt = probe_log_term(node_size, d, n, mode, subsample);
      series.points.push_back(ProbePoint{n, lt, std::exp(lt)});
    }
  } else {
    // Partial sums accumulate every term up to n_max; ladder entries record
    // the running sum.
    double sum = 0.0;
    double tail_half = 0.0;
    std::size_t next = 0;
    for (std::size_t n = 2; n <= n_max; ++n) {
      const double lt = probe_log_term(node_size, d, n, mode, subsample);
      const double term = std::exp(lt);
      sum += term;
      if (n > n_max / 2) tail_half += term;
      while (next < ladder.size() && ladder[next] == n) {
        series.points.push_back(ProbePoint{n, lt, sum});
        ++next;
      }
    }
    series.partial_sum = sum;
    series.plateaus = std::isfinite(sum) && sum > 0.0 && tail_half / sum < 1e-9;
  }

  series.final_log_term = probe_log_term(node_size, d, n_max, mode, subsample);
  series.final_term = std::exp(series.final_log_term);

  // Decay verdict from the asymptotic regime: extend the ladder in log
  // space far beyond n_max, where polynomial-versus-exponential races have
  // resolved, and require the log-term to be strongly negative and falling.
  {
    std::vector<double> tail;
    std::size_t n = n_max;
    for (int i = 0; i < 24 && n <= (std::size_t{1} << 60); ++i) {
      tail.push_back(probe_log_term(node_size, d, n, mode, subsample));
      if (n > (std::size_t{1} << 58)) break;
      n *= 4;
    }
    bool falling = tail.size() >= 3;
    for (std::size_t i = tail.size() >= 5 ? tail.size() - 5 : 0; i + 1 < tail.size(); ++i) {
      if (!(tail[i + 1] < tail[i])) falling = false;
    }
    const double last = tail.back();
    series.decays = falling && last < std::log(1e-10);
  }

  if (mode == ProbeMode::WeakCondition) {
    series.verdict = series.decays ? "decays" : "does not decay";
  } else {
    series.verdict = series.plateaus ? "plateaus" : "does not plateau";
  }
  return series;
}

}  // namespace honest_forest
