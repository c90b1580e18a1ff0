#include "honest_forest/splitters.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace honest_forest {

namespace {

// Ceiling/floor with a small relative guard so that values which are
// integers in exact arithmetic are not pushed over by rounding.
long guarded_ceil(double x) {
  const double eps = 1e-9 * std::max(1.0, std::abs(x));
  return static_cast<long>(std::ceil(x - eps));
}

long guarded_floor(double x) {
  const double eps = 1e-9 * std::max(1.0, std::abs(x));
  return static_cast<long>(std::floor(x + eps));
}

long gcd_long(long a, long b) {
  while (b != 0) {
    const long t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Shared recursion for the balanced non-adaptive growers.
template <typename PickFeature, typename PickThreshold>
Tree grow_balanced(std::size_t d, long s_n, PickFeature&& pick_feature, PickThreshold&& pick_threshold) {
  if (s_n == 0) return Tree::single_leaf(d);

  Tree tree = Tree::empty(d);
  if (s_n < 40) {
    const std::size_t leaves = std::size_t{1} << s_n;
    tree.reserve(2 * leaves - 1, leaves);
  }
  std::vector<double> lower(d, 0.0), upper(d, 1.0);
  std::vector<long> counts(d, 0);

  auto grow = [&](auto&& self, long remaining, long depth) -> int {
    if (remaining == 0) {
      AxisRectangle cell;
      cell.lower = lower;
      cell.upper = upper;
      SplitCounts sc;
      sc.total = depth;
      sc.per_coordinate = counts;
      return tree.add_leaf(std::move(cell), std::move(sc));
    }
    const std::size_t j = pick_feature(depth);
    const double threshold = pick_threshold(j, lower[j], upper[j]);
    const int node = tree.add_internal(static_cast<int>(j), threshold);
    ++counts[j];

    const double saved = upper[j];
    upper[j] = threshold;
    const int left = self(self, remaining - 1, depth + 1);
    upper[j] = saved;

    const double saved_lo = lower[j];
    lower[j] = threshold;
    const int right = self(self, remaining - 1, depth + 1);
    lower[j] = saved_lo;

    --counts[j];
    tree.set_children(node, left, right);
    return node;
  };
  grow(grow, s_n, 0);
  return tree;
}

}  // namespace

long evaluate_schedule(const Schedule& schedule, std::size_t n) {
  if (n < 2) throw std::invalid_argument("evaluate_schedule: n must be >= 2");
  const double nn = static_cast<double>(n);
  switch (schedule.kind) {
    case ScheduleKind::PolyNodeSize:
      if (!(schedule.param > 0.0 && schedule.param < 1.0)) {
        throw std::invalid_argument("Schedule: poly node-size exponent must lie in (0,1)");
      }
      return guarded_ceil(std::pow(nn, schedule.param));
    case ScheduleKind::SqrtLogNodeSize:
      if (!(schedule.param > 0.0)) {
        throw std::invalid_argument("Schedule: sqrt-log exponent must be positive");
      }
      return guarded_ceil(std::sqrt(nn * std::pow(std::log(nn), schedule.param)));
    case ScheduleKind::LogDepth:
      if (!(schedule.param > 0.0)) {
        throw std::invalid_argument("Schedule: log-depth eps must be positive");
      }
      return guarded_floor(std::log(nn) / (1.0 + schedule.param));
    case ScheduleKind::Log2PowerDepth:
      if (!(schedule.param > 0.0 && schedule.param < 1.0)) {
        throw std::invalid_argument("Schedule: log2-power exponent must lie in (0,1)");
      }
      return guarded_ceil((1.0 - schedule.param) * std::log2(nn));
    case ScheduleKind::PolySubsample:
      if (!(schedule.param > 0.0 && schedule.param <= 1.0)) {
        throw std::invalid_argument("Schedule: subsample exponent must lie in (0,1]");
      }
      return guarded_ceil(std::pow(nn, schedule.param));
  }
  throw std::invalid_argument("Schedule: unknown kind");
}

void SplitterConfig::validate(std::size_t d) const {
  switch (kind) {
    case SplitterKind::Uniform:
      break;
    case SplitterKind::Centered: {
      if (feature_probs.size() != d) {
        throw std::invalid_argument("SplitterConfig: feature_probs must have length d");
      }
      double sum = 0.0;
      for (double p : feature_probs) {
        if (!(p > 0.0)) throw std::invalid_argument("SplitterConfig: feature_probs must be positive");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("SplitterConfig: feature_probs must sum to 1");
      }
      break;
    }
    case SplitterKind::ModifiedCentered: {
      if (rotation_periods.size() != d) {
        throw std::invalid_argument("SplitterConfig: rotation_periods must have length d");
      }
      for (long n_j : rotation_periods) {
        if (n_j < static_cast<long>(d)) {
          throw std::invalid_argument("SplitterConfig: rotation periods must be >= d");
        }
      }
      assign_rotation_residues(rotation_periods);  // throws when infeasible
      break;
    }
    case SplitterKind::RegularAdaptive: {
      if (!(adaptive.alpha > 0.0 && adaptive.alpha <= 0.5)) {
        throw std::invalid_argument("SplitterConfig: alpha must lie in (0, 1/2]");
      }
      if (adaptive.feature_floor.size() != d) {
        throw std::invalid_argument("SplitterConfig: feature_floor must have length d");
      }
      double sum = 0.0;
      for (double p : adaptive.feature_floor) {
        if (!(p > 0.0)) throw std::invalid_argument("SplitterConfig: feature_floor must be positive");
        sum += p;
      }
      if (sum > 1.0 + 1e-9) {
        throw std::invalid_argument("SplitterConfig: feature_floor must sum to at most 1");
      }
      break;
    }
  }
}

Tree grow_uniform(std::size_t d, long s_n, std::uint64_t theta) {
  if (s_n < 0) throw std::invalid_argument("grow_uniform: depth must be >= 0");
  Rng rng(theta);
  auto pick_feature = [&](long) { return rng.index(d); };
  auto pick_threshold = [&](std::size_t, double lo, double hi) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      const double c = lo + rng.uniform_open01() * (hi - lo);
      if (c > lo && c < hi) return c;
    }
    return 0.5 * (lo + hi);
  };
  return grow_balanced(d, s_n, pick_feature, pick_threshold);
}

Tree grow_centered(std::size_t d, const std::vector<double>& p, long s_n, std::uint64_t theta) {
  if (s_n < 0) throw std::invalid_argument("grow_centered: depth must be >= 0");
  if (p.size() != d) throw std::invalid_argument("grow_centered: p must have length d");
  double sum = 0.0;
  for (double v : p) {
    if (!(v > 0.0)) throw std::invalid_argument("grow_centered: probabilities must be positive");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("grow_centered: probabilities must sum to 1");

  Rng rng(theta);
  auto pick_feature = [&](long) {
    const double u = rng.uniform01();
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < p.size(); ++j) {
      acc += p[j];
      if (u < acc) return j;
    }
    return p.size() - 1;
  };
  auto pick_threshold = [](std::size_t, double lo, double hi) { return 0.5 * (lo + hi); };
  return grow_balanced(d, s_n, pick_feature, pick_threshold);
}

std::vector<long> assign_rotation_residues(const std::vector<long>& periods) {
  double load = 0.0;
  for (long n_j : periods) {
    if (n_j < 1) throw std::invalid_argument("rotation periods must be >= 1");
    load += 1.0 / static_cast<double>(n_j);
  }
  if (load > 1.0 + 1e-12) {
    throw std::invalid_argument("infeasible residue assignment: rotation periods too dense");
  }
  std::vector<long> residues;
  residues.reserve(periods.size());
  for (std::size_t j = 0; j < periods.size(); ++j) {
    long chosen = -1;
    for (long r = 0; r < periods[j]; ++r) {
      bool ok = true;
      for (std::size_t i = 0; i < j; ++i) {
        const long g = gcd_long(periods[j], periods[i]);
        if (((r - residues[i]) % g + g) % g == 0) {
          ok = false;
          break;
        }
      }
      if (ok) {
        chosen = r;
        break;
      }
    }
    if (chosen < 0) {
      throw std::invalid_argument("infeasible residue assignment: no disjoint residue classes");
    }
    residues.push_back(chosen);
  }
  return residues;
}

Tree grow_modified_centered(std::size_t d, const std::vector<long>& periods, long s_n, std::uint64_t theta) {
  if (s_n < 0) throw std::invalid_argument("grow_modified_centered: depth must be >= 0");
  if (periods.size() != d) throw std::invalid_argument("grow_modified_centered: periods must have length d");
  for (long n_j : periods) {
    if (n_j < static_cast<long>(d)) {
      throw std::invalid_argument("grow_modified_centered: periods must be >= d");
    }
  }
  const std::vector<long> residues = assign_rotation_residues(periods);

  Rng rng(theta);
  auto pick_feature = [&](long depth) -> std::size_t {
    for (std::size_t j = 0; j < d; ++j) {
      if (depth % periods[j] == residues[j]) return j;
    }
    return rng.index(d);
  };
  auto pick_threshold = [](std::size_t, double lo, double hi) { return 0.5 * (lo + hi); };
  return grow_balanced(d, s_n, pick_feature, pick_threshold);
}

AdaptiveGrowth grow_regular_adaptive(const Matrix& j_features, const std::vector<double>& j_weights,
                                     const RegularAdaptiveConfig& cfg, long k_n, std::size_t n_i,
                                     std::uint64_t theta) {
  const std::size_t d = j_features.cols();
  if (j_weights.size() != j_features.rows()) {
    throw std::invalid_argument("grow_regular_adaptive: weights length must match J rows");
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 0.5)) {
    throw std::invalid_argument("grow_regular_adaptive: alpha must lie in (0, 1/2]");
  }
  if (cfg.feature_floor.size() != d) {
    throw std::invalid_argument("grow_regular_adaptive: feature_floor must have length d");
  }
  if (k_n < 1) throw std::invalid_argument("grow_regular_adaptive: k_n must be >= 1");
  if (n_i < 1) throw std::invalid_argument("grow_regular_adaptive: n_i must be >= 1");

  double floor_sum = 0.0;
  for (double p : cfg.feature_floor) {
    if (!(p > 0.0)) throw std::invalid_argument("grow_regular_adaptive: feature_floor must be positive");
    floor_sum += p;
  }
  if (floor_sum > 1.0 + 1e-9) {
    throw std::invalid_argument("grow_regular_adaptive: feature_floor must sum to at most 1");
  }

  std::vector<std::size_t> support;
  double total = 0.0;
  for (std::size_t i = 0; i < j_weights.size(); ++i) {
    if (j_weights[i] < 0.0) throw std::invalid_argument("grow_regular_adaptive: weights must be nonneg");
    if (j_weights[i] > 0.0) {
      support.push_back(i);
      total += j_weights[i];
    }
  }

  AdaptiveGrowth out;
  out.total_mass = total;
  const double tau = std::ceil(static_cast<double>(k_n) * total / static_cast<double>(n_i));
  out.stop_threshold = static_cast<long>(tau);
  if (support.empty() || total < tau) {
    throw std::invalid_argument("grow_regular_adaptive: root J-mass below the stop threshold");
  }

  Rng rng(theta);
  Tree tree = Tree::empty(d);
  std::vector<double> lower(d, 0.0), upper(d, 1.0);
  std::vector<long> counts(d, 0);
  std::vector<double> probs(d);
  for (std::size_t j = 0; j < d; ++j) probs[j] = cfg.feature_floor[j] / floor_sum;
  const double alpha = cfg.alpha;

  auto grow = [&](auto&& self, std::vector<std::size_t>& members, double mass, long depth) -> int {
    auto make_leaf = [&]() {
      AxisRectangle cell;
      cell.lower = lower;
      cell.upper = upper;
      SplitCounts sc;
      sc.total = depth;
      sc.per_coordinate = counts;
      const int id = tree.add_leaf(std::move(cell), std::move(sc));
      out.leaf_mass.push_back(mass);
      return id;
    };

    if (mass < 2.0 * tau) return make_leaf();

    // Feature draw by CDF inversion, then the balance fraction.
    const double u = rng.uniform01();
    std::size_t feature = d - 1;
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < d; ++j) {
      acc += probs[j];
      if (u < acc) {
        feature = j;
        break;
      }
    }
    const double q = rng.uniform(alpha, 1.0 - alpha);

    // Sort the node support on the chosen feature, ties broken by row
    // index so growth is a pure function of (inputs, theta).
    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(members.size());
    for (std::size_t idx : members) order.emplace_back(j_features(idx, feature), idx);
    std::sort(order.begin(), order.end());

    const std::size_t m = order.size();
    std::vector<double> prefix(m);
    double run = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      run += j_weights[order[k].second];
      prefix[k] = run;  // mass of the first k+1 points
    }

    // Split position k means "first k+1 points go left"; candidates are
    // k in [0, m-2]. The tau floor is hard on both sides; the alpha
    // balance additionally constrains the band, with a one-point slack
    // fallback (the median split) when discreteness empties it.
    auto band_of = [&](double need) {
      std::pair<std::size_t, std::size_t> band{m, m};
      for (std::size_t k = 0; k + 1 < m; ++k) {
        if (prefix[k] >= need) {
          band.first = k;
          break;
        }
      }
      for (std::size_t k = m - 1; k-- > 0;) {
        if (mass - prefix[k] >= need) {
          band.second = k;
          break;
        }
      }
      return band;
    };

    const auto tau_band = band_of(tau);
    if (tau_band.first >= m || tau_band.second >= m || tau_band.first > tau_band.second) {
      ++out.degenerate_stops;
      return make_leaf();
    }
    auto [k_lo, k_hi] = band_of(std::max(alpha * mass, tau));
    double target = q * mass;
    if (k_lo >= m || k_hi >= m || k_lo > k_hi) {
      k_lo = tau_band.first;
      k_hi = tau_band.second;
      target = 0.5 * mass;
      ++out.slack_splits;
    }

    // Clamp the quantile target into the band, then move to the nearest
    // distinct-value boundary inside it.
    std::size_t k_star = k_lo;
    while (k_star < k_hi && prefix[k_star] < target) ++k_star;

    std::size_t chosen = m;
    for (std::size_t off = 0;; ++off) {
      const std::size_t up = k_star + off;
      const bool up_ok = up <= k_hi;
      if (up_ok && order[up].first < order[up + 1].first) {
        chosen = up;
        break;
      }
      const bool down_ok = off > 0 && k_star >= off && k_star - off >= k_lo;
      if (down_ok && order[k_star - off].first < order[k_star - off + 1].first) {
        chosen = k_star - off;
        break;
      }
      if (!up_ok && !down_ok && off > 0) break;
    }
    if (chosen >= m) {
      ++out.degenerate_stops;
      return make_leaf();
    }

    const double threshold = 0.5 * (order[chosen].first + order[chosen + 1].first);
    const double left_mass = prefix[chosen];
    const double right_mass = mass - left_mass;
    out.min_child_fraction = std::min(out.min_child_fraction, std::min(left_mass, right_mass) / mass);
    ++out.split_count;

    std::vector<std::size_t> left_members, right_members;
    left_members.reserve(chosen + 1);
    right_members.reserve(m - chosen - 1);
    for (std::size_t k = 0; k <= chosen; ++k) left_members.push_back(order[k].second);
    for (std::size_t k = chosen + 1; k < m; ++k) right_members.push_back(order[k].second);
    members = std::vector<std::size_t>();  // release before recursing

    const int node = tree.add_internal(static_cast<int>(feature), threshold);
    ++counts[feature];

    const double saved_upper = upper[feature];
    upper[feature] = threshold;
    const int left = self(self, left_members, left_mass, depth + 1);
    upper[feature] = saved_upper;

    const double saved_lower = lower[feature];
    lower[feature] = threshold;
    const int right = self(self, right_members, right_mass, depth + 1);
    lower[feature] = saved_lower;

    --counts[feature];
    tree.set_children(node, left, right);
    return node;
  };

  grow(grow, support, total, 0);
  out.tree = std::move(tree);
  return out;
}

}  // namespace honest_forest
