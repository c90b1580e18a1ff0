#include "honest_forest/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "honest_forest/parallel.hpp"

namespace honest_forest {

namespace {

struct SplitSizes {
  std::size_t n_i;
  std::size_t n_j;
};

SplitSizes split_sizes(std::size_t n, double ratio) {
  const std::size_t n_i = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(n)));
  return SplitSizes{n_i, n - n_i};
}

std::string format_p(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", p);
  return buf;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_and_se(const std::vector<double>& v) {
  MeanSe out;
  if (v.empty()) return out;
  const double n = static_cast<double>(v.size());
  out.mean = pairwise_sum(v) / n;
  if (v.size() > 1) {
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double c = v[i] - out.mean;
      sq[i] = c * c;
    }
    const double var = pairwise_sum(sq) / (n - 1.0);
    out.se = std::sqrt(var / n);
  }
  return out;
}

double population_variance(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double mean = pairwise_sum(v) / static_cast<double>(v.size());
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double c = v[i] - mean;
    sq[i] = c * c;
  }
  return pairwise_sum(sq) / static_cast<double>(v.size());
}

// Type-7 quantile (linear interpolation between order statistics).
double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  if (lo + 1 >= v.size()) return v.back();
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

struct RepData {
  Dataset dataset;
  HonestPartition part;
  Matrix i_features;
  std::vector<double> i_responses;
  Matrix j_features;
};

RepData make_rep_data(const ExperimentConfig& cfg, std::size_t n, std::size_t n_index, std::size_t rep) {
  Rng rng(experiment_stream(cfg.master_seed, n_index, rep, 0, StreamRole::Data));
  RepData out;
  out.dataset = generate_dataset(cfg.truth, n, cfg.d, rng);
  out.part = honest_split(n, cfg.honest_ratio, rng);
  out.i_features = gather_rows(out.dataset.features, out.part.i_indices);
  out.i_responses = gather(out.dataset.responses, out.part.i_indices);
  out.j_features = gather_rows(out.dataset.features, out.part.j_indices);
  return out;
}

struct TreeBundle {
  Tree tree;
  std::vector<double> i_weights;  // empty when unweighted
  double i_mean = 1.0;

  TreeBundle() : tree(Tree::single_leaf(1)) {}

  PredictionSample sample(const Matrix& i_features, const std::vector<double>& i_responses) const {
    PredictionSample s;
    s.features = &i_features;
    s.responses = &i_responses;
    s.weights = i_weights.empty() ? nullptr : &i_weights;
    s.mean_w = i_mean;
    return s;
  }
};

// Grows one tree for a replication. J-weights are drawn only for the
// adaptive splitter (non-adaptive growth never looks at data) and enter as
// unit-mean adjusted weights; I-weights are drawn whenever bootstrapping.
TreeBundle grow_tree_bundle(const ExperimentConfig& cfg, const RepData& rep_data, std::size_t n_index,
                            std::size_t rep, std::size_t tree_index) {
  const std::size_t n_i = rep_data.i_features.rows();
  const std::size_t n_j = rep_data.j_features.rows();
  const std::uint64_t theta =
      experiment_stream(cfg.master_seed, n_index, rep, tree_index, StreamRole::Theta);

  TreeBundle bundle;
  switch (cfg.splitter.kind) {
    case SplitterKind::Uniform:
      bundle.tree = grow_uniform(cfg.d, evaluate_schedule(cfg.splitter.schedule, n_i), theta);
      break;
    case SplitterKind::Centered:
      bundle.tree = grow_centered(cfg.d, cfg.splitter.feature_probs,
                                  evaluate_schedule(cfg.splitter.schedule, n_i), theta);
      break;
    case SplitterKind::ModifiedCentered:
      bundle.tree = grow_modified_centered(cfg.d, cfg.splitter.rotation_periods,
                                           evaluate_schedule(cfg.splitter.schedule, n_i), theta);
      break;
    case SplitterKind::RegularAdaptive: {
      std::vector<double> j_weights(n_j, 1.0);
      if (cfg.bootstrap) {
        const WeightVector raw = draw_weights(
            cfg.bootstrap->j_scheme, n_j,
            experiment_stream(cfg.master_seed, n_index, rep, tree_index, StreamRole::JWeights));
        const double mean_j = analytic_moments(cfg.bootstrap->j_scheme, n_j).mean_w1;
        for (std::size_t i = 0; i < n_j; ++i) j_weights[i] = raw.w[i] / mean_j;
      }
      const long k_n = evaluate_schedule(cfg.splitter.schedule, n_i);
      AdaptiveGrowth growth = grow_regular_adaptive(rep_data.j_features, j_weights,
                                                    cfg.splitter.adaptive, k_n, n_i, theta);
      bundle.tree = std::move(growth.tree);
      break;
    }
  }

  if (cfg.bootstrap) {
    const WeightVector wv = draw_weights(
        cfg.bootstrap->i_scheme, n_i,
        experiment_stream(cfg.master_seed, n_index, rep, tree_index, StreamRole::IWeights));
    bundle.i_weights = wv.w;
    bundle.i_mean = analytic_moments(cfg.bootstrap->i_scheme, n_i).mean_w1;
  }
  return bundle;
}

void validate_common(const ExperimentConfig& cfg) { cfg.validate(); }

void append_query_row(ConvergenceReport& report, const ExperimentConfig& cfg, const std::string& metric,
                      long long n, int query_id, double value, double se, double empty_rate,
                      long long reps) {
  ReportRow row;
  row.metric = metric;
  row.n = n;
  row.query_id = query_id;
  if (query_id >= 0) row.x = cfg.query_points[static_cast<std::size_t>(query_id)];
  row.value = value;
  row.std_err = se;
  row.empty_rate = empty_rate;
  row.replications = reps;
  report.rows.push_back(std::move(row));
}

struct TracePool {
  std::vector<std::vector<double>> side_lengths;  // per coordinate
  std::vector<std::vector<double>> balance;       // per coordinate
  std::vector<double> leaf_mass;
  std::vector<double> min_volume;

  explicit TracePool(std::size_t d) : side_lengths(d), balance(d) {}

  void add(const AssumptionTrace& trace) {
    for (std::size_t j = 0; j < side_lengths.size(); ++j) {
      side_lengths[j].push_back(trace.side_lengths[j]);
      balance[j].push_back(trace.balance_fractions[j]);
    }
    leaf_mass.push_back(trace.leaf_mass);
    min_volume.push_back(trace.min_volume);
  }

  void emit(ConvergenceReport& report, const ExperimentConfig& cfg, long long n, long long reps) {
    if (leaf_mass.empty()) return;
    auto put = [&](const std::string& metric, const std::vector<double>& pool, double q) {
      append_query_row(report, cfg, metric, n, -1, quantile(pool, q), 0.0, 0.0, reps);
    };
    for (std::size_t j = 0; j < side_lengths.size(); ++j) {
      const std::string cj = "_c" + std::to_string(j);
      put("trace_side_len_med" + cj, side_lengths[j], 0.5);
      put("trace_side_len_q90" + cj, side_lengths[j], 0.9);
      put("trace_balance_med" + cj, balance[j], 0.5);
      put("trace_balance_q90" + cj, balance[j], 0.9);
    }
    put("trace_leaf_mass_med", leaf_mass, 0.5);
    put("trace_leaf_mass_q90", leaf_mass, 0.9);
    put("trace_min_volume_med", min_volume, 0.5);
    put("trace_min_volume_q90", min_volume, 0.9);
  }
};

}  // namespace

std::uint64_t experiment_stream(std::uint64_t master_seed, std::size_t n_index, std::size_t replication,
                                std::size_t tree_index, StreamRole role) {
  return derive_stream(master_seed, {static_cast<std::uint64_t>(n_index),
                                     static_cast<std::uint64_t>(replication),
                                     static_cast<std::uint64_t>(tree_index),
                                     static_cast<std::uint64_t>(role)});
}

std::vector<std::vector<double>> evaluation_grid(std::size_t d, std::size_t resolution) {
  std::vector<double> axis(resolution);
  for (std::size_t i = 0; i < resolution; ++i) {
    axis[i] = (2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(resolution));
  }
  std::size_t total = 1;
  for (std::size_t j = 0; j < d; ++j) total *= resolution;
  std::vector<std::vector<double>> grid;
  grid.reserve(total);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t g = 0; g < total; ++g) {
    std::vector<double> point(d);
    for (std::size_t j = 0; j < d; ++j) point[j] = axis[idx[j]];
    grid.push_back(std::move(point));
    for (std::size_t j = d; j-- > 0;) {
      if (++idx[j] < resolution) break;
      idx[j] = 0;
    }
  }
  return grid;
}

double trend_fraction(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  std::size_t down = 0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    if (values[i + 1] < values[i]) ++down;
  }
  return static_cast<double>(down) / static_cast<double>(values.size() - 1);
}

void ExperimentConfig::validate() const {
  if (d < 1 || d > 8) throw ConfigError("d", "dimension must lie in [1, 8]");
  try {
    truth.validate(d);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("truth", e.what());
  }
  try {
    splitter.validate(d);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("splitter", e.what());
  }
  if (!(honest_ratio > 0.0 && honest_ratio < 1.0)) {
    throw ConfigError("honest_ratio", "must lie in (0, 1)");
  }
  if (n_grid.empty()) throw ConfigError("n_grid", "must not be empty");
  for (std::size_t i = 0; i + 1 < n_grid.size(); ++i) {
    if (n_grid[i] >= n_grid[i + 1]) throw ConfigError("n_grid", "must be strictly ascending");
  }
  for (std::size_t n : n_grid) {
    const SplitSizes sizes = split_sizes(n, honest_ratio);
    if (sizes.n_i < 2 || sizes.n_j < 2) {
      throw ConfigError("n_grid", "each n must leave at least 2 observations in both honest parts");
    }
    try {
      evaluate_schedule(splitter.schedule, sizes.n_i);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("splitter.schedule", e.what());
    }
    if (bootstrap) {
      try {
        bootstrap->i_scheme.validate(sizes.n_i);
        bootstrap->j_scheme.validate(sizes.n_j);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("bootstrap", e.what());
      }
    }
  }
  if (replications < 1) throw ConfigError("replications", "must be >= 1");
  for (const auto& q : query_points) {
    if (q.size() != d) throw ConfigError("query_points", "each point must have length d");
    for (double v : q) {
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("query_points", "coordinates must lie in [0,1]");
    }
  }
  switch (mode) {
    case ExperimentMode::Pointwise:
    case ExperimentMode::Lp:
    case ExperimentMode::NestedPath:
      if (query_points.empty()) throw ConfigError("query_points", "at least one query point required");
      break;
    case ExperimentMode::Uniform:
    case ExperimentMode::Forest:
      break;
  }
  if (mode == ExperimentMode::Lp) {
    if (p_norms.empty()) throw ConfigError("p_norms", "at least one p required");
    for (double p : p_norms) {
      if (!(p >= 1.0)) throw ConfigError("p_norms", "each p must be >= 1");
    }
  }
  if (mode == ExperimentMode::Uniform) {
    if (sup_grid_resolution < 2) throw ConfigError("sup_grid_resolution", "must be >= 2");
    double total = 1.0;
    for (std::size_t j = 0; j < d; ++j) total *= static_cast<double>(sup_grid_resolution);
    if (total > 1048576.0) throw ConfigError("sup_grid_resolution", "grid too large (max 2^20 points)");
  }
  if (mode == ExperimentMode::NestedPath && !nested_path) {
    throw ConfigError("nested_path", "nested-path experiments require the nested_path flag");
  }
  if (mode == ExperimentMode::Forest) {
    if (!bootstrap) throw ConfigError("bootstrap", "forest experiments require bootstrap schemes");
    if (forest_size < 1) throw ConfigError("forest_size", "must be >= 1");
  }
}

const ReportRow* ConvergenceReport::find(const std::string& metric, long long n, int query_id) const {
  for (const ReportRow& row : rows) {
    if (row.n == n && row.query_id == query_id && row.metric == metric) return &row;
  }
  return nullptr;
}

double ConvergenceReport::value(const std::string& metric, long long n, int query_id) const {
  const ReportRow* row = find(metric, n, query_id);
  if (!row) {
    throw std::out_of_range("ConvergenceReport: missing row " + metric + " at n=" + std::to_string(n) +
                            " query=" + std::to_string(query_id));
  }
  return row->value;
}

namespace {

struct SingleRep {
  std::vector<std::optional<double>> pred;  // per query
  std::vector<AssumptionTrace> traces;      // per query, pointwise mode only
};

SingleRep run_single_rep(const ExperimentConfig& cfg, std::size_t n, std::size_t n_index,
                         std::size_t rep, bool want_traces) {
  const RepData data = make_rep_data(cfg, n, n_index, rep);
  const TreeBundle bundle = grow_tree_bundle(cfg, data, n_index, rep, 0);
  const PredictionSample sample = bundle.sample(data.i_features, data.i_responses);

  SingleRep out;
  out.pred.reserve(cfg.query_points.size());
  std::optional<SortedCoordinates> sorted;
  if (want_traces) sorted.emplace(data.i_features, sample.weights);
  for (const auto& x : cfg.query_points) {
    out.pred.push_back(tree_predict(bundle.tree, sample, x).value);
    if (want_traces) out.traces.push_back(trace_assumptions(bundle.tree, sample, *sorted, x));
  }
  return out;
}

// Shared engine for the pointwise and Lp experiments.
ConvergenceReport run_query_experiment(const ExperimentConfig& cfg, unsigned threads, bool lp_mode) {
  validate_common(cfg);
  if (cfg.query_points.empty()) {
    throw ConfigError("query_points", "at least one query point required");
  }
  if (lp_mode) {
    if (cfg.p_norms.empty()) throw ConfigError("p_norms", "at least one p required");
    for (double p : cfg.p_norms) {
      if (!(p >= 1.0)) throw ConfigError("p_norms", "each p must be >= 1");
    }
  }

  ConvergenceReport report;
  report.mode = lp_mode ? "lp" : "pointwise";
  report.dimension = cfg.d;
  const std::size_t queries = cfg.query_points.size();
  const long long reps = static_cast<long long>(cfg.replications);

  std::vector<double> truth_at(queries);
  for (std::size_t q = 0; q < queries; ++q) truth_at[q] = cfg.truth.regression(cfg.query_points[q]);

  // trend_values[q] (pointwise: MSE) or [q * P + p] (lp)
  std::vector<std::vector<double>> trend_values(lp_mode ? queries * cfg.p_norms.size() : queries);

  for (std::size_t n_index = 0; n_index < cfg.n_grid.size(); ++n_index) {
    const std::size_t n = cfg.n_grid[n_index];
    std::vector<SingleRep> slots(cfg.replications);
    parallel_for(cfg.replications, threads, [&](std::size_t rep) {
      slots[rep] = run_single_rep(cfg, n, n_index, rep, !lp_mode);
    });

    TracePool traces(cfg.d);
    for (std::size_t q = 0; q < queries; ++q) {
      std::vector<double> errors;
      errors.reserve(cfg.replications);
      std::size_t empties = 0;
      for (const SingleRep& slot : slots) {
        if (slot.pred[q]) {
          errors.push_back(*slot.pred[q] - truth_at[q]);
        } else {
          ++empties;
        }
      }
      const double empty_rate = static_cast<double>(empties) / static_cast<double>(cfg.replications);
      const long long nn = static_cast<long long>(n);
      const int qid = static_cast<int>(q);

      if (!lp_mode) {
        std::vector<double> sq(errors.size());
        for (std::size_t i = 0; i < errors.size(); ++i) sq[i] = errors[i] * errors[i];
        const MeanSe err = mean_and_se(errors);
        const MeanSe mse = mean_and_se(sq);
        append_query_row(report, cfg, "mean_error", nn, qid, err.mean, err.se, empty_rate, reps);
        append_query_row(report, cfg, "mse", nn, qid, mse.mean, mse.se, empty_rate, reps);
        append_query_row(report, cfg, "variance", nn, qid, population_variance(errors), 0.0,
                         empty_rate, reps);
        trend_values[q].push_back(mse.mean);
      } else {
        for (std::size_t pi = 0; pi < cfg.p_norms.size(); ++pi) {
          const double p = cfg.p_norms[pi];
          std::vector<double> powered(errors.size());
          for (std::size_t i = 0; i < errors.size(); ++i) {
            powered[i] = std::pow(std::abs(errors[i]), p);
          }
          const MeanSe lp = mean_and_se(powered);
          append_query_row(report, cfg, "lp_p" + format_p(p), nn, qid, lp.mean, lp.se, empty_rate,
                           reps);
          trend_values[q * cfg.p_norms.size() + pi].push_back(lp.mean);
        }
      }
    }
    if (!lp_mode) {
      for (const SingleRep& slot : slots) {
        for (const AssumptionTrace& trace : slot.traces) traces.add(trace);
      }
      traces.emit(report, cfg, static_cast<long long>(n), reps);
    }
  }

  for (std::size_t q = 0; q < queries; ++q) {
    if (!lp_mode) {
      append_query_row(report, cfg, "trend_mse", 0, static_cast<int>(q),
                       trend_fraction(trend_values[q]), 0.0, 0.0, reps);
    } else {
      for (std::size_t pi = 0; pi < cfg.p_norms.size(); ++pi) {
        append_query_row(report, cfg, "trend_lp_p" + format_p(cfg.p_norms[pi]), 0,
                         static_cast<int>(q), trend_fraction(trend_values[q * cfg.p_norms.size() + pi]),
                         0.0, 0.0, reps);
      }
    }
  }
  return report;
}

}  // namespace

ConvergenceReport run_pointwise(const ExperimentConfig& cfg, unsigned threads) {
  return run_query_experiment(cfg, threads, false);
}

ConvergenceReport run_lp(const ExperimentConfig& cfg, unsigned threads) {
  return run_query_experiment(cfg, threads, true);
}

namespace {

struct UniformRep {
  double sup_f = 0.0;
  double sup_m = 0.0;
  double min_volume = 0.0;
  std::vector<double> sup_sides;       // exact, leaf scan
  std::vector<double> grid_sup_sides;  // sides of leaves visited by the grid
};

UniformRep run_uniform_rep(const ExperimentConfig& cfg, std::size_t n, std::size_t n_index,
                           std::size_t rep, const std::vector<std::vector<double>>& grid) {
  const RepData data = make_rep_data(cfg, n, n_index, rep);
  const TreeBundle bundle = grow_tree_bundle(cfg, data, n_index, rep, 0);
  const Tree& tree = bundle.tree;
  const std::size_t n_i = data.i_features.rows();

  // Per-leaf weighted counts and response sums in one pass.
  std::vector<double> leaf_w(tree.leaf_count(), 0.0);
  std::vector<double> leaf_wy(tree.leaf_count(), 0.0);
  std::vector<double> x(cfg.d);
  for (std::size_t i = 0; i < n_i; ++i) {
    for (std::size_t j = 0; j < cfg.d; ++j) x[j] = data.i_features(i, j);
    const double w = bundle.i_weights.empty() ? 1.0 : bundle.i_weights[i];
    if (w == 0.0) continue;
    const std::size_t leaf = tree.leaf_index_of(x);
    leaf_w[leaf] += w;
    leaf_wy[leaf] += w * data.i_responses[i];
  }

  const double scale = static_cast<double>(n_i) * bundle.i_mean;
  std::vector<double> leaf_f(tree.leaf_count());
  std::vector<double> leaf_m(tree.leaf_count());
  for (std::size_t l = 0; l < tree.leaf_count(); ++l) {
    const double volume = tree.leaf(l).cell.volume();
    leaf_f[l] = leaf_w[l] / (scale * volume);
    leaf_m[l] = leaf_w[l] > 0.0 ? (leaf_wy[l] / leaf_w[l]) * leaf_f[l] : 0.0;
  }

  UniformRep out;
  out.min_volume = tree.min_leaf_volume();
  out.sup_sides.resize(cfg.d);
  for (std::size_t j = 0; j < cfg.d; ++j) out.sup_sides[j] = tree.max_side_length(j);
  out.grid_sup_sides.assign(cfg.d, 0.0);

  for (const auto& point : grid) {
    const std::size_t leaf = tree.leaf_index_of(point);
    const double f_true = cfg.truth.density(point);
    const double m_true = cfg.truth.regression(point) * f_true;
    out.sup_f = std::max(out.sup_f, std::abs(leaf_f[leaf] - f_true));
    out.sup_m = std::max(out.sup_m, std::abs(leaf_m[leaf] - m_true));
    for (std::size_t j = 0; j < cfg.d; ++j) {
      out.grid_sup_sides[j] = std::max(out.grid_sup_sides[j], tree.leaf(leaf).cell.side(j));
    }
  }
  return out;
}

}  // namespace

ConvergenceReport run_uniform(const ExperimentConfig& cfg, unsigned threads) {
  validate_common(cfg);
  if (cfg.sup_grid_resolution < 2) throw ConfigError("sup_grid_resolution", "must be >= 2");

  ConvergenceReport report;
  report.mode = "uniform";
  report.dimension = cfg.d;
  const long long reps = static_cast<long long>(cfg.replications);
  const auto grid = evaluation_grid(cfg.d, cfg.sup_grid_resolution);

  std::vector<double> trend_f, trend_m;
  for (std::size_t n_index = 0; n_index < cfg.n_grid.size(); ++n_index) {
    const std::size_t n = cfg.n_grid[n_index];
    std::vector<UniformRep> slots(cfg.replications);
    parallel_for(cfg.replications, threads, [&](std::size_t rep) {
      slots[rep] = run_uniform_rep(cfg, n, n_index, rep, grid);
    });

    auto collect = [&](auto&& get) {
      std::vector<double> v(cfg.replications);
      for (std::size_t r = 0; r < cfg.replications; ++r) v[r] = get(slots[r]);
      return v;
    };
    const long long nn = static_cast<long long>(n);
    const MeanSe sup_f = mean_and_se(collect([](const UniformRep& r) { return r.sup_f; }));
    const MeanSe sup_m = mean_and_se(collect([](const UniformRep& r) { return r.sup_m; }));
    const MeanSe min_vol = mean_and_se(collect([](const UniformRep& r) { return r.min_volume; }));
    append_query_row(report, cfg, "sup_f_error", nn, -1, sup_f.mean, sup_f.se, 0.0, reps);
    append_query_row(report, cfg, "sup_m_error", nn, -1, sup_m.mean, sup_m.se, 0.0, reps);
    append_query_row(report, cfg, "min_leaf_volume", nn, -1, min_vol.mean, min_vol.se, 0.0, reps);
    for (std::size_t j = 0; j < cfg.d; ++j) {
      const MeanSe side =
          mean_and_se(collect([j](const UniformRep& r) { return r.sup_sides[j]; }));
      const MeanSe grid_side =
          mean_and_se(collect([j](const UniformRep& r) { return r.grid_sup_sides[j]; }));
      append_query_row(report, cfg, "sup_side_len_c" + std::to_string(j), nn, -1, side.mean, side.se,
                       0.0, reps);
      append_query_row(report, cfg, "grid_sup_side_len_c" + std::to_string(j), nn, -1,
                       grid_side.mean, grid_side.se, 0.0, reps);
    }
    trend_f.push_back(sup_f.mean);
    trend_m.push_back(sup_m.mean);
  }
  append_query_row(report, cfg, "trend_sup_f_error", 0, -1, trend_fraction(trend_f), 0.0, 0.0, reps);
  append_query_row(report, cfg, "trend_sup_m_error", 0, -1, trend_fraction(trend_m), 0.0, 0.0, reps);
  return report;
}

namespace {

struct PathRep {
  // preds[n_index][query]
  std::vector<std::vector<std::optional<double>>> preds;
};

PathRep run_path_rep(const ExperimentConfig& cfg, std::size_t rep) {
  const std::size_t n_max = cfg.n_grid.back();

  // One growing sample path per replication: observation t joins I exactly
  // when ceil(ratio * t) ticks up, so every prefix has the deterministic
  // honest sizes and the parts are nested across the grid.
  Rng data_rng(experiment_stream(cfg.master_seed, 0, rep, 0, StreamRole::Data));
  const Dataset full = generate_dataset(cfg.truth, n_max, cfg.d, data_rng);
  std::vector<bool> to_i(n_max);
  std::size_t i_count = 0;
  for (std::size_t t = 1; t <= n_max; ++t) {
    const std::size_t target =
        static_cast<std::size_t>(std::ceil(cfg.honest_ratio * static_cast<double>(t)));
    to_i[t - 1] = target > i_count;
    if (to_i[t - 1]) ++i_count;
  }

  const std::uint64_t path_theta = experiment_stream(cfg.master_seed, 0, rep, 0, StreamRole::Theta);

  PathRep out;
  out.preds.resize(cfg.n_grid.size());
  for (std::size_t n_index = 0; n_index < cfg.n_grid.size(); ++n_index) {
    const std::size_t n = cfg.n_grid[n_index];
    RepData data;
    data.part.i_indices.clear();
    data.part.j_indices.clear();
    for (std::size_t t = 0; t < n; ++t) {
      (to_i[t] ? data.part.i_indices : data.part.j_indices).push_back(t);
    }
    data.i_features = gather_rows(full.features, data.part.i_indices);
    data.i_responses = gather(full.responses, data.part.i_indices);
    data.j_features = gather_rows(full.features, data.part.j_indices);

    const std::size_t n_i = data.i_features.rows();
    const std::size_t n_j = data.j_features.rows();

    TreeBundle bundle;
    switch (cfg.splitter.kind) {
      case SplitterKind::Uniform:
        bundle.tree = grow_uniform(cfg.d, evaluate_schedule(cfg.splitter.schedule, n_i), path_theta);
        break;
      case SplitterKind::Centered:
        bundle.tree = grow_centered(cfg.d, cfg.splitter.feature_probs,
                                    evaluate_schedule(cfg.splitter.schedule, n_i), path_theta);
        break;
      case SplitterKind::ModifiedCentered:
        bundle.tree = grow_modified_centered(cfg.d, cfg.splitter.rotation_periods,
                                             evaluate_schedule(cfg.splitter.schedule, n_i), path_theta);
        break;
      case SplitterKind::RegularAdaptive: {
        std::vector<double> j_weights(n_j, 1.0);
        if (cfg.bootstrap) {
          const WeightVector raw = draw_weights(
              cfg.bootstrap->j_scheme, n_j,
              experiment_stream(cfg.master_seed, n_index, rep, 0, StreamRole::JWeights));
          const double mean_j = analytic_moments(cfg.bootstrap->j_scheme, n_j).mean_w1;
          for (std::size_t i = 0; i < n_j; ++i) j_weights[i] = raw.w[i] / mean_j;
        }
        const long k_n = evaluate_schedule(cfg.splitter.schedule, n_i);
        AdaptiveGrowth growth = grow_regular_adaptive(data.j_features, j_weights,
                                                      cfg.splitter.adaptive, k_n, n_i, path_theta);
        bundle.tree = std::move(growth.tree);
        break;
      }
    }
    if (cfg.bootstrap) {
      const WeightVector wv = draw_weights(
          cfg.bootstrap->i_scheme, n_i,
          experiment_stream(cfg.master_seed, n_index, rep, 0, StreamRole::IWeights));
      bundle.i_weights = wv.w;
      bundle.i_mean = analytic_moments(cfg.bootstrap->i_scheme, n_i).mean_w1;
    }

    const PredictionSample sample = bundle.sample(data.i_features, data.i_responses);
    out.preds[n_index].reserve(cfg.query_points.size());
    for (const auto& x : cfg.query_points) {
      out.preds[n_index].push_back(tree_predict(bundle.tree, sample, x).value);
    }
  }
  return out;
}

}  // namespace

ConvergenceReport run_nested_path(const ExperimentConfig& cfg, unsigned threads) {
  validate_common(cfg);
  if (!cfg.nested_path) {
    throw ConfigError("nested_path", "nested-path experiments require the nested_path flag");
  }
  if (cfg.query_points.empty()) {
    throw ConfigError("query_points", "at least one query point required");
  }

  ConvergenceReport report;
  report.mode = "nested";
  report.dimension = cfg.d;
  const long long reps = static_cast<long long>(cfg.replications);
  const std::size_t queries = cfg.query_points.size();

  std::vector<double> truth_at(queries);
  for (std::size_t q = 0; q < queries; ++q) truth_at[q] = cfg.truth.regression(cfg.query_points[q]);

  std::vector<PathRep> slots(cfg.replications);
  parallel_for(cfg.replications, threads, [&](std::size_t rep) { slots[rep] = run_path_rep(cfg, rep); });

  for (std::size_t n_index = 0; n_index < cfg.n_grid.size(); ++n_index) {
    for (std::size_t q = 0; q < queries; ++q) {
      std::vector<double> abs_errors;
      std::size_t empties = 0;
      for (const PathRep& path : slots) {
        if (path.preds[n_index][q]) {
          abs_errors.push_back(std::abs(*path.preds[n_index][q] - truth_at[q]));
        } else {
          ++empties;
        }
      }
      const MeanSe err = mean_and_se(abs_errors);
      append_query_row(report, cfg, "path_abs_error", static_cast<long long>(cfg.n_grid[n_index]),
                       static_cast<int>(q), err.mean, err.se,
                       static_cast<double>(empties) / static_cast<double>(cfg.replications), reps);
    }
  }

  for (std::size_t q = 0; q < queries; ++q) {
    std::size_t improved = 0, comparable = 0;
    for (const PathRep& path : slots) {
      const auto& first = path.preds.front()[q];
      const auto& last = path.preds.back()[q];
      if (first && last) {
        ++comparable;
        if (std::abs(*last - truth_at[q]) < std::abs(*first - truth_at[q])) ++improved;
      }
    }
    const double fraction =
        comparable == 0 ? 0.0 : static_cast<double>(improved) / static_cast<double>(comparable);
    append_query_row(report, cfg, "path_improve_fraction", 0, static_cast<int>(q), fraction, 0.0, 0.0,
                     reps);
  }
  return report;
}

namespace {

struct ForestRep {
  std::vector<std::optional<double>> forest_pred;            // per query
  std::vector<std::vector<std::optional<double>>> tree_pred;  // [query][tree]
  std::size_t empty_tree_events = 0;                          // over queries x trees
};

ForestRep run_forest_rep(const ExperimentConfig& cfg, std::size_t n, std::size_t n_index,
                         std::size_t rep) {
  const RepData data = make_rep_data(cfg, n, n_index, rep);
  std::vector<TreeBundle> bundles;
  bundles.reserve(cfg.forest_size);
  for (std::size_t b = 0; b < cfg.forest_size; ++b) {
    bundles.push_back(grow_tree_bundle(cfg, data, n_index, rep, b));
  }

  ForestRep out;
  const std::size_t queries = cfg.query_points.size();
  out.forest_pred.resize(queries);
  out.tree_pred.assign(queries, std::vector<std::optional<double>>(cfg.forest_size));
  for (std::size_t q = 0; q < queries; ++q) {
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t b = 0; b < cfg.forest_size; ++b) {
      const PredictionSample sample = bundles[b].sample(data.i_features, data.i_responses);
      const Prediction pred = tree_predict(bundles[b].tree, sample, cfg.query_points[q]);
      out.tree_pred[q][b] = pred.value;
      if (pred.value) {
        sum += *pred.value;
        ++used;
      } else {
        ++out.empty_tree_events;
      }
    }
    if (used > 0) out.forest_pred[q] = sum / static_cast<double>(used);
  }
  return out;
}

}  // namespace

ConvergenceReport run_forest(const ExperimentConfig& cfg, unsigned threads) {
  validate_common(cfg);
  if (!cfg.bootstrap) throw ConfigError("bootstrap", "forest experiments require bootstrap schemes");
  if (cfg.forest_size < 1) throw ConfigError("forest_size", "must be >= 1");
  if (cfg.query_points.empty()) {
    throw ConfigError("query_points", "at least one query point required");
  }

  ConvergenceReport report;
  report.mode = "forest";
  report.dimension = cfg.d;
  const long long reps = static_cast<long long>(cfg.replications);
  const std::size_t queries = cfg.query_points.size();

  std::vector<double> truth_at(queries);
  for (std::size_t q = 0; q < queries; ++q) truth_at[q] = cfg.truth.regression(cfg.query_points[q]);

  std::vector<std::vector<double>> trend(queries);
  for (std::size_t n_index = 0; n_index < cfg.n_grid.size(); ++n_index) {
    const std::size_t n = cfg.n_grid[n_index];
    std::vector<ForestRep> slots(cfg.replications);
    parallel_for(cfg.replications, threads, [&](std::size_t rep) {
      slots[rep] = run_forest_rep(cfg, n, n_index, rep);
    });

    std::size_t empty_tree_events = 0;
    for (const ForestRep& slot : slots) empty_tree_events += slot.empty_tree_events;
    const double tree_empty_rate =
        static_cast<double>(empty_tree_events) /
        static_cast<double>(cfg.replications * cfg.forest_size * queries);

    for (std::size_t q = 0; q < queries; ++q) {
      std::vector<double> forest_preds, forest_sq_errors, forest_errors;
      std::size_t forest_empty = 0;
      for (const ForestRep& slot : slots) {
        if (slot.forest_pred[q]) {
          const double e = *slot.forest_pred[q] - truth_at[q];
          forest_preds.push_back(*slot.forest_pred[q]);
          forest_errors.push_back(e);
          forest_sq_errors.push_back(e * e);
        } else {
          ++forest_empty;
        }
      }
      std::vector<double> tree_preds, tree_sq_errors;
      for (const ForestRep& slot : slots) {
        for (const auto& pred : slot.tree_pred[q]) {
          if (pred) {
            const double e = *pred - truth_at[q];
            tree_preds.push_back(*pred);
            tree_sq_errors.push_back(e * e);
          }
        }
      }

      const long long nn = static_cast<long long>(n);
      const int qid = static_cast<int>(q);
      const MeanSe fmse = mean_and_se(forest_sq_errors);
      const MeanSe ferr = mean_and_se(forest_errors);
      const MeanSe tmse = mean_and_se(tree_sq_errors);
      append_query_row(report, cfg, "forest_mse", nn, qid, fmse.mean, fmse.se, tree_empty_rate, reps);
      append_query_row(report, cfg, "forest_mean_error", nn, qid, ferr.mean, ferr.se, tree_empty_rate,
                       reps);
      append_query_row(report, cfg, "forest_variance", nn, qid, population_variance(forest_preds), 0.0,
                       tree_empty_rate, reps);
      append_query_row(report, cfg, "tree_mse", nn, qid, tmse.mean, tmse.se, tree_empty_rate, reps);
      append_query_row(report, cfg, "tree_variance", nn, qid, population_variance(tree_preds), 0.0,
                       tree_empty_rate, reps);
      append_query_row(report, cfg, "forest_empty_rate", nn, qid,
                       static_cast<double>(forest_empty) / static_cast<double>(cfg.replications), 0.0,
                       tree_empty_rate, reps);
      trend[q].push_back(fmse.mean);
    }
  }
  for (std::size_t q = 0; q < queries; ++q) {
    append_query_row(report, cfg, "trend_forest_mse", 0, static_cast<int>(q),
                     trend_fraction(trend[q]), 0.0, 0.0, reps);
  }
  return report;
}

ConvergenceReport run_experiment(const ExperimentConfig& cfg, unsigned threads) {
  switch (cfg.mode) {
    case ExperimentMode::Pointwise:
      return run_pointwise(cfg, threads);
    case ExperimentMode::Uniform:
      return run_uniform(cfg, threads);
    case ExperimentMode::Lp:
      return run_lp(cfg, threads);
    case ExperimentMode::NestedPath:
      return run_nested_path(cfg, threads);
    case ExperimentMode::Forest:
      return run_forest(cfg, threads);
  }
  throw std::invalid_argument("run_experiment: unknown mode");
}

}  // namespace honest_forest
