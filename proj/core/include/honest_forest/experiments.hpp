#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "honest_forest/bootstrap.hpp"
#include "honest_forest/data.hpp"
#include "honest_forest/diagnostics.hpp"
#include "honest_forest/estimators.hpp"
#include "honest_forest/splitters.hpp"

namespace honest_forest {

enum class ExperimentMode { Pointwise, Uniform, Lp, NestedPath, Forest };

struct BootstrapConfig {
  WeightScheme i_scheme;
  WeightScheme j_scheme;
};

// Configuration error carrying the offending field name.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::Pointwise;
  std::size_t d = 1;
  TruthDescriptor truth;
  SplitterConfig splitter;
  double honest_ratio = 0.5;
  std::optional<BootstrapConfig> bootstrap;
  std::vector<std::size_t> n_grid;
  std::size_t replications = 1;
  std::vector<std::vector<double>> query_points;
  std::size_t sup_grid_resolution = 17;  // Uniform mode, points per axis
  std::vector<double> p_norms;           // Lp mode
  std::size_t forest_size = 1;           // Forest mode
  bool nested_path = false;
  std::uint64_t master_seed = 0;

  void validate() const;  // throws ConfigError
};

// One long-form result row. query_id is -1 for per-n rows without a query
// point; n is 0 for cross-n rows (trend verdicts, path summaries).
struct ReportRow {
  std::string metric;
  long long n = 0;
  int query_id = -1;
  std::vector<double> x;
  double value = 0.0;
  double std_err = 0.0;
  double empty_rate = 0.0;
  long long replications = 0;
};

struct ConvergenceReport {
  std::string mode;
  std::size_t dimension = 0;
  std::vector<ReportRow> rows;

  const ReportRow* find(const std::string& metric, long long n, int query_id) const;
  double value(const std::string& metric, long long n, int query_id) const;  // throws if missing
};

// RNG stream derivation: every random draw in an experiment comes from
// derive_stream(master_seed, {n_index, replication, tree_index, role}).
// The data stream covers dataset generation followed by the honest
// partition shuffle. Nested-path mode uses n_index 0 for its single
// growing data stream and for the path's theta stream.
enum class StreamRole : std::uint64_t { Data = 0, Theta = 1, IWeights = 2, JWeights = 3 };

std::uint64_t experiment_stream(std::uint64_t master_seed, std::size_t n_index,
                                std::size_t replication, std::size_t tree_index, StreamRole role);

// Deterministic interior evaluation grid: per axis the odd multiples of
// 1/(2 * resolution), crossed over d axes.
std::vector<std::vector<double>> evaluation_grid(std::size_t d, std::size_t resolution);

// Monte Carlo convergence experiments. `threads` caps the worker pool
// (0 = HONEST_FOREST_THREADS or hardware); outputs are identical for any
// cap >= 1.
ConvergenceReport run_pointwise(const ExperimentConfig& config, unsigned threads = 0);
ConvergenceReport run_uniform(const ExperimentConfig& config, unsigned threads = 0);
ConvergenceReport run_lp(const ExperimentConfig& config, unsigned threads = 0);
ConvergenceReport run_nested_path(const ExperimentConfig& config, unsigned threads = 0);
ConvergenceReport run_forest(const ExperimentConfig& config, unsigned threads = 0);

// Dispatch on config.mode.
ConvergenceReport run_experiment(const ExperimentConfig& config, unsigned threads = 0);

// Fraction of adjacent pairs in `values` that strictly decrease; the
// desk-scale trend verdict. Empty or singleton input yields 0.
double trend_fraction(const std::vector<double>& values);

}  // namespace honest_forest
