#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "honest_forest/experiments.hpp"
#include "honest_forest/report_io.hpp"

using namespace honest_forest;

namespace {

ExperimentConfig base_config() {
  ExperimentConfig cfg;
  cfg.mode = ExperimentMode::Pointwise;
  cfg.d = 2;
  cfg.splitter.kind = SplitterKind::Centered;
  cfg.splitter.feature_probs = {0.5, 0.5};
  cfg.splitter.schedule = {ScheduleKind::Log2PowerDepth, 0.5};
  cfg.honest_ratio = 0.5;
  cfg.n_grid = {256, 512, 1024};
  cfg.replications = 24;
  cfg.query_points = {{0.31, 0.57}};
  cfg.master_seed = 20240;
  return cfg;
}

}  // namespace

TEST_CASE("noiseless zero regression has exactly zero error everywhere") {
  ExperimentConfig cfg = base_config();
  cfg.replications = 8;
  const ConvergenceReport report = run_pointwise(cfg, 2);
  for (std::size_t n : cfg.n_grid) {
    CHECK(report.value("mse", static_cast<long long>(n), 0) == 0.0);
    CHECK(report.value("mean_error", static_cast<long long>(n), 0) == 0.0);
    const ReportRow* row = report.find("mse", static_cast<long long>(n), 0);
    REQUIRE(row != nullptr);
    CHECK(row->empty_rate == 0.0);
  }

  ExperimentConfig lp = cfg;
  lp.mode = ExperimentMode::Lp;
  lp.p_norms = {1.0};
  const ConvergenceReport lp_report = run_lp(lp, 2);
  CHECK(lp_report.value("lp_p1", 256, 0) == 0.0);

  ExperimentConfig nested = cfg;
  nested.mode = ExperimentMode::NestedPath;
  nested.nested_path = true;
  const ConvergenceReport nested_report = run_nested_path(nested, 2);
  CHECK(nested_report.value("path_abs_error", 256, 0) == 0.0);
}

TEST_CASE("reports are byte-identical across runs and thread counts") {
  ExperimentConfig cfg = base_config();
  cfg.truth.noise_kind = NoiseKind::Gaussian;
  cfg.truth.noise_sigma = 0.5;
  cfg.truth.regression_kind = RegressionKind::SinusoidLinear;
  cfg.truth.freqs = {1.0, 0.0};
  cfg.truth.coeffs = {0.0, 1.0};
  cfg.replications = 10;

  const std::string once = report_to_csv(run_pointwise(cfg, 1));
  const std::string twice = report_to_csv(run_pointwise(cfg, 1));
  const std::string threaded = report_to_csv(run_pointwise(cfg, 2));
  const std::string threaded8 = report_to_csv(run_pointwise(cfg, 8));
  CHECK(once == twice);
  CHECK(once == threaded);
  CHECK(once == threaded8);
}

TEST_CASE("replication streams are independent slots") {
  ExperimentConfig cfg = base_config();
  cfg.truth.noise_kind = NoiseKind::Gaussian;
  cfg.truth.noise_sigma = 1.0;
  cfg.n_grid = {256};

  // Stream derivation is a pure function of the indices.
  CHECK(experiment_stream(1, 0, 3, 0, StreamRole::Data) ==
        experiment_stream(1, 0, 3, 0, StreamRole::Data));
  CHECK(experiment_stream(1, 0, 3, 0, StreamRole::Data) !=
        experiment_stream(1, 0, 4, 0, StreamRole::Data));
  CHECK(experiment_stream(1, 0, 3, 0, StreamRole::Data) !=
        experiment_stream(1, 0, 3, 0, StreamRole::Theta));

  // Each replication is a pure function of its own stream, so a
  // single-replication run reproduces itself exactly regardless of the
  // worker count, and extra replications never disturb replication 0.
  cfg.replications = 1;
  const ConvergenceReport one = run_pointwise(cfg, 1);
  cfg.replications = 5;
  const ConvergenceReport five = run_pointwise(cfg, 1);
  cfg.replications = 1;
  const ConvergenceReport one_again = run_pointwise(cfg, 2);
  CHECK(one.value("mean_error", 256, 0) == one_again.value("mean_error", 256, 0));
  CHECK(one.value("mse", 256, 0) != five.value("mse", 256, 0));
}

TEST_CASE("error decomposition reconciles") {
  ExperimentConfig cfg = base_config();
  cfg.truth.noise_kind = NoiseKind::Gaussian;
  cfg.truth.noise_sigma = 0.7;
  cfg.truth.regression_kind = RegressionKind::Linear;
  cfg.truth.coeffs = {1.0, -0.5};
  cfg.n_grid = {512};
  cfg.replications = 64;
  const ConvergenceReport report = run_pointwise(cfg, 2);
  const double mse = report.value("mse", 512, 0);
  const double bias = report.value("mean_error", 512, 0);
  const double variance = report.value("variance", 512, 0);
  CHECK(mse == doctest::Approx(bias * bias + variance).epsilon(1e-9));
}

TEST_CASE("assumption traces trend the right way for an admissible schedule") {
  ExperimentConfig cfg = base_config();
  cfg.truth.noise_kind = NoiseKind::Gaussian;
  cfg.truth.noise_sigma = 0.3;
  cfg.splitter.schedule = {ScheduleKind::Log2PowerDepth, 0.6};
  cfg.n_grid = {256, 1024, 4096, 16384};
  cfg.replications = 30;
  const ConvergenceReport report = run_pointwise(cfg, 2);

  std::vector<double> mass, side;
  for (std::size_t n : cfg.n_grid) {
    mass.push_back(report.value("trace_leaf_mass_med", static_cast<long long>(n), -1));
    side.push_back(report.value("trace_side_len_med_c0", static_cast<long long>(n), -1));
  }
  // Leaf mass grows, side lengths shrink: at least 0.8 of adjacent pairs.
  std::vector<double> neg_mass;
  for (double m : mass) neg_mass.push_back(-m);
  CHECK(trend_fraction(neg_mass) >= 0.8);
  CHECK(trend_fraction(side) >= 0.8);
}

TEST_CASE("lp errors obey the sample Jensen ordering") {
  ExperimentConfig cfg = base_config();
  cfg.mode = ExperimentMode::Lp;
  cfg.truth.noise_kind = NoiseKind::Gaussian;
  cfg.truth.noise_sigma = 1.0;
  cfg.p_norms = {1.0, 2.0};
  cfg.replications = 40;
  const ConvergenceReport report = run_lp(cfg, 2);
  for (std::size_t n : cfg.n_grid) {
    const double l1 = report.value("lp_p1", static_cast<long long>(n), 0);
    const double l2 = report.value("lp_p2", static_cast<long long>(n), 0);
    CHECK(l1 * l1 <= l2 + 1e-12);
  }
}

TEST_CASE("uniform experiment on a degenerate splitter is exact") {
  ExperimentConfig cfg = base_config();
  cfg.mode = ExperimentMode::Uniform;
  cfg.query_points.clear();
  cfg.sup_grid_resolution = 9;
  // Adaptive splitter whose threshold forces a root-only tree.
  cfg.splitter.kind = SplitterKind::RegularAdaptive;
  cfg.splitter.adaptive.alpha = 0.3;
  cfg.splitter.adaptive.feature_floor = {0.5, 0.5};
  cfg.splitter.schedule = {ScheduleKind::PolyNodeSize, 0.99};
  cfg.n_grid = {256};
  cfg.replications = 4;
  const ConvergenceReport report = run_uniform(cfg, 1);
  CHECK(report.value("sup_f_error", 256, -1) == 0.0);
  CHECK(report.value("min_leaf_volume", 256, -1) == 1.0);
  CHECK(report.value("sup_side_len_c0", 256, -1) == 1.0);
}

TEST_CASE("grid sup side length is bounded by the exact scan") {
  ExperimentConfig cfg = base_config();
  cfg.mode = ExperimentMode::Uniform;
  cfg.splitter.kind = SplitterKind::Uniform;
  cfg.sup_grid_resolution = 9;
  cfg.n_grid = {512};
  cfg.replications = 6;
  const ConvergenceReport report = run_uniform(cfg, 2);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(report.value("grid_sup_side_len_c" + std::to_string(j), 512, -1) <=
          report.value("sup_side_len_c" + std::to_string(j), 512, -1) + 1e-12);
  }
}

TEST_CASE("nested path requires its flag and improves along paths") {
  ExperimentConfig cfg = base_config();
  cfg.mode = ExperimentMode::NestedPath;
  cfg.nested_path = false;
  CHECK_THROWS_AS(run_nested_path(cfg, 1), ConfigError);

  // Pure-noise regression: the path error is sampling noise alone, which
  // shrinks with the growing leaf counts, so nearly every nested path
  // improves from the smallest n to the largest.
  cfg.nested_path = true;
  cfg.truth.noise_kind = NoiseKind::Gaussian;
  cfg.truth.noise_sigma = 1.0;
  cfg.splitter.schedule = {ScheduleKind::Log2PowerDepth, 0.8};
  cfg.n_grid = {256, 65536};
  cfg.replications = 100;
  const ConvergenceReport report = run_nested_path(cfg, 2);
  CHECK(report.value("path_improve_fraction", 0, 0) >= 0.9);
  CHECK(report.value("path_abs_error", 65536, 0) < report.value("path_abs_error", 256, 0));
}

TEST_CASE("forest with one tree reduces to the bootstrap tree") {
  ExperimentConfig cfg = base_config();
  cfg.mode = ExperimentMode::Forest;
  cfg.truth.noise_kind = NoiseKind::Gaussian;
  cfg.truth.noise_sigma = 0.5;
  cfg.n_grid = {512};
  cfg.replications = 12;
  cfg.forest_size = 1;
  BootstrapConfig bs;
  bs.i_scheme.kind = WeightSchemeKind::Multinomial;
  bs.i_scheme.m_schedule = Schedule{ScheduleKind::PolySubsample, 0.8};
  bs.j_scheme = bs.i_scheme;
  cfg.bootstrap = bs;

  const ConvergenceReport report = run_forest(cfg, 2);
  CHECK(report.value("forest_mse", 512, 0) == doctest::Approx(report.value("tree_mse", 512, 0)));
  CHECK(report.value("forest_variance", 512, 0) ==
        doctest::Approx(report.value("tree_variance", 512, 0)));
}

TEST_CASE("forest of constant responses predicts the constant") {
  ExperimentConfig cfg = base_config();
  cfg.mode = ExperimentMode::Forest;
  cfg.truth.regression_kind = RegressionKind::Linear;
  cfg.truth.coeffs = {0.0, 0.0};
  cfg.n_grid = {256};
  cfg.replications = 6;
  cfg.forest_size = 5;
  BootstrapConfig bs;
  bs.i_scheme.kind = WeightSchemeKind::WithoutReplacement;
  bs.i_scheme.m_schedule = Schedule{ScheduleKind::PolySubsample, 0.9};
  bs.j_scheme = bs.i_scheme;
  cfg.bootstrap = bs;
  const ConvergenceReport report = run_forest(cfg, 1);
  CHECK(report.value("forest_mse", 256, 0) == 0.0);
}

TEST_CASE("config validation names the offending field") {
  ExperimentConfig cfg = base_config();
  cfg.n_grid = {512, 256};
  try {
    cfg.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "n_grid");
  }

  cfg = base_config();
  cfg.honest_ratio = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = base_config();
  cfg.mode = ExperimentMode::Forest;
  BootstrapConfig bs;
  bs.i_scheme.kind = WeightSchemeKind::WithoutReplacement;
  bs.i_scheme.fixed_m = 100000;  // larger than any n_I in the grid
  bs.j_scheme = bs.i_scheme;
  cfg.bootstrap = bs;
  try {
    cfg.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "bootstrap");
  }

  cfg = base_config();
  cfg.query_points = {{0.5}};  // wrong arity
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
