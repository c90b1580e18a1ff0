#include "honest_forest/config_json.hpp"

#include "json.hpp"

namespace honest_forest {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path, message);
}

const json& require(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.is_object()) fail(path, "must be an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing required field");
  return *it;
}

double require_number(const json& obj, const std::string& path, const std::string& key) {
  const json& v = require(obj, path, key);
  if (!v.is_number()) fail(path + "." + key, "must be a number");
  return v.get<double>();
}

std::size_t require_count(const json& obj, const std::string& path, const std::string& key) {
  const json& v = require(obj, path, key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    fail(path + "." + key, "must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

std::string require_string(const json& obj, const std::string& path, const std::string& key) {
  const json& v = require(obj, path, key);
  if (!v.is_string()) fail(path + "." + key, "must be a string");
  return v.get<std::string>();
}

std::vector<double> require_real_list(const json& obj, const std::string& path, const std::string& key) {
  const json& v = require(obj, path, key);
  if (!v.is_array()) fail(path + "." + key, "must be an array of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) fail(path + "." + key, "must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

TruthDescriptor parse_truth(const json& obj, const std::string& path) {
  TruthDescriptor truth;
  const json& density = require(obj, path, "density");
  const std::string density_kind = require_string(density, path + ".density", "kind");
  if (density_kind == "uniform") {
    truth.density_kind = DensityKind::Uniform;
  } else if (density_kind == "bounded_mixture") {
    truth.density_kind = DensityKind::BoundedMixture;
    truth.mixture_eps = require_number(density, path + ".density", "eps");
  } else {
    fail(path + ".density.kind", "unknown density kind '" + density_kind + "'");
  }

  const json& regression = require(obj, path, "regression");
  const std::string reg_kind = require_string(regression, path + ".regression", "kind");
  if (reg_kind == "zero") {
    truth.regression_kind = RegressionKind::Zero;
  } else if (reg_kind == "linear") {
    truth.regression_kind = RegressionKind::Linear;
    truth.coeffs = require_real_list(regression, path + ".regression", "coeffs");
  } else if (reg_kind == "sinusoid_product") {
    truth.regression_kind = RegressionKind::SinusoidProduct;
    truth.freqs = require_real_list(regression, path + ".regression", "freqs");
  } else if (reg_kind == "sinusoid_linear") {
    truth.regression_kind = RegressionKind::SinusoidLinear;
    truth.freqs = require_real_list(regression, path + ".regression", "freqs");
    truth.coeffs = require_real_list(regression, path + ".regression", "coeffs");
  } else {
    fail(path + ".regression.kind", "unknown regression kind '" + reg_kind + "'");
  }

  const json& noise = require(obj, path, "noise");
  const std::string noise_kind = require_string(noise, path + ".noise", "kind");
  if (noise_kind == "none") {
    truth.noise_kind = NoiseKind::None;
  } else if (noise_kind == "gaussian") {
    truth.noise_kind = NoiseKind::Gaussian;
    truth.noise_sigma = require_number(noise, path + ".noise", "sigma");
  } else if (noise_kind == "bounded_uniform") {
    truth.noise_kind = NoiseKind::BoundedUniform;
    truth.noise_half_width = require_number(noise, path + ".noise", "half_width");
  } else {
    fail(path + ".noise.kind", "unknown noise kind '" + noise_kind + "'");
  }
  return truth;
}

Schedule parse_schedule(const json& obj, const std::string& path) {
  Schedule schedule;
  const std::string kind = require_string(obj, path, "kind");
  if (kind == "poly_node_size") {
    schedule.kind = ScheduleKind::PolyNodeSize;
  } else if (kind == "sqrt_log_node_size") {
    schedule.kind = ScheduleKind::SqrtLogNodeSize;
  } else if (kind == "log_depth") {
    schedule.kind = ScheduleKind::LogDepth;
  } else if (kind == "log2_power_depth") {
    schedule.kind = ScheduleKind::Log2PowerDepth;
  } else if (kind == "poly_subsample") {
    schedule.kind = ScheduleKind::PolySubsample;
  } else {
    fail(path + ".kind", "unknown schedule kind '" + kind + "'");
  }
  schedule.param = require_number(obj, path, "param");
  return schedule;
}

SplitterConfig parse_splitter(const json& obj, const std::string& path) {
  SplitterConfig splitter;
  const std::string kind = require_string(obj, path, "kind");
  splitter.schedule = parse_schedule(require(obj, path, "schedule"), path + ".schedule");
  if (kind == "uniform") {
    splitter.kind = SplitterKind::Uniform;
  } else if (kind == "centered") {
    splitter.kind = SplitterKind::Centered;
    splitter.feature_probs = require_real_list(obj, path, "feature_probs");
  } else if (kind == "modified_centered") {
    splitter.kind = SplitterKind::ModifiedCentered;
    const json& periods = require(obj, path, "rotation_periods");
    if (!periods.is_array()) fail(path + ".rotation_periods", "must be an array of integers");
    for (const json& e : periods) {
      if (!e.is_number_integer()) fail(path + ".rotation_periods", "must be an array of integers");
      splitter.rotation_periods.push_back(e.get<long>());
    }
  } else if (kind == "regular_adaptive") {
    splitter.kind = SplitterKind::RegularAdaptive;
    splitter.adaptive.alpha = require_number(obj, path, "alpha");
    splitter.adaptive.feature_floor = require_real_list(obj, path, "feature_floor");
  } else {
    fail(path + ".kind", "unknown splitter kind '" + kind + "'");
  }
  return splitter;
}

WeightScheme parse_scheme(const json& obj, const std::string& path) {
  WeightScheme scheme;
  const std::string kind = require_string(obj, path, "kind");
  if (kind == "multinomial") {
    scheme.kind = WeightSchemeKind::Multinomial;
  } else if (kind == "without_replacement") {
    scheme.kind = WeightSchemeKind::WithoutReplacement;
  } else if (kind == "wild_poisson") {
    scheme.kind = WeightSchemeKind::WildPoisson;
  } else if (kind == "wild_lognormal") {
    scheme.kind = WeightSchemeKind::WildLogNormal;
    scheme.lognormal_sigma = require_number(obj, path, "sigma");
  } else {
    fail(path + ".kind", "unknown weight scheme kind '" + kind + "'");
  }
  if (kind == "multinomial" || kind == "without_replacement") {
    const bool has_m = obj.contains("m");
    const bool has_schedule = obj.contains("schedule");
    if (has_m == has_schedule) {
      fail(path, "exactly one of 'm' and 'schedule' must be given");
    }
    if (has_m) {
      const json& m = obj.at("m");
      if (!m.is_number_integer() || m.get<long long>() < 1) fail(path + ".m", "must be a positive integer");
      scheme.fixed_m = m.get<long>();
    } else {
      scheme.m_schedule = parse_schedule(obj.at("schedule"), path + ".schedule");
    }
  }
  return scheme;
}

json schedule_to_json(const Schedule& schedule) {
  const char* kind = nullptr;
  switch (schedule.kind) {
    case ScheduleKind::PolyNodeSize: kind = "poly_node_size"; break;
    case ScheduleKind::SqrtLogNodeSize: kind = "sqrt_log_node_size"; break;
    case ScheduleKind::LogDepth: kind = "log_depth"; break;
    case ScheduleKind::Log2PowerDepth: kind = "log2_power_depth"; break;
    case ScheduleKind::PolySubsample: kind = "poly_subsample"; break;
  }
  return json{{"kind", kind}, {"param", schedule.param}};
}

json scheme_to_json(const WeightScheme& scheme) {
  json out;
  switch (scheme.kind) {
    case WeightSchemeKind::Multinomial: out["kind"] = "multinomial"; break;
    case WeightSchemeKind::WithoutReplacement: out["kind"] = "without_replacement"; break;
    case WeightSchemeKind::WildPoisson: out["kind"] = "wild_poisson"; break;
    case WeightSchemeKind::WildLogNormal:
      out["kind"] = "wild_lognormal";
      out["sigma"] = scheme.lognormal_sigma;
      break;
  }
  if (scheme.fixed_m) out["m"] = *scheme.fixed_m;
  if (scheme.m_schedule) out["schedule"] = schedule_to_json(*scheme.m_schedule);
  return out;
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config", "top level must be an object");

  ExperimentConfig cfg;
  const std::string mode = require_string(doc, "config", "mode");
  if (mode == "pointwise") {
    cfg.mode = ExperimentMode::Pointwise;
  } else if (mode == "uniform") {
    cfg.mode = ExperimentMode::Uniform;
  } else if (mode == "lp") {
    cfg.mode = ExperimentMode::Lp;
  } else if (mode == "nested") {
    cfg.mode = ExperimentMode::NestedPath;
  } else if (mode == "forest") {
    cfg.mode = ExperimentMode::Forest;
  } else {
    throw ConfigError("mode", "unknown mode '" + mode + "'");
  }

  cfg.d = require_count(doc, "config", "d");
  cfg.truth = parse_truth(require(doc, "config", "truth"), "truth");
  cfg.splitter = parse_splitter(require(doc, "config", "splitter"), "splitter");
  cfg.honest_ratio = require_number(doc, "config", "honest_ratio");

  if (doc.contains("bootstrap") && !doc.at("bootstrap").is_null()) {
    BootstrapConfig bs;
    const json& b = doc.at("bootstrap");
    bs.i_scheme = parse_scheme(require(b, "bootstrap", "i_scheme"), "bootstrap.i_scheme");
    bs.j_scheme = parse_scheme(require(b, "bootstrap", "j_scheme"), "bootstrap.j_scheme");
    cfg.bootstrap = bs;
  }

  const json& n_grid = require(doc, "config", "n_grid");
  if (!n_grid.is_array() || n_grid.empty()) throw ConfigError("n_grid", "must be a nonempty array");
  for (const json& e : n_grid) {
    if (!e.is_number_integer() || e.get<long long>() < 2) {
      throw ConfigError("n_grid", "entries must be integers >= 2");
    }
    cfg.n_grid.push_back(e.get<std::size_t>());
  }

  cfg.replications = require_count(doc, "config", "replications");

  if (doc.contains("query_points")) {
    const json& qs = doc.at("query_points");
    if (!qs.is_array()) throw ConfigError("query_points", "must be an array of points");
    for (const json& q : qs) {
      if (!q.is_array()) throw ConfigError("query_points", "each point must be an array");
      std::vector<double> point;
      for (const json& v : q) {
        if (!v.is_number()) throw ConfigError("query_points", "coordinates must be numbers");
        point.push_back(v.get<double>());
      }
      cfg.query_points.push_back(std::move(point));
    }
  }

  if (doc.contains("sup_grid_resolution")) {
    cfg.sup_grid_resolution = require_count(doc, "config", "sup_grid_resolution");
  }
  if (doc.contains("p_norms")) cfg.p_norms = require_real_list(doc, "config", "p_norms");
  if (doc.contains("forest_size")) cfg.forest_size = require_count(doc, "config", "forest_size");
  if (doc.contains("nested_path")) {
    const json& flag = doc.at("nested_path");
    if (!flag.is_boolean()) throw ConfigError("nested_path", "must be a boolean");
    cfg.nested_path = flag.get<bool>();
  }
  cfg.master_seed = static_cast<std::uint64_t>(require_count(doc, "config", "master_seed"));
  return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json doc;
  switch (cfg.mode) {
    case ExperimentMode::Pointwise: doc["mode"] = "pointwise"; break;
    case ExperimentMode::Uniform: doc["mode"] = "uniform"; break;
    case ExperimentMode::Lp: doc["mode"] = "lp"; break;
    case ExperimentMode::NestedPath: doc["mode"] = "nested"; break;
    case ExperimentMode::Forest: doc["mode"] = "forest"; break;
  }
  doc["d"] = cfg.d;

  json density;
  switch (cfg.truth.density_kind) {
    case DensityKind::Uniform: density["kind"] = "uniform"; break;
    case DensityKind::BoundedMixture:
      density["kind"] = "bounded_mixture";
      density["eps"] = cfg.truth.mixture_eps;
      break;
  }
  json regression;
  switch (cfg.truth.regression_kind) {
    case RegressionKind::Zero: regression["kind"] = "zero"; break;
    case RegressionKind::Linear:
      regression["kind"] = "linear";
      regression["coeffs"] = cfg.truth.coeffs;
      break;
    case RegressionKind::SinusoidProduct:
      regression["kind"] = "sinusoid_product";
      regression["freqs"] = cfg.truth.freqs;
      break;
    case RegressionKind::SinusoidLinear:
      regression["kind"] = "sinusoid_linear";
      regression["freqs"] = cfg.truth.freqs;
      regression["coeffs"] = cfg.truth.coeffs;
      break;
  }
  json noise;
  switch (cfg.truth.noise_kind) {
    case NoiseKind::None: noise["kind"] = "none"; break;
    case NoiseKind::Gaussian:
      noise["kind"] = "gaussian";
      noise["sigma"] = cfg.truth.noise_sigma;
      break;
    case NoiseKind::BoundedUniform:
      noise["kind"] = "bounded_uniform";
      noise["half_width"] = cfg.truth.noise_half_width;
      break;
  }
  doc["truth"] = json{{"density", density}, {"regression", regression}, {"noise", noise}};

  json splitter;
  splitter["schedule"] = schedule_to_json(cfg.splitter.schedule);
  switch (cfg.splitter.kind) {
    case SplitterKind::Uniform: splitter["kind"] = "uniform"; break;
    case SplitterKind::Centered:
      splitter["kind"] = "centered";
      splitter["feature_probs"] = cfg.splitter.feature_probs;
      break;
    case SplitterKind::ModifiedCentered:
      splitter["kind"] = "modified_centered";
      splitter["rotation_periods"] = cfg.splitter.rotation_periods;
      break;
    case SplitterKind::RegularAdaptive:
      splitter["kind"] = "regular_adaptive";
      splitter["alpha"] = cfg.splitter.adaptive.alpha;
      splitter["feature_floor"] = cfg.splitter.adaptive.feature_floor;
      break;
  }
  doc["splitter"] = splitter;
  doc["honest_ratio"] = cfg.honest_ratio;
  if (cfg.bootstrap) {
    doc["bootstrap"] = json{{"i_scheme", scheme_to_json(cfg.bootstrap->i_scheme)},
                            {"j_scheme", scheme_to_json(cfg.bootstrap->j_scheme)}};
  }
  doc["n_grid"] = cfg.n_grid;
  doc["replications"] = cfg.replications;
  doc["query_points"] = cfg.query_points;
  doc["sup_grid_resolution"] = cfg.sup_grid_resolution;
  doc["p_norms"] = cfg.p_norms;
  doc["forest_size"] = cfg.forest_size;
  doc["nested_path"] = cfg.nested_path;
  doc["master_seed"] = cfg.master_seed;
  return doc.dump();
}

}  // namespace honest_forest
