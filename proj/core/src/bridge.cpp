#include "sadapt/bridge.hpp"

#include "sadapt/diagnostics.hpp"
#include "sadapt/error.hpp"
#include "sadapt/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

namespace sadapt {
namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kTemperature = "temperature";
constexpr double kLatentSd[2] = {0.4, 0.3};
// Ambient latent drift per degree away from the mean temperature.
constexpr double kThermalSlope[2] = {0.08, 0.03};

std::array<double, 2> pair_of(const KeyValueConfig& cfg, const std::string& key) {
  const auto v = cfg.get_doubles(key);
  if (v.size() != 2) throw Error(ErrorKind::kParse, key + " expects two comma-separated values");
  return {v[0], v[1]};
}

void read_shape(const KeyValueConfig& cfg, const std::string& prefix, BridgeDomainShape& shape) {
  if (cfg.has(prefix + "_base")) shape.base = pair_of(cfg, prefix + "_base");
  if (cfg.has(prefix + "_scale")) shape.scale = pair_of(cfg, prefix + "_scale");
  if (cfg.has(prefix + "_angle")) shape.angle = cfg.get_double(prefix + "_angle");
}

Json shape_json(const BridgeDomainShape& s) {
  return {{"base", s.base}, {"scale", s.scale}, {"angle", s.angle}};
}

struct Campaign {
  Matrix x;
  std::vector<ClassId> labels;
  std::vector<double> temperature;
};

// Rows [0, normal) follow the temperature series; damage rows continue it
// with cold days reflected to ambient.
Campaign simulate(const BridgeConfig& cfg, const BridgeDomainShape& shape, std::size_t normal, std::size_t damage,
                  Seed seed) {
  Engine engine(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t n = normal + damage;
  Campaign c;
  c.x.resize(static_cast<Eigen::Index>(n), 2);
  c.labels.resize(n);
  c.temperature.resize(n);
  const double ca = std::cos(shape.angle);
  const double sa = std::sin(shape.angle);
  for (std::size_t i = 0; i < n; ++i) {
    double t = cfg.temperature_mean +
               cfg.temperature_amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / cfg.temperature_period) +
               cfg.temperature_noise * gauss(engine);
    const bool damaged = i >= normal;
    if (damaged && t < cfg.cold_threshold) t = 2.0 * cfg.cold_threshold - t;
    const bool cold = t < cfg.cold_threshold;

    double u[2];
    for (int j = 0; j < 2; ++j) {
      u[j] = kLatentSd[j] * gauss(engine);
      if (cold) {
        u[j] += cfg.cold_offset[static_cast<std::size_t>(j)];
      } else {
        u[j] += kThermalSlope[j] * (t - cfg.temperature_mean);
      }
      if (damaged) u[j] += cfg.damage_offset[static_cast<std::size_t>(j)];
    }
    const double v0 = shape.scale[0] * u[0];
    const double v1 = shape.scale[1] * u[1];
    const auto r = static_cast<Eigen::Index>(i);
    c.x(r, 0) = shape.base[0] + ca * v0 - sa * v1;
    c.x(r, 1) = shape.base[1] + sa * v0 + ca * v1;
    c.labels[i] = damaged ? 1 : kNormalCondition;
    c.temperature[i] = t;
  }
  return c;
}

LabeledDataset to_dataset(Campaign c, std::string tag) {
  Covariates cov;
  cov[kTemperature] = std::move(c.temperature);
  return LabeledDataset(std::move(c.x), std::move(c.labels), std::move(tag), std::move(cov));
}

Matrix gather(const Matrix& x, const RowIndices& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

std::string condition_of(const LabeledDataset& ds, std::size_t row, double threshold) {
  if ((*ds.labels())[row] != kNormalCondition) return "damage";
  return ds.covariate(kTemperature)[row] < threshold ? "cold" : "ambient";
}

}  // namespace

BridgeConfig BridgeConfig::from_config(const KeyValueConfig& cfg) {
  BridgeConfig c;
  auto size_key = [&cfg](const std::string& key, std::size_t& out) {
    if (!cfg.has(key)) return;
    const long long v = cfg.get_int(key);
    if (v < 0) throw Error(ErrorKind::kParse, key + " must be non-negative");
    out = static_cast<std::size_t>(v);
  };
  if (cfg.has("seed")) c.seed = cfg.get_u64("seed");
  if (cfg.has("repeats")) c.repeats = static_cast<int>(cfg.get_int("repeats"));
  size_key("source_normal", c.source_normal);
  size_key("source_damage", c.source_damage);
  size_key("pre_repair", c.pre_repair);
  size_key("post_repair", c.post_repair);
  size_key("stage1_rows", c.stage1_rows);
  size_key("source_window", c.source_window);
  size_key("target_window", c.target_window);
  size_key("per_condition_cap", c.per_condition_cap);
  if (cfg.has("cold_threshold")) c.cold_threshold = cfg.get_double("cold_threshold");
  if (cfg.has("gmm_components")) c.gmm_components = static_cast<int>(cfg.get_int("gmm_components"));
  if (cfg.has("ncoral_shrinkage")) c.ncoral_shrinkage = cfg.get_double("ncoral_shrinkage");
  if (cfg.has("temperature_mean")) c.temperature_mean = cfg.get_double("temperature_mean");
  if (cfg.has("temperature_amplitude")) c.temperature_amplitude = cfg.get_double("temperature_amplitude");
  if (cfg.has("temperature_period")) c.temperature_period = cfg.get_double("temperature_period");
  if (cfg.has("temperature_noise")) c.temperature_noise = cfg.get_double("temperature_noise");
  if (cfg.has("cold_offset")) c.cold_offset = pair_of(cfg, "cold_offset");
  if (cfg.has("damage_offset")) c.damage_offset = pair_of(cfg, "damage_offset");
  read_shape(cfg, "source", c.source_shape);
  read_shape(cfg, "pre_repair", c.pre_shape);
  read_shape(cfg, "post_repair", c.post_shape);
  c.validate();
  return c;
}

void BridgeConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::kInvalidArgument, "bridge config: " + msg); };
  if (repeats < 1) fail("repeats must be >= 1");
  if (source_normal == 0 || source_damage == 0 || pre_repair == 0 || post_repair == 0) fail("all domain sizes must be positive");
  if (stage1_rows < 3 || stage1_rows > std::min(pre_repair, post_repair)) {
    fail("stage1_rows must lie in [3, min(pre_repair, post_repair)]");
  }
  if (source_window == 0 || target_window == 0) fail("windows must be positive");
  if (per_condition_cap == 0) fail("per_condition_cap must be positive");
  if (gmm_components < 1) fail("gmm_components must be >= 1");
  if (!(ncoral_shrinkage >= 0.0) || !std::isfinite(ncoral_shrinkage)) fail("ncoral_shrinkage must be finite and >= 0");
  if (!(temperature_period > 0.0) || !(temperature_noise >= 0.0)) fail("temperature period must be > 0, noise >= 0");
  for (const auto* s : {&source_shape, &pre_shape, &post_shape}) {
    if (!(s->scale[0] > 0.0 && s->scale[1] > 0.0)) fail("domain scales must be positive");
  }
}

std::string BridgeConfig::to_json() const {
  Json j;
  j["case"] = "bridge";
  j["seed"] = seed;
  j["repeats"] = repeats;
  j["source_normal"] = source_normal;
  j["source_damage"] = source_damage;
  j["pre_repair"] = pre_repair;
  j["post_repair"] = post_repair;
  j["stage1_rows"] = stage1_rows;
  j["source_window"] = source_window;
  j["target_window"] = target_window;
  j["per_condition_cap"] = per_condition_cap;
  j["cold_threshold"] = cold_threshold;
  j["gmm_components"] = gmm_components;
  j["ncoral_shrinkage"] = ncoral_shrinkage;
  j["temperature"] = {{"mean", temperature_mean},
                      {"amplitude", temperature_amplitude},
                      {"period", temperature_period},
                      {"noise", temperature_noise}};
  j["cold_offset"] = cold_offset;
  j["damage_offset"] = damage_offset;
  j["latent_sd"] = {kLatentSd[0], kLatentSd[1]};
  j["thermal_slope"] = {kThermalSlope[0], kThermalSlope[1]};
  j["source_shape"] = shape_json(source_shape);
  j["pre_repair_shape"] = shape_json(pre_shape);
  j["post_repair_shape"] = shape_json(post_shape);
  j["plot_fraction"] = 0.2;
  return j.dump();
}

BridgeDomains generate_bridge_domains(const BridgeConfig& config, Seed seed) {
  config.validate();
  return {to_dataset(simulate(config, config.source_shape, config.source_normal, config.source_damage,
                              derive_seed(seed, "source")),
                     "source"),
          to_dataset(simulate(config, config.pre_shape, config.pre_repair, 0, derive_seed(seed, "pre_repair")),
                     "pre_repair"),
          to_dataset(simulate(config, config.post_shape, config.post_repair, 0, derive_seed(seed, "post_repair")),
                     "post_repair")};
}

Matrix Stage1Map::apply(const Matrix& x) const { return (x * linear).rowwise() + offset; }

double Stage1Map::identity_deviation() const {
  const Matrix eye = Matrix::Identity(linear.rows(), linear.cols());
  return std::max((linear - eye).norm(), offset.norm());
}

Stage1Map bridge_stage1(const LabeledDataset& pre_repair, const LabeledDataset& post_repair, std::size_t rows,
                        double shrinkage) {
  if (rows > pre_repair.n() || rows > post_repair.n()) {
    throw Error(ErrorKind::kInvalidArgument, "stage 1 needs " + std::to_string(rows) + " rows in both campaigns");
  }
  RowIndices first(rows);
  for (std::size_t i = 0; i < rows; ++i) first[i] = i;

  Stage1Map map;
  map.alignment = ncoral(pre_repair.features(), post_repair.features(), first, first, shrinkage);
  // Post-repair rows go to the aligned space with the target map, then back
  // to pre-repair units with the inverse source map. Evaluating the
  // composite on the origin and unit rows recovers its affine form.
  const auto d = static_cast<Eigen::Index>(pre_repair.d());
  Matrix probe = Matrix::Zero(d + 1, d);
  probe.bottomRows(d) = Matrix::Identity(d, d);
  const Matrix image = map.alignment.source_map.invert(map.alignment.target_map.apply(probe));
  map.offset = image.row(0);
  map.linear = image.bottomRows(d).rowwise() - map.offset;
  return map;
}

BalancedRows balanced_condition_rows(const LabeledDataset& ds, std::size_t window, double threshold, std::size_t cap,
                                     Seed seed) {
  const std::size_t end = std::min(window, ds.n());
  RowIndices candidates;
  for (std::size_t i = 0; i < end; ++i) {
    if (!ds.has_labels() || (*ds.labels())[i] == kNormalCondition) candidates.push_back(i);
  }
  if (candidates.empty()) throw Error(ErrorKind::kInvalidArgument, "no normal-condition rows in the window");
  const LabeledDataset sub = ds.select_rows(candidates);
  const auto& temp = sub.covariate(kTemperature);
  const auto n_cold = static_cast<std::size_t>(
      std::count_if(temp.begin(), temp.end(), [threshold](double t) { return t < threshold; }));
  const std::size_t n_warm = temp.size() - n_cold;
  const std::size_t k = std::min({n_cold, n_warm, cap});
  if (k == 0) {
    throw Error(ErrorKind::kInvalidArgument, ds.domain_tag() + ": window of " + std::to_string(end) +
                                                 " rows lacks one temperature condition (" + std::to_string(n_cold) +
                                                 " cold, " + std::to_string(n_warm) + " ambient)");
  }
  BalancedRows out;
  out.per_condition = k;
  for (const auto& [pred, label] : {std::pair{CovariatePredicate{Comparison::kLess, threshold}, "cold"},
                                    std::pair{CovariatePredicate{Comparison::kGreaterEqual, threshold}, "ambient"}}) {
    for (std::size_t r : covariate_rows(sub, kTemperature, pred, k, derive_seed(seed, label))) {
      out.rows.push_back(candidates[r]);
    }
  }
  std::sort(out.rows.begin(), out.rows.end());
  return out;
}

BridgeOutcome run_bridge_once(const BridgeConfig& config, const BridgeDomains& domains, Seed seed) {
  BridgeOutcome out;
  out.stage1 = bridge_stage1(domains.pre_repair, domains.post_repair, config.stage1_rows, config.ncoral_shrinkage);
  const LabeledDataset post_mapped = domains.post_repair.with_features(out.stage1.apply(domains.post_repair.features()));
  const LabeledDataset merged = concat(domains.pre_repair, post_mapped, "target");

  const BalancedRows bs = balanced_condition_rows(domains.source, config.source_window, config.cold_threshold,
                                                  config.per_condition_cap, derive_seed(seed, "source_rows"));
  const BalancedRows bt = balanced_condition_rows(merged, config.target_window, config.cold_threshold,
                                                  config.per_condition_cap, derive_seed(seed, "target_rows"));
  out.source_per_condition = bs.per_condition;
  out.target_per_condition = bt.per_condition;
  out.stage2 = ncoral(domains.source.features(), merged.features(), bs.rows, bt.rows, config.ncoral_shrinkage);

  const RowIndices damage = rows_of_class(domains.source, 1);
  const Matrix pool_s = gather(out.stage2.source, bs.rows);
  const Matrix pool_t = gather(out.stage2.target, bt.rows);
  const Matrix pool_d = gather(out.stage2.source, damage);
  Matrix pool(pool_s.rows() + pool_t.rows() + pool_d.rows(), pool_s.cols());
  pool << pool_s, pool_t, pool_d;
  out.gmm = gmm_fit(pool, config.gmm_components, derive_seed(seed, "gmm"));

  const auto pred_s = gmm_predict(out.gmm, out.stage2.source).assignments;
  const auto pred_t = gmm_predict(out.gmm, out.stage2.target).assignments;

  std::vector<std::size_t> damage_hits(static_cast<std::size_t>(config.gmm_components), 0);
  for (std::size_t r : damage) ++damage_hits[static_cast<std::size_t>(pred_s[r])];
  out.damage_component =
      static_cast<int>(std::max_element(damage_hits.begin(), damage_hits.end()) - damage_hits.begin());

  auto tally = [&](const std::string& group, int cluster) {
    auto& row = out.cross_tab[group];
    if (row.empty()) row.assign(static_cast<std::size_t>(config.gmm_components), 0);
    ++row[static_cast<std::size_t>(cluster)];
  };
  std::vector<ClassId> truth;
  std::vector<ClassId> flagged;
  for (std::size_t i = 0; i < domains.source.n(); ++i) {
    tally("source/" + condition_of(domains.source, i, config.cold_threshold), pred_s[i]);
    truth.push_back((*domains.source.labels())[i] == kNormalCondition ? 0 : 1);
    flagged.push_back(pred_s[i] == out.damage_component ? 1 : 0);
  }
  const std::size_t n_pre = domains.pre_repair.n();
  for (std::size_t i = 0; i < merged.n(); ++i) {
    const std::string campaign = i < n_pre ? "pre_repair/" : "post_repair/";
    tally(campaign + condition_of(merged, i, config.cold_threshold), pred_t[i]);
    if (pred_t[i] == out.damage_component) ++out.false_positives;
    truth.push_back(0);
    flagged.push_back(pred_t[i] == out.damage_component ? 1 : 0);
  }
  out.detection_macro_f1 = macro_f1(truth, flagged);
  return out;
}

BenchReport run_bridge_style(const BridgeConfig& config) {
  config.validate();
  BenchReport report;
  report.case_id = "bridge";
  report.config_json = config.to_json();
  report.metadata = {
      {"sadapt_version", SADAPT_VERSION},
      {"data", "synthetic stand-in: latent ambient/cold/damage clusters observed through per-domain affine maps"},
      {"stage1", "ncoral, post-repair onto pre-repair, first stage1_rows rows of each campaign"},
      {"stage2", "ncoral, merged target onto source, temperature-balanced normal subsets"},
      {"stage3", "gmm on the balanced normal pool plus source damage rows"},
      {"rows", "damage-detection macro-F1 of the damage cluster over all source and target rows"},
  };

  Json repeats = Json::array();
  std::size_t total_fp = 0;
  for (int r = 0; r < config.repeats; ++r) {
    const Seed repeat_seed = derive_seed(config.seed, static_cast<std::uint64_t>(r));
    MethodRow row;
    row.method = {SaMethod::kNcoral, DaMethod::kNone};
    row.repeat = r;
    row.seed = repeat_seed;
    const auto start = std::chrono::steady_clock::now();
    try {
      const BridgeDomains domains = generate_bridge_domains(config, derive_seed(repeat_seed, "domains"));
      const BridgeOutcome out = run_bridge_once(config, domains, repeat_seed);
      row.macro_f1 = out.detection_macro_f1;
      row.fitted = {{"false_positives", static_cast<double>(out.false_positives)},
                    {"damage_component", out.damage_component},
                    {"gmm_restarts", out.gmm.restarts},
                    {"gmm_iterations", static_cast<double>(out.gmm.log_likelihood_trace.size())},
                    {"source_per_condition", static_cast<double>(out.source_per_condition)},
                    {"target_per_condition", static_cast<double>(out.target_per_condition)},
                    {"stage1_identity_deviation", out.stage1.identity_deviation()}};
      total_fp += out.false_positives;
      Json tab = Json::object();
      for (const auto& [group, counts] : out.cross_tab) tab[group] = counts;
      repeats.push_back({{"repeat", r},
                         {"seed", repeat_seed},
                         {"false_positives", out.false_positives},
                         {"damage_component", out.damage_component},
                         {"cross_tab", tab},
                         {"gmm", Json::parse(out.gmm.to_json())}});

      if (r == 0) {
        const LabeledDataset merged_raw =
            concat(domains.pre_repair,
                   domains.post_repair.with_features(out.stage1.apply(domains.post_repair.features())), "target");
        report.plots.push_back({"raw", domains.source, merged_raw});
        report.plots.push_back(
            {"ncoral", domains.source.with_features(out.stage2.source), merged_raw.with_features(out.stage2.target)});
      }
    } catch (const std::exception& e) {
      row.error = e.what();
      warn("bridge repeat " + std::to_string(r) + ": " + e.what());
    }
    row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.rows.push_back(std::move(row));
  }
  report.extras_json = Json{{"total_false_positives", total_fp}, {"repeats", repeats}}.dump();
  return report;
}

}  // namespace sadapt
