#pragma once

#include "sadapt/bench.hpp"
#include "sadapt/gmm.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace sadapt {

/// Observation model of one synthetic structure: latent condition
/// coordinates u are mapped to two frequencies x = base + R(angle)·(scale ⊙ u).
struct BridgeDomainShape {
  std::array<double, 2> base{};
  std::array<double, 2> scale{};
  double angle = 0.0;
};

/// Synthetic stand-in for a two-bridge partial-DA study: a source structure
/// with ambient, cold (stiffened, temperature < 0) and damage clusters, and a
/// target structure observed before and after a repair, normal data only.
struct BridgeConfig {
  Seed seed = 2022;
  int repeats = 10;

  std::size_t source_normal = 1200;
  /// Appended after the normal rows, at ambient temperatures.
  std::size_t source_damage = 200;
  std::size_t pre_repair = 600;
  std::size_t post_repair = 600;

  /// Stage 1 uses the first rows of both target campaigns.
  std::size_t stage1_rows = 200;
  /// Stage 2 picks balanced normal subsets from the first rows of each domain.
  std::size_t source_window = 1200;
  std::size_t target_window = 400;
  /// Cap on rows per temperature condition in the balanced subsets.
  std::size_t per_condition_cap = 400;
  double cold_threshold = 0.0;

  int gmm_components = 3;
  double ncoral_shrinkage = kNcoralShrinkage;

  /// Daily temperature: mean + amplitude·sin(2π i / period) + N(0, noise²).
  double temperature_mean = 8.0;
  double temperature_amplitude = 12.0;
  double temperature_period = 300.0;
  double temperature_noise = 2.0;

  /// Latent offsets of the cold and damage clusters relative to ambient,
  /// whose latent noise has standard deviations (0.4, 0.3).
  std::array<double, 2> cold_offset{3.0, 1.5};
  std::array<double, 2> damage_offset{-0.5, -3.5};

  BridgeDomainShape source_shape{{3.9, 5.0}, {0.05, 0.08}, 0.25};
  BridgeDomainShape pre_shape{{2.7, 6.4}, {0.015, 0.03}, -0.3};
  BridgeDomainShape post_shape{{2.72, 6.35}, {0.017, 0.028}, -0.2};

  [[nodiscard]] static BridgeConfig from_config(const KeyValueConfig& config);
  void validate() const;
  [[nodiscard]] std::string to_json() const;
};

/// Each dataset carries a "temperature" covariate; the source has labels
/// 0 (normal) and 1 (damage), the target campaigns are all 0.
struct BridgeDomains {
  LabeledDataset source;
  LabeledDataset pre_repair;
  LabeledDataset post_repair;
};

[[nodiscard]] BridgeDomains generate_bridge_domains(const BridgeConfig& config, Seed seed);

/// Stage-1 map from post-repair features into the pre-repair feature space,
/// learnt by NCORAL on the first `rows` rows of each campaign, expressed as
/// x ↦ x · linear + offset.
struct Stage1Map {
  Matrix linear;
  RowVector offset;
  AlignmentResult alignment;

  [[nodiscard]] Matrix apply(const Matrix& x) const;
  /// max(‖linear − I‖_F, ‖offset‖₂).
  [[nodiscard]] double identity_deviation() const;
};

[[nodiscard]] Stage1Map bridge_stage1(const LabeledDataset& pre_repair, const LabeledDataset& post_repair,
                                      std::size_t rows, double shrinkage = kNcoralShrinkage);

/// Normal-condition rows of `ds[0, window)` with temperature below and
/// at/above `threshold`, each subsampled to min(n_cold, n_warm, cap).
struct BalancedRows {
  RowIndices rows;  // ascending union
  std::size_t per_condition = 0;
};

[[nodiscard]] BalancedRows balanced_condition_rows(const LabeledDataset& ds, std::size_t window,
                                                   double threshold, std::size_t cap, Seed seed);

struct BridgeOutcome {
  Stage1Map stage1;
  AlignmentResult stage2;
  std::size_t source_per_condition = 0;
  std::size_t target_per_condition = 0;
  GmmModel gmm;
  /// Component holding most source damage rows.
  int damage_component = 0;
  /// Rows per cluster for each group ("source/ambient", "pre_repair/cold", ...).
  std::map<std::string, std::vector<std::size_t>> cross_tab;
  /// Target-normal rows assigned to the damage component.
  std::size_t false_positives = 0;
  /// Macro-F1 of damage detection (damage component vs the rest) over all rows.
  double detection_macro_f1 = 0.0;
};

[[nodiscard]] BridgeOutcome run_bridge_once(const BridgeConfig& config, const BridgeDomains& domains, Seed seed);

/// All repeats; one row per repeat holding the detection macro-F1, with
/// per-repeat cross-tabulations and false-positive counts in extras_json.
[[nodiscard]] BenchReport run_bridge_style(const BridgeConfig& config = {});

}  // namespace sadapt
