#pragma once

#include "sadapt/config.hpp"
#include "sadapt/dataset.hpp"
#include "sadapt/rng.hpp"
#include "sadapt/types.hpp"

#include <map>
#include <optional>
#include <string>

namespace sadapt {

struct GaussianDist {
  double mean = 0.0;
  double variance = 0.0;
};

/// Gamma in shape-scale form (mean = shape · scale).
struct GammaDist {
  double shape = 1.0;
  double scale = 1.0;
};

/// One population member: an N-storey shear structure whose storeys are
/// lumped masses joined by four identical cantilever beams. SI units.
struct StructureSpec {
  std::string name = "structure";
  int storeys = 3;
  double beam_length = 0.0;  // l_b
  double beam_width = 0.0;   // w_b
  double beam_thickness = 0.0;  // t_b
  double mass_length = 0.0;  // l_m
  double mass_width = 0.0;   // w_m
  double mass_thickness = 0.0;  // t_m
  double crack_depth = 0.0;     // l_cr, across the beam width
  double crack_location = 0.0;  // l_loc, measured from the beam tip
  GaussianDist elastic_modulus;  // Pa, variance Pa²
  GaussianDist density;          // kg/m³
  GammaDist damping;             // N·s/m
  int n_features = 3;

  /// Throws if any invariant is violated.
  void validate() const;

  /// Config form uses the units of the published property tables (mm, GPa).
  [[nodiscard]] static StructureSpec from_config(const KeyValueConfig& config);
  [[nodiscard]] std::string to_config() const;
  [[nodiscard]] std::string to_json() const;

  // Bundled populations.
  [[nodiscard]] static StructureSpec three_storey_source();
  [[nodiscard]] static StructureSpec three_storey_target();
  [[nodiscard]] static StructureSpec heterogeneous_source();  // 3 storeys
  [[nodiscard]] static StructureSpec heterogeneous_target();  // 7 storeys
};

struct SampleDraw {
  double elastic_modulus = 0.0;
  double density = 0.0;
  double damping = 0.0;
  /// 1-based storey index; absent for the undamaged structure.
  std::optional<int> damage_storey;
};

struct StructuralSystem {
  Matrix mass;
  Matrix damping;
  Matrix stiffness;
};

struct ModalFeatures {
  Vector omega_d;  // rad/s, ascending
  Vector f_d;      // Hz
};

/// k_b = 3EI/l³ with I = w t³/12.
[[nodiscard]] double beam_tip_stiffness(double e, double length, double width, double thickness);

/// Tip stiffness of a cantilever whose second moment drops to
/// (w - l_cr) t³/12 over a zone of length 2t centred `crack_location` from
/// the tip; the compliance integral ∫ s²/(E I(s)) ds is evaluated piecewise.
[[nodiscard]] double damaged_beam_stiffness(double e, double length, double width, double thickness,
                                            double crack_depth, double crack_location);

[[nodiscard]] StructuralSystem build_system(const StructureSpec& spec, const SampleDraw& draw);

/// Lowest `n_features` damped natural frequencies from the eigenvalues of
/// the first-order state matrix. Throws ErrorKind::kOverdamped when a
/// requested mode has no oscillatory pair.
[[nodiscard]] ModalFeatures damped_frequencies(const Matrix& m, const Matrix& c, const Matrix& k, int n_features);

/// Draws E, ρ, c for one sample from `engine`.
[[nodiscard]] SampleDraw draw_sample(const StructureSpec& spec, Engine& engine, std::optional<int> damage_storey);

/// Simulates class_counts[c] structures per class (0 = undamaged, i = crack
/// at storey i). Sample j uses stream derive_seed(seed, j), with j running
/// over classes in ascending order. Features are f_d in Hz.
[[nodiscard]] LabeledDataset generate_domain(const StructureSpec& spec, const std::map<ClassId, std::size_t>& class_counts,
                                             Seed seed);

/// Parses "0:200,1:200,3:150".
[[nodiscard]] std::map<ClassId, std::size_t> parse_class_counts(std::string_view text);

}  // namespace sadapt
