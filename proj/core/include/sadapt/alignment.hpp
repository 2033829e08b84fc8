#pragma once

#include "sadapt/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sadapt {

/// Standard deviations below this (or exactly zero) are floored to it.
inline constexpr double kStdFloor = 1e-12;
/// Relative ridge: covariances get kRidgeFactor * tr(C)/d on the diagonal.
inline constexpr double kRidgeFactor = 1e-6;

/// Per-feature first and second moments. `std` uses denominator n.
struct MomentStats {
  Vector mean;
  Vector std;
  std::size_t n_used = 0;
  /// Features whose spread collapsed; their std was floored to kStdFloor.
  std::vector<Eigen::Index> degenerate_features;
};

[[nodiscard]] MomentStats fit_moments(const Matrix& x);
[[nodiscard]] MomentStats fit_moments(const Matrix& x, std::span<const std::size_t> rows);

/// Which rows of which domain a transform was fitted on.
struct FitProvenance {
  std::string domain;
  std::string rows;
  std::size_t n_rows = 0;
};

/// z = (x ⊙ scale + shift) · mixing, applied to row vectors x.
class AffineAlignment {
 public:
  AffineAlignment() = default;
  AffineAlignment(Vector scale, Vector shift, std::optional<Matrix> mixing = std::nullopt,
                  std::vector<FitProvenance> fitted_on = {});

  /// z = (x - mean) / std.
  [[nodiscard]] static AffineAlignment standardising(const MomentStats& stats,
                                                     FitProvenance provenance);

  [[nodiscard]] Matrix apply(const Matrix& x) const;
  /// Maps aligned rows back to the input space.
  [[nodiscard]] Matrix invert(const Matrix& z) const;

  [[nodiscard]] Eigen::Index dim() const noexcept { return scale_.size(); }
  [[nodiscard]] const Vector& scale() const noexcept { return scale_; }
  [[nodiscard]] const Vector& shift() const noexcept { return shift_; }
  [[nodiscard]] const std::optional<Matrix>& mixing() const noexcept { return mixing_; }
  /// 2-norm condition number of the mixing matrix (1 when absent).
  [[nodiscard]] double mixing_condition() const noexcept { return condition_; }
  [[nodiscard]] const std::vector<FitProvenance>& fitted_on() const noexcept { return fitted_on_; }

  [[nodiscard]] std::string to_json() const;
  [[nodiscard]] static AffineAlignment from_json(std::string_view text);

 private:
  Vector scale_;
  Vector shift_;
  std::optional<Matrix> mixing_;
  double condition_ = 1.0;
  std::vector<FitProvenance> fitted_on_;
};

/// Sample covariance (denominator n-1) plus its ridge ε·tr(C)/d.
struct CovarianceEstimate {
  Matrix sample;
  double ridge = 0.0;
  std::size_t n_used = 0;
  /// n < d + 1: the sample covariance is singular.
  bool rank_deficient = false;

  [[nodiscard]] Matrix ridged() const;
};

[[nodiscard]] CovarianceEstimate fit_covariance(const Matrix& x);
[[nodiscard]] CovarianceEstimate fit_covariance(const Matrix& x, std::span<const std::size_t> rows);

/// C^p for symmetric C via eigendecomposition, eigenvalues clipped at
/// `eigen_floor` first.
[[nodiscard]] Matrix symmetric_power(const Matrix& c, double exponent, double eigen_floor);

/// A = Cs^{-1/2} Ct^{1/2}, so that Aᵀ Cs A = Ct.
[[nodiscard]] Matrix coral_mixing(const CovarianceEstimate& source, const CovarianceEstimate& target);

struct PostCheck {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  [[nodiscard]] bool passed() const noexcept { return residual <= tolerance; }
};

/// Aligned source/target rows plus the maps that produced them. Apply
/// `target_map` to further target rows (e.g. a held-out test set).
struct AlignmentResult {
  Matrix source;
  Matrix target;
  AffineAlignment source_map;
  AffineAlignment target_map;
  std::vector<PostCheck> checks;

  [[nodiscard]] bool checks_passed() const noexcept;
};

/// Pooled standardisation: one map fitted on Xs ∪ Xt, applied to both.
[[nodiscard]] AlignmentResult n_standardise(const Matrix& xs, const Matrix& xt);

/// Each domain standardised by its own moments.
[[nodiscard]] AlignmentResult a_standardise(const Matrix& xs, const Matrix& xt);

/// Both domains standardised, then the source recoloured so its covariance
/// matches the target's.
[[nodiscard]] AlignmentResult coral(const Matrix& xs, const Matrix& xt);

/// Source standardised on all rows; target mapped so that its normal-
/// condition moments equal those of the standardised source normal rows.
[[nodiscard]] AlignmentResult nca(const Matrix& xs, const Matrix& xt,
                                  std::span<const std::size_t> normal_rows_s,
                                  std::span<const std::size_t> normal_rows_t);

/// Identity shrinkage added to both normal-condition covariances before
/// NCORAL's whitening and recolouring (units of the NCA-standardised space).
inline constexpr double kNcoralShrinkage = 1.0;

/// NCA followed by recolouring of the source about its normal-condition
/// mean so that the shrunk normal-condition covariances C + λI match.
/// Normal-condition clusters are often close to rank one, and matching
/// them exactly amplifies their noise directions without bound; λ = 0
/// gives the unshrunk map.
[[nodiscard]] AlignmentResult ncoral(const Matrix& xs, const Matrix& xt,
                                     std::span<const std::size_t> normal_rows_s,
                                     std::span<const std::size_t> normal_rows_t,
                                     double shrinkage = kNcoralShrinkage);

enum class SaMethod { kNStandardise, kAStandardise, kCoral, kNca, kNcoral };

[[nodiscard]] std::string_view to_string(SaMethod method) noexcept;
/// Accepts "nstd", "astd", "coral", "nca", "ncoral".
[[nodiscard]] SaMethod parse_sa_method(std::string_view name);

[[nodiscard]] AlignmentResult align(SaMethod method, const Matrix& xs, const Matrix& xt,
                                    std::span<const std::size_t> normal_rows_s,
                                    std::span<const std::size_t> normal_rows_t);

}  // namespace sadapt
