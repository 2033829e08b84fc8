#pragma once

#include <optional>
#include <span>
#include <vector>

namespace sadapt {

/// Silverman's rule 0.9 · min(σ, IQR/1.34) · n^(-1/5). σ uses denominator
/// n-1 and the IQR linear-interpolated quantiles; a zero IQR falls back to
/// σ. Throws on fewer than 2 points or zero spread.
[[nodiscard]] double silverman_bandwidth(std::span<const double> sample);

/// 1-D Gaussian kernel density estimate.
class KdeModel {
 public:
  explicit KdeModel(std::vector<double> sample, std::optional<double> bandwidth = std::nullopt);

  [[nodiscard]] double bandwidth() const noexcept { return bandwidth_; }
  [[nodiscard]] const std::vector<double>& sample() const noexcept { return sample_; }
  [[nodiscard]] double density(double x) const;
  [[nodiscard]] std::vector<double> evaluate(std::span<const double> grid) const;

 private:
  std::vector<double> sample_;
  double bandwidth_;
};

[[nodiscard]] std::vector<double> kde_1d(std::span<const double> sample, std::span<const double> grid,
                                         std::optional<double> bandwidth = std::nullopt);

/// `points` evenly spaced values spanning the sample range padded by
/// `pad_bandwidths` bandwidths on each side.
[[nodiscard]] std::vector<double> kde_grid(const KdeModel& model, std::size_t points = 200,
                                           double pad_bandwidths = 4.0);

}  // namespace sadapt
