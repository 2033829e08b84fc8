#include "sadapt/kde.hpp"

#include "sadapt/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sadapt {
namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

double silverman_bandwidth(std::span<const double> sample) {
  const std::size_t n = sample.size();
  if (n < 2) throw Error(ErrorKind::kInvalidArgument, "KDE needs at least 2 points");
  double mean = 0.0;
  for (double v : sample) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : sample) ss += (v - mean) * (v - mean);
  const double sigma = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sigma > 0.0)) throw Error(ErrorKind::kInvalidArgument, "KDE sample has zero spread");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  const double spread = iqr > 0.0 ? std::min(sigma, iqr / 1.34) : sigma;
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

KdeModel::KdeModel(std::vector<double> sample, std::optional<double> bandwidth)
    : sample_(std::move(sample)), bandwidth_(0.0) {
  for (double v : sample_) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kInvalidArgument, "KDE sample has non-finite values");
  }
  if (bandwidth) {
    if (sample_.empty()) throw Error(ErrorKind::kInvalidArgument, "KDE sample is empty");
    if (!(*bandwidth > 0.0)) throw Error(ErrorKind::kInvalidArgument, "KDE bandwidth must be positive");
    bandwidth_ = *bandwidth;
  } else {
    bandwidth_ = silverman_bandwidth(sample_);
  }
}

double KdeModel::density(double x) const {
  const double norm = 1.0 / (static_cast<double>(sample_.size()) * bandwidth_ * std::sqrt(2.0 * std::numbers::pi));
  double s = 0.0;
  for (double v : sample_) {
    const double u = (x - v) / bandwidth_;
    s += std::exp(-0.5 * u * u);
  }
  return s * norm;
}

std::vector<double> KdeModel::evaluate(std::span<const double> grid) const {
  std::vector<double> out;
  out.reserve(grid.size());
  for (double x : grid) out.push_back(density(x));
  return out;
}

std::vector<double> kde_1d(std::span<const double> sample, std::span<const double> grid,
                           std::optional<double> bandwidth) {
  return KdeModel({sample.begin(), sample.end()}, bandwidth).evaluate(grid);
}

std::vector<double> kde_grid(const KdeModel& model, std::size_t points, double pad_bandwidths) {
  if (points < 2) throw Error(ErrorKind::kInvalidArgument, "KDE grid needs at least 2 points");
  const auto [lo_it, hi_it] = std::minmax_element(model.sample().begin(), model.sample().end());
  const double lo = *lo_it - pad_bandwidths * model.bandwidth();
  const double hi = *hi_it + pad_bandwidths * model.bandwidth();
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return grid;
}

}  // namespace sadapt
