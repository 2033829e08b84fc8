#pragma once

#include "sadapt/bench.hpp"

#include <filesystem>
#include <vector>

namespace sadapt {

/// Seeded subsample of round(fraction · n) rows (at least one), ascending.
[[nodiscard]] RowIndices plot_subsample(std::size_t n, double fraction, Seed seed);

/// Columns: domain, label, f1..fd. Each domain is subsampled independently.
void write_scatter_csv(const PlotSet& set, const std::filesystem::path& path, double fraction, Seed seed);

/// Per-domain, per-class, per-feature KDE on a padded grid.
/// Columns: domain, label, feature, x, density. Classes with fewer than two
/// rows or zero spread are skipped with a warning.
void write_kde_csv(const PlotSet& set, const std::filesystem::path& path, std::size_t points = 200);

/// Columns: method, mean, min, max, succeeded, failed.
void write_bar_csv(const std::vector<MethodSummary>& summary, const std::filesystem::path& path);

/// Scatter and KDE files for every plot set plus the bar data, under
/// `out_dir`. Returns the files written.
std::vector<std::filesystem::path> export_plotdata(const BenchReport& report, const std::filesystem::path& out_dir,
                                                   double fraction, Seed seed);

/// Regenerates plot data from a report directory written by write_report
/// (report.json plus its plot_sets/*.csv). Returns the files written.
std::vector<std::filesystem::path> export_plotdata_from_report(const std::filesystem::path& report_json,
                                                               const std::filesystem::path& out_dir,
                                                               double fraction = 0.2, Seed seed = 0);

}  // namespace sadapt
