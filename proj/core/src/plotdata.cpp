#include "sadapt/plotdata.hpp"

#include "sadapt/dataset_io.hpp"
#include "sadapt/diagnostics.hpp"
#include "sadapt/error.hpp"
#include "sadapt/kde.hpp"
#include "sadapt/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace sadapt {
namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  return out;
}

std::string label_cell(const LabeledDataset& ds, std::size_t row) {
  return ds.has_labels() ? std::to_string((*ds.labels())[row]) : std::string();
}

// Method labels contain '+', which is awkward in file names.
std::string file_stem(const std::string& label) {
  std::string out = label;
  std::replace(out.begin(), out.end(), '+', '_');
  return out;
}

void write_kde_rows(std::ofstream& out, const std::string& domain, const LabeledDataset& ds, std::size_t points) {
  std::map<ClassId, RowIndices> groups;
  if (ds.has_labels()) {
    groups = class_index(ds);
  } else {
    RowIndices all(ds.n());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    groups[-1] = all;
  }
  for (const auto& [cls, rows] : groups) {
    for (Eigen::Index f = 0; f < ds.features().cols(); ++f) {
      std::vector<double> sample;
      sample.reserve(rows.size());
      for (std::size_t r : rows) sample.push_back(ds.features()(static_cast<Eigen::Index>(r), f));
      const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
      if (sample.size() < 2 || *lo == *hi) {
        warn("kde: skipping " + domain + " class " + std::to_string(cls) + " feature " + std::to_string(f) +
             " (fewer than two distinct values)");
        continue;
      }
      const KdeModel model(std::move(sample));
      const std::vector<double> grid = kde_grid(model, points);
      const std::vector<double> density = model.evaluate(grid);
      const std::string cls_cell = cls < 0 ? std::string() : std::to_string(cls);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        out << domain << ',' << cls_cell << ",f" << f << ',' << format_double(grid[i]) << ','
            << format_double(density[i]) << '\n';
      }
    }
  }
}

}  // namespace

RowIndices plot_subsample(std::size_t n, double fraction, Seed seed) {
  if (n == 0) throw Error(ErrorKind::kInvalidArgument, "plot_subsample: empty dataset");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "plot fraction must lie in (0, 1]");
  }
  const auto k = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n))), 1, n);
  return sample_without_replacement(n, k, seed);
}

void write_scatter_csv(const PlotSet& set, const fs::path& path, double fraction, Seed seed) {
  std::ofstream out = open_out(path);
  out << "domain,label";
  for (std::size_t f = 0; f < set.source.d(); ++f) out << ",f" << f;
  out << '\n';
  const std::pair<const char*, const LabeledDataset*> domains[] = {{"source", &set.source}, {"target", &set.target}};
  for (const auto& [name, ds] : domains) {
    for (std::size_t r : plot_subsample(ds->n(), fraction, derive_seed(seed, name))) {
      out << name << ',' << label_cell(*ds, r);
      for (Eigen::Index f = 0; f < ds->features().cols(); ++f) {
        out << ',' << format_double(ds->features()(static_cast<Eigen::Index>(r), f));
      }
      out << '\n';
    }
  }
}

void write_kde_csv(const PlotSet& set, const fs::path& path, std::size_t points) {
  std::ofstream out = open_out(path);
  out << "domain,label,feature,x,density\n";
  write_kde_rows(out, "source", set.source, points);
  write_kde_rows(out, "target", set.target, points);
}

void write_bar_csv(const std::vector<MethodSummary>& summary, const fs::path& path) {
  std::ofstream out = open_out(path);
  out << "method,mean,min,max,succeeded,failed\n";
  auto num = [](double v) { return std::isfinite(v) ? format_double(v) : std::string(); };
  for (const MethodSummary& s : summary) {
    out << s.method << ',' << num(s.mean) << ',' << num(s.min) << ',' << num(s.max) << ',' << s.succeeded << ','
        << s.failed << '\n';
  }
}

std::vector<fs::path> export_plotdata(const BenchReport& report, const fs::path& out_dir, double fraction, Seed seed) {
  std::vector<fs::path> written;
  fs::create_directories(out_dir);
  for (const PlotSet& set : report.plots) {
    const std::string stem = file_stem(set.label);
    const fs::path scatter = out_dir / ("scatter_" + stem + ".csv");
    write_scatter_csv(set, scatter, fraction, derive_seed(seed, set.label));
    written.push_back(scatter);
    const fs::path kde = out_dir / ("kde_" + stem + ".csv");
    write_kde_csv(set, kde);
    written.push_back(kde);
  }
  const fs::path bars = out_dir / "macro_f1_bars.csv";
  write_bar_csv(report.summary(), bars);
  written.push_back(bars);
  return written;
}

std::vector<fs::path> export_plotdata_from_report(const fs::path& report_json, const fs::path& out_dir,
                                                  double fraction, Seed seed) {
  std::ifstream in(report_json);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + report_json.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, report_json.string() + ": " + e.what());
  }
  if (!j.contains("summary") || !j.contains("case")) {
    throw Error(ErrorKind::kParse, report_json.string() + ": not a benchmark report");
  }

  std::vector<fs::path> written;
  fs::create_directories(out_dir);
  const fs::path base = report_json.parent_path();
  if (j.contains("plot_sets")) {
    for (const auto& p : j["plot_sets"]) {
      PlotSet set{p["label"].get<std::string>(), load_dataset(base / p["source"].get<std::string>()),
                  load_dataset(base / p["target"].get<std::string>())};
      const std::string stem = file_stem(set.label);
      const fs::path scatter = out_dir / ("scatter_" + stem + ".csv");
      write_scatter_csv(set, scatter, fraction, derive_seed(seed, set.label));
      written.push_back(scatter);
      const fs::path kde = out_dir / ("kde_" + stem + ".csv");
      write_kde_csv(set, kde);
      written.push_back(kde);
    }
  }

  std::vector<MethodSummary> summary;
  for (const auto& s : j["summary"]) {
    auto num = [](const nlohmann::json& v) { return v.is_null() ? std::nan("") : v.get<double>(); };
    summary.push_back({s["method"].get<std::string>(), num(s["mean"]), num(s["min"]), num(s["max"]),
                       s["succeeded"].get<int>(), s["failed"].get<int>()});
  }
  const fs::path bars = out_dir / "macro_f1_bars.csv";
  write_bar_csv(summary, bars);
  written.push_back(bars);
  return written;
}

}  // namespace sadapt
