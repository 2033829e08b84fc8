#include "sadapt/bench.hpp"

#include "sadapt/dataset_io.hpp"
#include "sadapt/error.hpp"
#include "sadapt/plotdata.hpp"
#include "sadapt/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>

namespace sadapt {
namespace {

namespace fs = std::filesystem;

fs::path write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "write failed for '" + path.string() + "'");
  return path;
}

}  // namespace

std::vector<fs::path> write_report(const BenchReport& report, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::vector<fs::path> written;

  nlohmann::ordered_json j = nlohmann::ordered_json::parse(report.to_json());
  nlohmann::ordered_json sets = nlohmann::ordered_json::array();
  if (!report.plots.empty()) fs::create_directories(out_dir / "plot_sets");
  for (const PlotSet& set : report.plots) {
    std::string stem = set.label;
    std::replace(stem.begin(), stem.end(), '+', '_');
    const std::string src = "plot_sets/" + stem + "_source.csv";
    const std::string tgt = "plot_sets/" + stem + "_target.csv";
    save_dataset(set.source, out_dir / src);
    save_dataset(set.target, out_dir / tgt);
    written.push_back(out_dir / src);
    written.push_back(out_dir / tgt);
    sets.push_back({{"label", set.label}, {"source", src}, {"target", tgt}});
  }
  j["plot_sets"] = sets;

  written.push_back(write_text(out_dir / "report.json", j.dump(2) + "\n"));
  written.push_back(write_text(out_dir / "rows.csv", report.rows_csv()));
  written.push_back(write_text(out_dir / "summary.csv", report.summary_csv()));

  if (!report.plots.empty()) {
    double fraction = 0.2;
    Seed seed = 0;
    const auto& cfg = j["config"];
    if (cfg.contains("plot_fraction")) fraction = cfg["plot_fraction"].get<double>();
    if (cfg.contains("seed")) seed = derive_seed(cfg["seed"].get<Seed>(), "plot");
    const auto plots = export_plotdata(report, out_dir / "plots", fraction, seed);
    written.insert(written.end(), plots.begin(), plots.end());
  }
  return written;
}

}  // namespace sadapt
