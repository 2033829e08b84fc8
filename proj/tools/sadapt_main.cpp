#include "sadapt/bench.hpp"
#include "sadapt/bridge.hpp"
#include "sadapt/dataset_io.hpp"
#include "sadapt/error.hpp"
#include "sadapt/plotdata.hpp"
#include "sadapt/sensitivity.hpp"
#include "sadapt/simulator.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace sadapt;

namespace {

// Exit codes: 1 library error, 2 usage error.
int report_error(std::string_view kind, const std::string& message, int code) {
  nlohmann::ordered_json j;
  j["error"] = {{"kind", kind}, {"message", message}};
  std::cerr << j.dump() << std::endl;
  return code;
}

StructureSpec preset(const std::string& name) {
  if (name == "three_storey_source") return StructureSpec::three_storey_source();
  if (name == "three_storey_target") return StructureSpec::three_storey_target();
  if (name == "heterogeneous_source") return StructureSpec::heterogeneous_source();
  if (name == "heterogeneous_target") return StructureSpec::heterogeneous_target();
  throw Error(ErrorKind::kNotFound, "unknown preset '" + name +
                                        "' (three_storey_source, three_storey_target, heterogeneous_source, "
                                        "heterogeneous_target)");
}

void print_files(const std::vector<fs::path>& files) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& f : files) j.push_back(f.string());
  std::cout << nlohmann::ordered_json{{"written", j}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistic alignment and domain adaptation benchmarks for population-based SHM"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "Simulate a labelled population of damped natural frequencies");
  std::string spec_path;
  std::string preset_name;
  std::string counts_text = "0:100";
  Seed sim_seed = 2022;
  std::string sim_out;
  auto* spec_opt = sim->add_option("--spec", spec_path, "Structure spec (key = value)")->check(CLI::ExistingFile);
  sim->add_option("--preset", preset_name, "Bundled spec instead of --spec")->excludes(spec_opt);
  sim->add_option("--counts", counts_text, "Samples per class, e.g. 0:200,1:200")->capture_default_str();
  sim->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
  sim->add_option("--out", sim_out, "Output CSV")->required();

  auto* bench = app.add_subcommand("bench", "Run a case study and write its report");
  std::string case_name;
  std::string config_path;
  std::string out_dir;
  std::optional<int> repeats;
  std::optional<Seed> bench_seed;
  bench->add_option("case", case_name, "case1, partial, preproc or bridge")
      ->required()
      ->check(CLI::IsMember({"case1", "partial", "preproc", "bridge"}));
  bench->add_option("--config", config_path, "Case config (key = value); defaults otherwise")->check(CLI::ExistingFile);
  bench->add_option("--out-dir", out_dir, "Report directory")->required();
  bench->add_option("--repeats", repeats, "Override the repeat count");
  bench->add_option("--seed", bench_seed, "Override the case seed");

  auto* sens = app.add_subcommand("sensitivity", "Moments of the first s rows for a grid of sample sizes");
  std::string sens_in;
  std::string sizes_text = "10:500:10";
  std::string sens_out;
  sens->add_option("--in", sens_in, "Dataset CSV")->required()->check(CLI::ExistingFile);
  sens->add_option("--sizes", sizes_text, "start:stop:step or a list")->capture_default_str();
  sens->add_option("--out", sens_out, "Output CSV (stdout when omitted)");

  auto* plot = app.add_subcommand("plotdata", "Regenerate scatter, KDE and bar data from a report");
  std::string report_path;
  std::string plot_out;
  double fraction = 0.2;
  Seed plot_seed = 0;
  plot->add_option("--report", report_path, "report.json written by bench")->required()->check(CLI::ExistingFile);
  plot->add_option("--out-dir", plot_out, "Output directory (default: <report dir>/plots)");
  plot->add_option("--fraction", fraction, "Scatter subsample fraction")->capture_default_str();
  plot->add_option("--seed", plot_seed, "Subsample seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), 2);
  }

  try {
    if (*sim) {
      StructureSpec spec;
      if (!spec_path.empty()) {
        spec = StructureSpec::from_config(KeyValueConfig::load(spec_path));
      } else if (!preset_name.empty()) {
        spec = preset(preset_name);
      } else {
        throw Error(ErrorKind::kInvalidArgument, "simulate needs --spec or --preset");
      }
      const LabeledDataset ds = generate_domain(spec, parse_class_counts(counts_text), sim_seed);
      save_dataset(ds, sim_out);
      std::cout << manifest_json(ds) << "\n";
    } else if (*bench) {
      if (case_name == "bridge") {
        BridgeConfig cfg = config_path.empty() ? BridgeConfig{} : BridgeConfig::from_config(KeyValueConfig::load(config_path));
        if (repeats) cfg.repeats = *repeats;
        if (bench_seed) cfg.seed = *bench_seed;
        print_files(write_report(run_bridge_style(cfg), out_dir));
      } else {
        const CaseKind kind = case_name == "case1" ? CaseKind::kCase1
                              : case_name == "partial" ? CaseKind::kPartial
                                                       : CaseKind::kPreproc;
        CaseConfig cfg = config_path.empty() ? CaseConfig::defaults(kind)
                                             : CaseConfig::from_config(kind, KeyValueConfig::load(config_path));
        if (repeats) cfg.repeats = *repeats;
        if (bench_seed) cfg.seed = *bench_seed;
        print_files(write_report(run_case(cfg), out_dir));
      }
    } else if (*sens) {
      const LabeledDataset ds = load_dataset(sens_in);
      const std::string csv = sensitivity_csv(run_sensitivity(ds.features(), parse_sizes(sizes_text)));
      if (sens_out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream out(sens_out);
        if (!out) throw Error(ErrorKind::kIo, "cannot write '" + sens_out + "'");
        out << csv;
      }
    } else if (*plot) {
      const fs::path dir = plot_out.empty() ? fs::path(report_path).parent_path() / "plots" : fs::path(plot_out);
      print_files(export_plotdata_from_report(report_path, dir, fraction, plot_seed));
    }
  } catch (const Error& e) {
    return report_error(to_string(e.kind()), e.what(), 1);
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), 1);
  }
  return 0;
}
