#include "sadapt/bench.hpp"

#include "sadapt/dataset_io.hpp"
#include "sadapt/diagnostics.hpp"
#include "sadapt/error.hpp"
#include "sadapt/gfk.hpp"
#include "sadapt/kernel_da.hpp"
#include "sadapt/knn.hpp"
#include "sadapt/rng.hpp"

#include <json.hpp>

#include <Eigen/Core>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace sadapt {
namespace {

using Json = nlohmann::ordered_json;

Json counts_json(const std::map<ClassId, std::size_t>& counts) {
  Json j = Json::object();
  for (const auto& [c, n] : counts) j[std::to_string(c)] = n;
  return j;
}

std::vector<MethodSpec> grid(std::initializer_list<SaMethod> sas, std::initializer_list<DaMethod> das) {
  std::vector<MethodSpec> out;
  for (SaMethod sa : sas) {
    for (DaMethod da : das) out.push_back({sa, da});
  }
  return out;
}

const std::initializer_list<SaMethod> kAllSa = {SaMethod::kNStandardise, SaMethod::kAStandardise, SaMethod::kCoral,
                                                SaMethod::kNca, SaMethod::kNcoral};

// Target labels are hidden from every method except for the normal-condition
// rows, which the protocol assumes are identified.
AlignmentResult run_alignment(const MethodSpec& method, const Hyperparameters& hyper, const LabeledDataset& source,
                              const LabeledDataset& target) {
  const RowIndices normal_s = rows_of_class(source, kNormalCondition);
  const RowIndices normal_t = rows_of_class(target, kNormalCondition);
  if (method.sa == SaMethod::kNcoral) {
    return ncoral(source.features(), target.features(), normal_s, normal_t, hyper.ncoral_shrinkage);
  }
  return align(method.sa, source.features(), target.features(), normal_s, normal_t);
}

std::string environment_compiler() {
#if defined(__clang__)
  return "clang " __clang_version__;
#elif defined(__GNUC__)
  return "gcc " __VERSION__;
#else
  return "unknown";
#endif
}

}  // namespace

std::string_view to_string(DaMethod method) noexcept {
  switch (method) {
    case DaMethod::kNone: return "none";
    case DaMethod::kTca: return "tca";
    case DaMethod::kBda: return "bda";
    case DaMethod::kGfk: return "gfk";
  }
  return "none";
}

DaMethod parse_da_method(std::string_view name) {
  if (name == "none") return DaMethod::kNone;
  if (name == "tca") return DaMethod::kTca;
  if (name == "bda") return DaMethod::kBda;
  if (name == "gfk") return DaMethod::kGfk;
  throw Error(ErrorKind::kParse, "unknown DA method '" + std::string(name) + "' (expected none, tca, bda, gfk)");
}

std::string MethodSpec::label() const {
  std::string out(to_string(sa));
  if (da != DaMethod::kNone) out += "+" + std::string(to_string(da));
  return out;
}

MethodSpec MethodSpec::parse(std::string_view label) {
  const std::size_t plus = label.find('+');
  MethodSpec m;
  m.sa = parse_sa_method(label.substr(0, plus));
  m.da = plus == std::string_view::npos ? DaMethod::kNone : parse_da_method(label.substr(plus + 1));
  return m;
}

std::string_view to_string(CaseKind kind) noexcept {
  switch (kind) {
    case CaseKind::kCase1: return "case1";
    case CaseKind::kPartial: return "partial";
    case CaseKind::kPreproc: return "preproc";
  }
  return "case1";
}

CaseConfig CaseConfig::case1() {
  CaseConfig c;
  c.kind = CaseKind::kCase1;
  c.source_spec = StructureSpec::three_storey_source();
  c.target_spec = StructureSpec::three_storey_target();
  c.source_counts = {{0, 200}, {1, 200}, {2, 200}, {3, 200}};
  c.target_counts = {{0, 100}, {1, 100}, {2, 100}, {3, 100}};
  c.test_counts = c.target_counts;
  c.methods = grid(kAllSa, {DaMethod::kNone});
  for (DaMethod da : {DaMethod::kTca, DaMethod::kBda, DaMethod::kGfk}) c.methods.push_back({SaMethod::kNStandardise, da});
  return c;
}

CaseConfig CaseConfig::partial() {
  CaseConfig c = case1();
  c.kind = CaseKind::kPartial;
  c.remove_target_classes = {1, 2};
  c.downsample_target = std::make_pair(ClassId{3}, std::size_t{10});
  return c;
}

CaseConfig CaseConfig::preproc() {
  CaseConfig c;
  c.kind = CaseKind::kPreproc;
  c.source_spec = StructureSpec::heterogeneous_source();
  c.target_spec = StructureSpec::heterogeneous_target();
  c.source_counts = {{0, 400}, {1, 150}, {3, 150}};
  c.target_counts = {{0, 200}, {1, 75}, {3, 75}};
  c.test_counts = c.target_counts;
  c.methods = grid(kAllSa, {DaMethod::kNone, DaMethod::kTca, DaMethod::kBda, DaMethod::kGfk});
  return c;
}

CaseConfig CaseConfig::defaults(CaseKind kind) {
  switch (kind) {
    case CaseKind::kCase1: return case1();
    case CaseKind::kPartial: return partial();
    case CaseKind::kPreproc: return preproc();
  }
  return case1();
}

CaseConfig CaseConfig::from_config(CaseKind kind, const KeyValueConfig& cfg) {
  CaseConfig c = defaults(kind);
  auto spec_from = [&cfg](const std::string& key) {
    std::filesystem::path p = cfg.get(key);
    if (p.is_relative()) p = cfg.base_dir() / p;
    return StructureSpec::from_config(KeyValueConfig::load(p));
  };
  if (cfg.has("source_spec")) c.source_spec = spec_from("source_spec");
  if (cfg.has("target_spec")) c.target_spec = spec_from("target_spec");
  if (cfg.has("source_counts")) c.source_counts = parse_class_counts(cfg.get("source_counts"));
  if (cfg.has("target_counts")) c.target_counts = parse_class_counts(cfg.get("target_counts"));
  if (cfg.has("test_counts")) {
    c.test_counts = parse_class_counts(cfg.get("test_counts"));
  } else if (cfg.has("target_counts")) {
    c.test_counts = c.target_counts;
  }
  if (cfg.has("remove_target_classes")) {
    c.remove_target_classes.clear();
    for (const auto& tok : cfg.get_list("remove_target_classes")) {
      c.remove_target_classes.push_back(static_cast<ClassId>(parse_int(tok, "remove_target_classes")));
    }
  }
  if (cfg.has("downsample_target")) {
    const std::string v = cfg.get("downsample_target");
    if (v == "none" || v.empty()) {
      c.downsample_target.reset();
    } else {
      const auto parsed = parse_class_counts(v);
      if (parsed.size() != 1) throw Error(ErrorKind::kParse, "downsample_target takes one class:keep pair");
      c.downsample_target = *parsed.begin();
    }
  }
  if (cfg.has("methods")) {
    c.methods.clear();
    for (const auto& tok : cfg.get_list("methods")) c.methods.push_back(MethodSpec::parse(tok));
  }
  if (cfg.has("seed")) c.seed = cfg.get_u64("seed");
  if (cfg.has("repeats")) c.repeats = static_cast<int>(cfg.get_int("repeats"));
  if (cfg.has("lambda")) c.hyper.lambda = cfg.get_double("lambda");
  if (cfg.has("balance")) c.hyper.balance = cfg.get_double("balance");
  if (cfg.has("dims")) c.hyper.dims = static_cast<int>(cfg.get_int("dims"));
  if (cfg.has("bda_iterations")) c.hyper.bda_iterations = static_cast<int>(cfg.get_int("bda_iterations"));
  if (cfg.has("gfk_k")) c.hyper.gfk_k = static_cast<int>(cfg.get_int("gfk_k"));
  if (cfg.has("knn_k")) c.hyper.knn_k = static_cast<int>(cfg.get_int("knn_k"));
  if (cfg.has("ncoral_shrinkage")) c.hyper.ncoral_shrinkage = cfg.get_double("ncoral_shrinkage");
  if (cfg.has("plot_data")) c.plot_data = cfg.get_bool("plot_data");
  if (cfg.has("plot_fraction")) c.plot_fraction = cfg.get_double("plot_fraction");
  c.validate();
  return c;
}

void CaseConfig::validate() const {
  source_spec.validate();
  target_spec.validate();
  if (source_spec.n_features != target_spec.n_features) {
    throw Error(ErrorKind::kInvalidArgument, "source and target must emit the same number of features");
  }
  if (repeats < 1) throw Error(ErrorKind::kInvalidArgument, "repeats must be >= 1");
  if (methods.empty()) throw Error(ErrorKind::kInvalidArgument, "no methods configured");
  if (!source_counts.count(kNormalCondition) || !target_counts.count(kNormalCondition)) {
    throw Error(ErrorKind::kInvalidArgument, "source and target need normal-condition (class 0) samples");
  }
  if (!(plot_fraction > 0.0 && plot_fraction <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "plot_fraction must lie in (0, 1]");
  }
  if (hyper.knn_k < 1) throw Error(ErrorKind::kInvalidArgument, "knn_k must be >= 1");
}

std::string CaseConfig::to_json() const {
  Json j;
  j["case"] = to_string(kind);
  j["seed"] = seed;
  j["repeats"] = repeats;
  j["source_spec"] = Json::parse(source_spec.to_json());
  j["target_spec"] = Json::parse(target_spec.to_json());
  j["source_counts"] = counts_json(source_counts);
  j["target_counts"] = counts_json(target_counts);
  j["test_counts"] = counts_json(test_counts);
  j["remove_target_classes"] = remove_target_classes;
  if (downsample_target) {
    j["downsample_target"] = {{"class", downsample_target->first}, {"keep", downsample_target->second}};
  } else {
    j["downsample_target"] = nullptr;
  }
  Json m = Json::array();
  for (const auto& spec : methods) m.push_back(spec.label());
  j["methods"] = m;
  j["hyperparameters"] = {{"lambda", hyper.lambda},
                          {"balance", hyper.balance},
                          {"dims", hyper.dims == 0 ? std::max(1, source_spec.n_features - 1) : hyper.dims},
                          {"bda_iterations", hyper.bda_iterations},
                          {"gfk_k", hyper.gfk_k},
                          {"knn_k", hyper.knn_k},
                          {"ncoral_shrinkage", hyper.ncoral_shrinkage},
                          {"lengthscale", "median heuristic on pooled aligned inputs"}};
  j["plot_data"] = plot_data;
  j["plot_fraction"] = plot_fraction;
  return j.dump();
}

MethodRow evaluate_method(const MethodSpec& method, const Hyperparameters& hyper, const LabeledDataset& source,
                          const LabeledDataset& target, const LabeledDataset& test) {
  MethodRow row;
  row.method = method;
  const auto start = std::chrono::steady_clock::now();
  try {
    const auto& ys = source.require_labels();
    const auto& y_test = test.require_labels();
    const AlignmentResult aligned = run_alignment(method, hyper, source, target);
    const Matrix z_test = aligned.target_map.apply(test.features());
    row.fitted["mixing_condition"] = aligned.source_map.mixing_condition();
    row.fitted["post_checks_passed"] = aligned.checks_passed() ? 1.0 : 0.0;

    KernelDaOptions opts;
    opts.lambda = hyper.lambda;
    opts.balance = hyper.balance;
    opts.dims = hyper.dims;
    opts.iterations = hyper.bda_iterations;

    std::vector<ClassId> pred;
    switch (method.da) {
      case DaMethod::kNone:
        pred = KnnModel(aligned.source, ys, hyper.knn_k).predict(z_test);
        break;
      case DaMethod::kTca: {
        const Embedding emb = tca_fit(aligned.source, aligned.target, opts);
        row.fitted["lengthscale"] = emb.lengthscale;
        row.fitted["dims"] = static_cast<double>(emb.dims());
        pred = KnnModel(emb.source_embedded(), ys, hyper.knn_k).predict(embed_apply(emb, z_test));
        break;
      }
      case DaMethod::kBda: {
        const int k = hyper.knn_k;
        const Classifier classifier = [k](const Matrix& train, std::span<const ClassId> labels, const Matrix& test_rows) {
          return KnnModel(train, {labels.begin(), labels.end()}, k).predict(test_rows);
        };
        const BdaResult bda = bda_fit(aligned.source, ys, aligned.target, opts, classifier);
        row.fitted["lengthscale"] = bda.embedding.lengthscale;
        row.fitted["dims"] = static_cast<double>(bda.embedding.dims());
        row.fitted["iterations"] = bda.iterations;
        pred = KnnModel(bda.embedding.source_embedded(), ys, hyper.knn_k).predict(embed_apply(bda.embedding, z_test));
        break;
      }
      case DaMethod::kGfk: {
        const GeodesicKernel g = gfk(aligned.source, aligned.target, hyper.gfk_k);
        row.fitted["principal_angle_0"] = g.principal_angles(0);
        pred = KnnModel(aligned.source, ys, hyper.knn_k, g.g).predict(z_test);
        break;
      }
    }
    row.macro_f1 = macro_f1(y_test, pred);
    row.confusion = confusion(y_test, pred);
  } catch (const std::exception& e) {
    row.error = e.what();
    row.macro_f1.reset();
    row.confusion.reset();
  }
  row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

BenchReport run_case(const CaseConfig& config) {
  config.validate();
  BenchReport report;
  report.case_id = std::string(to_string(config.kind));
  report.config_json = config.to_json();
  report.metadata = {
      {"sadapt_version", SADAPT_VERSION},
      {"compiler", environment_compiler()},
      {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)},
      {"features", "damped natural frequencies in Hz, ascending"},
      {"coral_input", "A-standardised features"},
      {"ncoral_covariance", "normal-condition covariance plus identity shrinkage"},
      {"tca_selection", "largest nu of KHK a = nu (KMK + lambda I) a, i.e. smallest eta of the trace problem"},
      {"gfk_complement", "augments the source basis"},
      {"damping_distribution", "gamma, shape-scale"},
      {"gaussian_second_argument", "variance"},
      {"crack_location", "measured from the beam tip"},
      {"target_labels_used", "normal-condition rows only"},
  };

  for (int r = 0; r < config.repeats; ++r) {
    const Seed repeat_seed = derive_seed(config.seed, static_cast<std::uint64_t>(r));
    LabeledDataset source = generate_domain(config.source_spec, config.source_counts, derive_seed(repeat_seed, "source"));
    LabeledDataset target = generate_domain(config.target_spec, config.target_counts, derive_seed(repeat_seed, "target"));
    LabeledDataset test = generate_domain(config.target_spec, config.test_counts, derive_seed(repeat_seed, "test"));
    source = source.with_domain_tag("source");
    target = target.with_domain_tag("target");
    test = test.with_domain_tag("target_test");
    for (ClassId c : config.remove_target_classes) {
      target = remove_class(target, c);
      test = remove_class(test, c);
    }
    if (config.downsample_target) {
      const auto [cls, keep] = *config.downsample_target;
      target = downsample_class(target, cls, keep, derive_seed(repeat_seed, "downsample_target"));
      test = downsample_class(test, cls, keep, derive_seed(repeat_seed, "downsample_test"));
    }

    if (r == 0 && config.plot_data) report.plots.push_back({"raw", source, test});

    for (const MethodSpec& method : config.methods) {
      MethodRow row = evaluate_method(method, config.hyper, source, target, test);
      row.repeat = r;
      row.seed = repeat_seed;
      if (row.error) warn("case " + report.case_id + ", method " + method.label() + ", repeat " + std::to_string(r) + ": " + *row.error);
      report.rows.push_back(std::move(row));

      if (r == 0 && config.plot_data && method.da == DaMethod::kNone) {
        try {
          const AlignmentResult aligned = run_alignment(method, config.hyper, source, target);
          report.plots.push_back({method.label(), source.with_features(aligned.source),
                                  test.with_features(aligned.target_map.apply(test.features()))});
        } catch (const Error&) {
          // The failure is already recorded in the method row.
        }
      }
    }
  }
  return report;
}

BenchReport run_case1(const CaseConfig& config) { return run_case(config); }
BenchReport run_case_partial(const CaseConfig& config) { return run_case(config); }
BenchReport run_case_preproc(const CaseConfig& config) { return run_case(config); }

std::vector<MethodSummary> BenchReport::summary() const {
  std::vector<MethodSummary> out;
  std::map<std::string, std::size_t> index;
  for (const MethodRow& row : rows) {
    const std::string label = row.method.label();
    auto it = index.find(label);
    if (it == index.end()) {
      it = index.emplace(label, out.size()).first;
      out.push_back({label, 0.0, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0, 0});
    }
    MethodSummary& s = out[it->second];
    if (row.macro_f1) {
      s.mean += *row.macro_f1;
      s.min = std::min(s.min, *row.macro_f1);
      s.max = std::max(s.max, *row.macro_f1);
      ++s.succeeded;
    } else {
      ++s.failed;
    }
  }
  for (MethodSummary& s : out) {
    if (s.succeeded > 0) {
      s.mean /= s.succeeded;
    } else {
      s.mean = s.min = s.max = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

std::optional<double> BenchReport::score(const std::string& method, int repeat) const {
  for (const MethodRow& row : rows) {
    if (row.repeat == repeat && row.method.label() == method) return row.macro_f1;
  }
  return std::nullopt;
}

std::string BenchReport::to_json() const {
  Json j;
  j["case"] = case_id;
  j["config"] = Json::parse(config_json);
  Json meta = Json::object();
  for (const auto& [k, v] : metadata) meta[k] = v;
  j["metadata"] = meta;
  Json rows_json = Json::array();
  for (const MethodRow& row : rows) {
    Json r;
    r["method"] = row.method.label();
    r["alignment"] = to_string(row.method.sa);
    r["da"] = to_string(row.method.da);
    r["repeat"] = row.repeat;
    r["seed"] = row.seed;
    r["macro_f1"] = row.macro_f1 ? Json(*row.macro_f1) : Json(nullptr);
    r["confusion"] = row.confusion ? Json::parse(row.confusion->to_json()) : Json(nullptr);
    r["wall_seconds"] = row.wall_seconds;
    Json fitted = Json::object();
    for (const auto& [k, v] : row.fitted) fitted[k] = v;
    r["fitted"] = fitted;
    r["error"] = row.error ? Json(*row.error) : Json(nullptr);
    rows_json.push_back(r);
  }
  j["rows"] = rows_json;
  Json summary_json = Json::array();
  for (const MethodSummary& s : summary()) {
    auto num = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
    summary_json.push_back({{"method", s.method},
                            {"mean", num(s.mean)},
                            {"min", num(s.min)},
                            {"max", num(s.max)},
                            {"succeeded", s.succeeded},
                            {"failed", s.failed}});
  }
  j["summary"] = summary_json;
  j["extras"] = Json::parse(extras_json);
  return j.dump(2);
}

std::string BenchReport::rows_csv() const {
  std::ostringstream out;
  out << "case,method,alignment,da,repeat,seed,macro_f1,wall_seconds,error\n";
  for (const MethodRow& row : rows) {
    std::string err = row.error.value_or("");
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << case_id << ',' << row.method.label() << ',' << to_string(row.method.sa) << ',' << to_string(row.method.da)
        << ',' << row.repeat << ',' << row.seed << ',' << (row.macro_f1 ? format_double(*row.macro_f1) : "") << ','
        << format_double(row.wall_seconds) << ',' << err << '\n';
  }
  return out.str();
}

std::string BenchReport::summary_csv() const {
  std::ostringstream out;
  out << "case,method,mean_macro_f1,min_macro_f1,max_macro_f1,succeeded,failed\n";
  for (const MethodSummary& s : summary()) {
    auto num = [](double v) { return std::isfinite(v) ? format_double(v) : std::string(); };
    out << case_id << ',' << s.method << ',' << num(s.mean) << ',' << num(s.min) << ',' << num(s.max) << ','
        << s.succeeded << ',' << s.failed << '\n';
  }
  return out.str();
}

}  // namespace sadapt
