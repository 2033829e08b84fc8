#include "sadapt/simulator.hpp"

#include "sadapt/dataset_io.hpp"
#include "sadapt/error.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace sadapt {
namespace {

constexpr int kMaxRedraws = 100;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorKind::kInvalidArgument, std::string(what) + " must be positive, got " + format_double(v));
  }
}

std::vector<double> triple(const KeyValueConfig& cfg, const std::string& key, std::size_t count) {
  auto v = cfg.get_doubles(key);
  if (v.size() != count) {
    throw Error(ErrorKind::kParse, key + " needs " + std::to_string(count) + " values, got " + std::to_string(v.size()));
  }
  return v;
}

std::string join(std::initializer_list<double> values) {
  std::string out;
  for (double v : values) {
    if (!out.empty()) out += ", ";
    out += format_double(v);
  }
  return out;
}

}  // namespace

void StructureSpec::validate() const {
  if (storeys < 1) throw Error(ErrorKind::kInvalidArgument, "storeys must be >= 1");
  require_positive(beam_length, "beam length");
  require_positive(beam_width, "beam width");
  require_positive(beam_thickness, "beam thickness");
  require_positive(mass_length, "mass length");
  require_positive(mass_width, "mass width");
  require_positive(mass_thickness, "mass thickness");
  if (!(crack_depth >= 0.0 && crack_depth < beam_width)) {
    throw Error(ErrorKind::kInvalidArgument, "crack depth must lie in [0, beam width)");
  }
  if (!(crack_location > 0.0 && crack_location < beam_length)) {
    throw Error(ErrorKind::kInvalidArgument, "crack location must lie in (0, beam length)");
  }
  require_positive(elastic_modulus.mean, "elastic modulus mean");
  require_positive(density.mean, "density mean");
  if (elastic_modulus.variance < 0.0 || density.variance < 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "variances must be non-negative");
  }
  require_positive(damping.shape, "damping shape");
  require_positive(damping.scale, "damping scale");
  if (n_features < 1 || n_features > storeys) {
    throw Error(ErrorKind::kInvalidArgument, "n_features must lie in [1, storeys]");
  }
}

StructureSpec StructureSpec::from_config(const KeyValueConfig& cfg) {
  StructureSpec s;
  s.name = cfg.find("name").value_or("structure");
  s.storeys = static_cast<int>(cfg.get_int("storeys"));
  const auto beam = triple(cfg, "beam_geometry_mm", 3);
  const auto mass = triple(cfg, "mass_geometry_mm", 3);
  const auto crack = triple(cfg, "crack_geometry_mm", 2);
  s.beam_length = beam[0] * 1e-3;
  s.beam_width = beam[1] * 1e-3;
  s.beam_thickness = beam[2] * 1e-3;
  s.mass_length = mass[0] * 1e-3;
  s.mass_width = mass[1] * 1e-3;
  s.mass_thickness = mass[2] * 1e-3;
  s.crack_depth = crack[0] * 1e-3;
  s.crack_location = crack[1] * 1e-3;
  // Table values are in GPa with the variance in GPa².
  s.elastic_modulus = {cfg.get_double("elastic_modulus_mean_gpa") * 1e9,
                       cfg.get_double("elastic_modulus_variance_gpa2") * 1e18};
  s.density = {cfg.get_double("density_mean"), cfg.get_double("density_variance")};
  s.damping = {cfg.get_double("damping_shape"), cfg.get_double("damping_scale")};
  s.n_features = cfg.has("n_features") ? static_cast<int>(cfg.get_int("n_features")) : 3;
  s.validate();
  return s;
}

std::string StructureSpec::to_config() const {
  std::ostringstream out;
  out << "name = " << name << "\n"
      << "storeys = " << storeys << "\n"
      << "beam_geometry_mm = " << join({beam_length * 1e3, beam_width * 1e3, beam_thickness * 1e3}) << "\n"
      << "mass_geometry_mm = " << join({mass_length * 1e3, mass_width * 1e3, mass_thickness * 1e3}) << "\n"
      << "crack_geometry_mm = " << join({crack_depth * 1e3, crack_location * 1e3}) << "\n"
      << "elastic_modulus_mean_gpa = " << format_double(elastic_modulus.mean * 1e-9) << "\n"
      << "elastic_modulus_variance_gpa2 = " << format_double(elastic_modulus.variance * 1e-18) << "\n"
      << "density_mean = " << format_double(density.mean) << "\n"
      << "density_variance = " << format_double(density.variance) << "\n"
      << "damping_shape = " << format_double(damping.shape) << "\n"
      << "damping_scale = " << format_double(damping.scale) << "\n"
      << "n_features = " << n_features << "\n";
  return out.str();
}

std::string StructureSpec::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["storeys"] = storeys;
  j["beam_geometry_m"] = {beam_length, beam_width, beam_thickness};
  j["mass_geometry_m"] = {mass_length, mass_width, mass_thickness};
  j["crack_geometry_m"] = {crack_depth, crack_location};
  j["crack_location_from"] = "tip";
  j["elastic_modulus_pa"] = {{"mean", elastic_modulus.mean}, {"variance", elastic_modulus.variance}};
  j["density_kg_m3"] = {{"mean", density.mean}, {"variance", density.variance}};
  j["damping_gamma"] = {{"shape", damping.shape}, {"scale", damping.scale}};
  j["n_features"] = n_features;
  return j.dump();
}

StructureSpec StructureSpec::three_storey_source() {
  StructureSpec s;
  s.name = "three_storey_source";
  s.storeys = 3;
  s.beam_length = 0.300;
  s.beam_width = 0.040;
  s.beam_thickness = 0.008;
  s.mass_length = 0.400;
  s.mass_width = 0.400;
  s.mass_thickness = 0.040;
  s.crack_depth = 0.020;
  s.crack_location = 0.150;
  s.elastic_modulus = {210e9, 1e-9 * 1e18};
  s.density = {7800.0, 50.0};
  s.damping = {8.0, 0.8};
  return s;
}

StructureSpec StructureSpec::three_storey_target() {
  StructureSpec s;
  s.name = "three_storey_target";
  s.storeys = 3;
  s.beam_length = 0.160;
  s.beam_width = 0.025;
  s.beam_thickness = 0.006;
  s.mass_length = 0.300;
  s.mass_width = 0.250;
  s.mass_thickness = 0.025;
  s.crack_depth = 0.0125;
  s.crack_location = 0.080;
  s.elastic_modulus = {71e9, 1e-10 * 1e18};
  s.density = {2700.0, 10.0};
  s.damping = {50.0, 0.8};
  return s;
}

StructureSpec StructureSpec::heterogeneous_source() {
  StructureSpec s = three_storey_source();
  s.name = "heterogeneous_source";
  return s;
}

StructureSpec StructureSpec::heterogeneous_target() {
  StructureSpec s = three_storey_source();
  s.name = "heterogeneous_target";
  s.storeys = 7;
  return s;
}

double beam_tip_stiffness(double e, double length, double width, double thickness) {
  require_positive(e, "elastic modulus");
  require_positive(length, "beam length");
  require_positive(width, "beam width");
  require_positive(thickness, "beam thickness");
  const double i = width * thickness * thickness * thickness / 12.0;
  return 3.0 * e * i / (length * length * length);
}

double damaged_beam_stiffness(double e, double length, double width, double thickness, double crack_depth,
                              double crack_location) {
  const double kb = beam_tip_stiffness(e, length, width, thickness);
  if (!(crack_depth >= 0.0 && crack_depth < width)) {
    throw Error(ErrorKind::kInvalidArgument, "crack depth must lie in [0, beam width)");
  }
  if (!(crack_location > 0.0 && crack_location < length)) {
    throw Error(ErrorKind::kInvalidArgument, "crack location must lie in (0, beam length)");
  }
  if (crack_depth == 0.0) return kb;
  const double t3 = thickness * thickness * thickness;
  const double i = width * t3 / 12.0;
  const double i_cr = (width - crack_depth) * t3 / 12.0;
  const double s1 = std::max(0.0, crack_location - thickness);
  const double s2 = std::min(length, crack_location + thickness);
  const double base = length * length * length / (3.0 * e * i);
  const double extra = (1.0 / i_cr - 1.0 / i) * (s2 * s2 * s2 - s1 * s1 * s1) / (3.0 * e);
  return 1.0 / (base + extra);
}

StructuralSystem build_system(const StructureSpec& spec, const SampleDraw& draw) {
  spec.validate();
  require_positive(draw.elastic_modulus, "drawn elastic modulus");
  require_positive(draw.density, "drawn density");
  require_positive(draw.damping, "drawn damping");
  if (draw.damage_storey && (*draw.damage_storey < 1 || *draw.damage_storey > spec.storeys)) {
    throw Error(ErrorKind::kInvalidArgument, "damage storey " + std::to_string(*draw.damage_storey) +
                                                 " outside [1, " + std::to_string(spec.storeys) + "]");
  }
  const int n = spec.storeys;
  const double kb = beam_tip_stiffness(draw.elastic_modulus, spec.beam_length, spec.beam_width, spec.beam_thickness);
  std::vector<double> storey_k(static_cast<std::size_t>(n), 4.0 * kb);
  if (draw.damage_storey) {
    const double kd = damaged_beam_stiffness(draw.elastic_modulus, spec.beam_length, spec.beam_width,
                                             spec.beam_thickness, spec.crack_depth, spec.crack_location);
    storey_k[static_cast<std::size_t>(*draw.damage_storey - 1)] = kd + 3.0 * kb;
  }
  const double m = spec.mass_length * spec.mass_width * spec.mass_thickness * draw.density;

  // Storey i joins mass i to mass i-1 (the ground for i = 0).
  auto assemble = [n](const std::vector<double>& coeff) {
    Matrix out = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      const double v = coeff[static_cast<std::size_t>(i)];
      out(i, i) += v;
      if (i > 0) {
        out(i - 1, i - 1) += v;
        out(i - 1, i) -= v;
        out(i, i - 1) -= v;
      }
    }
    return out;
  };
  StructuralSystem sys;
  sys.mass = Matrix::Identity(n, n) * m;
  sys.stiffness = assemble(storey_k);
  sys.damping = assemble(std::vector<double>(static_cast<std::size_t>(n), draw.damping));
  return sys;
}

ModalFeatures damped_frequencies(const Matrix& m, const Matrix& c, const Matrix& k, int n_features) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n || c.rows() != n || c.cols() != n || k.rows() != n || k.cols() != n) {
    throw Error(ErrorKind::kDimensionMismatch, "M, C and K must be square and the same size");
  }
  if (n_features < 1 || n_features > n) {
    throw Error(ErrorKind::kInvalidArgument, "n_features must lie in [1, " + std::to_string(n) + "]");
  }
  const Eigen::LLT<Matrix> m_llt(m);
  if (m_llt.info() != Eigen::Success) throw Error(ErrorKind::kNumerical, "mass matrix is not positive definite");
  Matrix state = Matrix::Zero(2 * n, 2 * n);
  state.topRightCorner(n, n) = Matrix::Identity(n, n);
  state.bottomLeftCorner(n, n) = -m_llt.solve(k);
  state.bottomRightCorner(n, n) = -m_llt.solve(c);
  const Eigen::EigenSolver<Matrix> eig(state, false);
  if (eig.info() != Eigen::Success) throw Error(ErrorKind::kNumerical, "state-matrix eigensolver failed");

  std::vector<double> omegas;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    const double im = eig.eigenvalues()(i).imag();
    if (im > 0.0) omegas.push_back(im);
  }
  std::sort(omegas.begin(), omegas.end());
  if (static_cast<int>(omegas.size()) < n_features) {
    throw Error(ErrorKind::kOverdamped, "mode " + std::to_string(omegas.size() + 1) +
                                            " is overdamped (no oscillatory eigenvalue pair)");
  }
  ModalFeatures out;
  out.omega_d.resize(n_features);
  for (int i = 0; i < n_features; ++i) out.omega_d(i) = omegas[static_cast<std::size_t>(i)];
  out.f_d = out.omega_d / (2.0 * std::numbers::pi);
  return out;
}

SampleDraw draw_sample(const StructureSpec& spec, Engine& engine, std::optional<int> damage_storey) {
  std::normal_distribution<double> e_dist(spec.elastic_modulus.mean, std::sqrt(spec.elastic_modulus.variance));
  std::normal_distribution<double> rho_dist(spec.density.mean, std::sqrt(spec.density.variance));
  std::gamma_distribution<double> c_dist(spec.damping.shape, spec.damping.scale);
  SampleDraw d;
  d.elastic_modulus = e_dist(engine);
  d.density = rho_dist(engine);
  d.damping = c_dist(engine);
  d.damage_storey = damage_storey;
  return d;
}

LabeledDataset generate_domain(const StructureSpec& spec, const std::map<ClassId, std::size_t>& class_counts,
                               Seed seed) {
  spec.validate();
  std::size_t total = 0;
  for (const auto& [cls, count] : class_counts) {
    if (cls < 0 || cls > spec.storeys) {
      throw Error(ErrorKind::kInvalidArgument, "class " + std::to_string(cls) + " outside [0, " +
                                                   std::to_string(spec.storeys) + "]");
    }
    total += count;
  }
  if (total == 0) throw Error(ErrorKind::kInvalidArgument, "class counts request no samples");

  Matrix features(static_cast<Eigen::Index>(total), spec.n_features);
  std::vector<ClassId> labels;
  labels.reserve(total);
  std::size_t row = 0;
  for (const auto& [cls, count] : class_counts) {
    const std::optional<int> storey = cls == kNormalCondition ? std::nullopt : std::optional<int>(cls);
    for (std::size_t j = 0; j < count; ++j, ++row) {
      Engine engine(derive_seed(seed, static_cast<std::uint64_t>(row)));
      SampleDraw draw = draw_sample(spec, engine, storey);
      std::gamma_distribution<double> c_dist(spec.damping.shape, spec.damping.scale);
      std::optional<ModalFeatures> features_row;
      for (int attempt = 0; attempt <= kMaxRedraws && !features_row; ++attempt) {
        if (attempt > 0) draw.damping = c_dist(engine);
        if (!(draw.elastic_modulus > 0.0) || !(draw.density > 0.0)) {
          throw Error(ErrorKind::kInvalidArgument, "sample " + std::to_string(row) +
                                                       " drew a non-positive elastic modulus or density");
        }
        const StructuralSystem sys = build_system(spec, draw);
        try {
          features_row = damped_frequencies(sys.mass, sys.damping, sys.stiffness, spec.n_features);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::kOverdamped) throw;
        }
      }
      if (!features_row) {
        throw Error(ErrorKind::kOverdamped, "sample " + std::to_string(row) + " stayed overdamped after " +
                                                std::to_string(kMaxRedraws) + " damping redraws");
      }
      features.row(static_cast<Eigen::Index>(row)) = features_row->f_d.transpose();
      labels.push_back(cls);
    }
  }
  return LabeledDataset(std::move(features), std::move(labels), spec.name);
}

std::map<ClassId, std::size_t> parse_class_counts(std::string_view text) {
  std::map<ClassId, std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    std::string_view item = text.substr(start, end - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) {
      const std::size_t colon = item.find(':');
      if (colon == std::string_view::npos) {
        throw Error(ErrorKind::kParse, "class count '" + std::string(item) + "' is not of the form class:count");
      }
      const long long cls = parse_int(item.substr(0, colon), "class id");
      const long long count = parse_int(item.substr(colon + 1), "class count");
      if (cls < 0 || count < 0) throw Error(ErrorKind::kParse, "class ids and counts must be non-negative");
      if (out.count(static_cast<ClassId>(cls))) {
        throw Error(ErrorKind::kParse, "class " + std::to_string(cls) + " listed twice");
      }
      out[static_cast<ClassId>(cls)] = static_cast<std::size_t>(count);
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  if (out.empty()) throw Error(ErrorKind::kParse, "no class counts given");
  return out;
}

}  // namespace sadapt
