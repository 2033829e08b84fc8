#include "sadapt/alignment.hpp"

#include "sadapt/diagnostics.hpp"
#include "sadapt/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sadapt {
namespace {

Matrix gather_rows(const Matrix& x, std::span<const std::size_t> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= static_cast<std::size_t>(x.rows())) {
      throw Error(ErrorKind::kInvalidArgument,
                  "row index " + std::to_string(rows[r]) + " out of range for " +
                      std::to_string(x.rows()) + " rows");
    }
    out.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(rows[r]));
  }
  return out;
}

RowIndices all_rows(const Matrix& x) {
  RowIndices rows(static_cast<std::size_t>(x.rows()));
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

void require_same_dim(const Matrix& xs, const Matrix& xt) {
  if (xs.cols() != xt.cols()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "source has d=" + std::to_string(xs.cols()) + ", target has d=" +
                    std::to_string(xt.cols()));
  }
}

double relative_frobenius(const Matrix& a, const Matrix& reference) {
  const double ref = reference.norm();
  return (a - reference).norm() / (ref > 0.0 ? ref : 1.0);
}

void report(std::vector<PostCheck>& checks, std::string name, double residual, double tolerance) {
  PostCheck check{std::move(name), residual, tolerance};
  if (!check.passed()) {
    warn("post-check '" + check.name + "' residual " + std::to_string(residual) +
         " exceeds " + std::to_string(tolerance));
  }
  checks.push_back(std::move(check));
}

// Max deviation of per-feature moments from (0, 1), skipping features whose
// std was floored.
void check_standardised(std::vector<PostCheck>& checks, const std::string& domain,
                        const Matrix& z, const MomentStats& fitted) {
  const MomentStats got = fit_moments(z);
  double mean_dev = 0.0;
  double std_dev = 0.0;
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    if (std::find(fitted.degenerate_features.begin(), fitted.degenerate_features.end(), j) !=
        fitted.degenerate_features.end()) {
      continue;
    }
    mean_dev = std::max(mean_dev, std::abs(got.mean(j)));
    std_dev = std::max(std_dev, std::abs(got.std(j) - 1.0));
  }
  report(checks, domain + " mean = 0", mean_dev, 1e-10);
  report(checks, domain + " std = 1", std_dev, 1e-10);
}

}  // namespace

MomentStats fit_moments(const Matrix& x) { return fit_moments(x, all_rows(x)); }

MomentStats fit_moments(const Matrix& x, std::span<const std::size_t> rows) {
  if (rows.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument,
                "moments need at least 2 rows, got " + std::to_string(rows.size()));
  }
  const Matrix sel = gather_rows(x, rows);
  const double n = static_cast<double>(sel.rows());

  MomentStats stats;
  stats.n_used = rows.size();
  stats.mean = sel.colwise().sum().transpose() / n;
  const Matrix centred = sel.rowwise() - stats.mean.transpose();
  stats.std = (centred.colwise().squaredNorm().transpose() / n).cwiseSqrt();

  for (Eigen::Index j = 0; j < sel.cols(); ++j) {
    const double range = sel.col(j).maxCoeff() - sel.col(j).minCoeff();
    if (stats.std(j) == 0.0 || stats.std(j) < kStdFloor * range || stats.std(j) < kStdFloor) {
      stats.degenerate_features.push_back(j);
      stats.std(j) = kStdFloor;
      warn("feature " + std::to_string(j) + " is degenerate (constant over " +
           std::to_string(rows.size()) + " rows); std floored");
    }
  }
  return stats;
}

AffineAlignment::AffineAlignment(Vector scale, Vector shift, std::optional<Matrix> mixing,
                                 std::vector<FitProvenance> fitted_on)
    : scale_(std::move(scale)),
      shift_(std::move(shift)),
      mixing_(std::move(mixing)),
      fitted_on_(std::move(fitted_on)) {
  if (scale_.size() != shift_.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "scale and shift lengths differ");
  }
  if (!scale_.allFinite() || !shift_.allFinite()) {
    throw Error(ErrorKind::kNumerical, "non-finite scale or shift");
  }
  if (mixing_) {
    if (mixing_->rows() != scale_.size() || mixing_->cols() != scale_.size()) {
      throw Error(ErrorKind::kDimensionMismatch, "mixing matrix must be d x d");
    }
    if (!mixing_->allFinite()) throw Error(ErrorKind::kNumerical, "non-finite mixing matrix");
    Eigen::JacobiSVD<Matrix> svd(*mixing_);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 0.0) throw Error(ErrorKind::kNumerical, "mixing matrix is singular");
    condition_ = sv(0) / sv(sv.size() - 1);
  }
}

AffineAlignment AffineAlignment::standardising(const MomentStats& stats, FitProvenance provenance) {
  Vector scale = stats.std.cwiseInverse();
  Vector shift = -stats.mean.cwiseProduct(scale);
  return AffineAlignment(std::move(scale), std::move(shift), std::nullopt, {std::move(provenance)});
}

Matrix AffineAlignment::apply(const Matrix& x) const {
  if (x.cols() != scale_.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "transform fitted for d=" +
                                                   std::to_string(scale_.size()) + ", got d=" +
                                                   std::to_string(x.cols()));
  }
  Matrix z = (x.array().rowwise() * scale_.transpose().array()).matrix();
  z.rowwise() += shift_.transpose();
  if (mixing_) z = z * (*mixing_);
  return z;
}

Matrix AffineAlignment::invert(const Matrix& z) const {
  if (z.cols() != scale_.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "inverse transform dimension mismatch");
  }
  Matrix y = mixing_ ? Matrix(mixing_->transpose().partialPivLu().solve(z.transpose()).transpose()) : z;
  y.rowwise() -= shift_.transpose();
  return (y.array().rowwise() / scale_.transpose().array()).matrix();
}

std::string AffineAlignment::to_json() const {
  nlohmann::ordered_json j;
  j["scale"] = std::vector<double>(scale_.data(), scale_.data() + scale_.size());
  j["shift"] = std::vector<double>(shift_.data(), shift_.data() + shift_.size());
  if (mixing_) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < mixing_->rows(); ++i) {
      std::vector<double> row(static_cast<std::size_t>(mixing_->cols()));
      for (Eigen::Index k = 0; k < mixing_->cols(); ++k) row[static_cast<std::size_t>(k)] = (*mixing_)(i, k);
      rows.push_back(row);
    }
    j["mixing"] = rows;
    j["mixing_condition"] = condition_;
  }
  nlohmann::ordered_json prov = nlohmann::ordered_json::array();
  for (const auto& p : fitted_on_) {
    prov.push_back({{"domain", p.domain}, {"rows", p.rows}, {"n_rows", p.n_rows}});
  }
  j["fitted_on"] = prov;
  return j.dump();
}

AffineAlignment AffineAlignment::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("alignment JSON: ") + e.what());
  }
  try {
    const auto scale = j.at("scale").get<std::vector<double>>();
    const auto shift = j.at("shift").get<std::vector<double>>();
    std::optional<Matrix> mixing;
    if (j.contains("mixing")) {
      const auto rows = j.at("mixing").get<std::vector<std::vector<double>>>();
      Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size()) throw Error(ErrorKind::kParse, "mixing must be square");
        for (std::size_t k = 0; k < rows.size(); ++k) {
          m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
        }
      }
      mixing = std::move(m);
    }
    std::vector<FitProvenance> prov;
    if (j.contains("fitted_on")) {
      for (const auto& p : j.at("fitted_on")) {
        prov.push_back({p.at("domain").get<std::string>(), p.at("rows").get<std::string>(),
                        p.at("n_rows").get<std::size_t>()});
      }
    }
    return AffineAlignment(Eigen::Map<const Vector>(scale.data(), static_cast<Eigen::Index>(scale.size())),
                           Eigen::Map<const Vector>(shift.data(), static_cast<Eigen::Index>(shift.size())),
                           std::move(mixing), std::move(prov));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("alignment JSON: ") + e.what());
  }
}

Matrix CovarianceEstimate::ridged() const {
  Matrix c = sample;
  c.diagonal().array() += ridge;
  return c;
}

CovarianceEstimate fit_covariance(const Matrix& x) { return fit_covariance(x, all_rows(x)); }

CovarianceEstimate fit_covariance(const Matrix& x, std::span<const std::size_t> rows) {
  if (rows.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument,
                "covariance needs at least 2 rows, got " + std::to_string(rows.size()));
  }
  const Matrix sel = gather_rows(x, rows);
  const auto d = static_cast<std::size_t>(sel.cols());
  const Matrix centred = sel.rowwise() - sel.colwise().mean();

  CovarianceEstimate est;
  est.n_used = rows.size();
  est.sample = (centred.transpose() * centred) / static_cast<double>(rows.size() - 1);
  est.sample = 0.5 * (est.sample + est.sample.transpose()).eval();
  const double trace = est.sample.trace();
  est.ridge = kRidgeFactor * (trace > 0.0 ? trace / static_cast<double>(d) : 1.0);
  est.rank_deficient = rows.size() < d + 1;
  if (est.rank_deficient) {
    warn("covariance from " + std::to_string(rows.size()) + " rows in d=" + std::to_string(d) +
         " is singular (n < d+1); relying on the ridge");
  }
  return est;
}

Matrix symmetric_power(const Matrix& c, double exponent, double eigen_floor) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(c);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::kNumerical, "symmetric eigendecomposition failed");
  }
  Vector lambda = es.eigenvalues();
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    lambda(i) = std::max(lambda(i), eigen_floor);
    if (!(lambda(i) > 0.0)) {
      throw Error(ErrorKind::kNumerical, "covariance eigenvalue <= 0 after regularisation");
    }
    lambda(i) = std::pow(lambda(i), exponent);
  }
  const Matrix& v = es.eigenvectors();
  return v * lambda.asDiagonal() * v.transpose();
}

Matrix coral_mixing(const CovarianceEstimate& source, const CovarianceEstimate& target) {
  if (source.sample.rows() != target.sample.rows()) {
    throw Error(ErrorKind::kDimensionMismatch, "covariance dimensions differ");
  }
  // Eigenvalues below the ridge floor are clipped to it; well-conditioned
  // covariances pass through unchanged so Aᵀ Cs A reproduces Ct exactly.
  return symmetric_power(source.sample, -0.5, source.ridge) *
         symmetric_power(target.sample, 0.5, target.ridge);
}

bool AlignmentResult::checks_passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const PostCheck& c) { return c.passed(); });
}

AlignmentResult n_standardise(const Matrix& xs, const Matrix& xt) {
  require_same_dim(xs, xt);
  Matrix pooled(xs.rows() + xt.rows(), xs.cols());
  pooled << xs, xt;
  const MomentStats stats = fit_moments(pooled);
  const auto map = AffineAlignment::standardising(
      stats, {"source+target", "all", static_cast<std::size_t>(pooled.rows())});

  AlignmentResult r{map.apply(xs), map.apply(xt), map, map, {}};

  // Pooled standardisation performs no adaptation: the between-domain mean
  // gap, rescaled by the pooled std, is exactly the raw gap.
  const Vector raw_gap = xt.colwise().mean().transpose() - xs.colwise().mean().transpose();
  const Vector z_gap = r.target.colwise().mean().transpose() - r.source.colwise().mean().transpose();
  const double denom = std::max(raw_gap.cwiseAbs().maxCoeff(), stats.std.maxCoeff());
  report(r.checks, "mean gap preserved",
         (z_gap.cwiseProduct(stats.std) - raw_gap).cwiseAbs().maxCoeff() / denom, 1e-10);
  return r;
}

AlignmentResult a_standardise(const Matrix& xs, const Matrix& xt) {
  require_same_dim(xs, xt);
  const MomentStats ss = fit_moments(xs);
  const MomentStats st = fit_moments(xt);
  auto smap = AffineAlignment::standardising(ss, {"source", "all", ss.n_used});
  auto tmap = AffineAlignment::standardising(st, {"target", "all", st.n_used});
  AlignmentResult r{smap.apply(xs), tmap.apply(xt), std::move(smap), std::move(tmap), {}};
  check_standardised(r.checks, "source", r.source, ss);
  check_standardised(r.checks, "target", r.target, st);
  return r;
}

AlignmentResult coral(const Matrix& xs, const Matrix& xt) {
  AlignmentResult r = a_standardise(xs, xt);
  const CovarianceEstimate cs = fit_covariance(r.source);
  const CovarianceEstimate ct = fit_covariance(r.target);
  const Matrix a = coral_mixing(cs, ct);

  r.source = r.source * a;
  auto prov = r.source_map.fitted_on();
  prov.push_back({"target", "all (covariance)", ct.n_used});
  r.source_map = AffineAlignment(r.source_map.scale(), r.source_map.shift(), a, std::move(prov));

  report(r.checks, "source covariance = target covariance",
         relative_frobenius(fit_covariance(r.source).sample, fit_covariance(r.target).sample), 1e-6);
  return r;
}

AlignmentResult nca(const Matrix& xs, const Matrix& xt, std::span<const std::size_t> normal_rows_s,
                    std::span<const std::size_t> normal_rows_t) {
  require_same_dim(xs, xt);
  if (normal_rows_s.size() < 2 || normal_rows_t.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument,
                "normal-condition subsets need at least 2 rows each (source " +
                    std::to_string(normal_rows_s.size()) + ", target " +
                    std::to_string(normal_rows_t.size()) + ")");
  }
  const MomentStats source_all = fit_moments(xs);
  auto smap = AffineAlignment::standardising(source_all, {"source", "all", source_all.n_used});
  Matrix zs = smap.apply(xs);

  const MomentStats zs_normal = fit_moments(zs, normal_rows_s);
  const MomentStats xt_normal = fit_moments(xt, normal_rows_t);
  Vector scale = zs_normal.std.cwiseQuotient(xt_normal.std);
  Vector shift = zs_normal.mean - xt_normal.mean.cwiseProduct(scale);
  AffineAlignment tmap(std::move(scale), std::move(shift), std::nullopt,
                       {{"target", "normal condition", normal_rows_t.size()},
                        {"source", "normal condition", normal_rows_s.size()}});

  AlignmentResult r{std::move(zs), tmap.apply(xt), std::move(smap), std::move(tmap), {}};

  const MomentStats zt_normal = fit_moments(r.target, normal_rows_t);
  report(r.checks, "normal mean match", (zt_normal.mean - zs_normal.mean).cwiseAbs().maxCoeff(), 1e-10);
  report(r.checks, "normal std match", (zt_normal.std - zs_normal.std).cwiseAbs().maxCoeff(), 1e-10);
  return r;
}

AlignmentResult ncoral(const Matrix& xs, const Matrix& xt, std::span<const std::size_t> normal_rows_s,
                       std::span<const std::size_t> normal_rows_t, double shrinkage) {
  if (!(shrinkage >= 0.0) || !std::isfinite(shrinkage)) {
    throw Error(ErrorKind::kInvalidArgument, "NCORAL shrinkage must be finite and non-negative");
  }
  AlignmentResult r = nca(xs, xt, normal_rows_s, normal_rows_t);
  CovarianceEstimate cs = fit_covariance(r.source, normal_rows_s);
  CovarianceEstimate ct = fit_covariance(r.target, normal_rows_t);
  cs.sample.diagonal().array() += shrinkage;
  ct.sample.diagonal().array() += shrinkage;
  const Matrix a = coral_mixing(cs, ct);

  // Recolour about the source normal mean so the NCA mean alignment holds:
  // z' = (z - μ) A + μ, folded into the shift as shift + μ (A⁻¹ - I).
  const RowVector mu = fit_moments(r.source, normal_rows_s).mean.transpose();
  r.source = ((r.source.rowwise() - mu) * a).rowwise() + mu;

  const Matrix a_inv = a.inverse();
  const RowVector extra = mu * a_inv - mu;
  auto prov = r.source_map.fitted_on();
  prov.push_back({"source", "normal condition (covariance)", cs.n_used});
  prov.push_back({"target", "normal condition (covariance)", ct.n_used});
  r.source_map = AffineAlignment(r.source_map.scale(), r.source_map.shift() + extra.transpose(), a,
                                 std::move(prov));

  // Aᵀ (Cs + λI) A = Ct + λI; with λ = 0 this is the plain covariance match.
  const Matrix shrunk_s = fit_covariance(r.source, normal_rows_s).sample + shrinkage * a.transpose() * a;
  report(r.checks, "normal covariance match", relative_frobenius(shrunk_s, ct.sample), 1e-6);
  return r;
}

std::string_view to_string(SaMethod method) noexcept {
  switch (method) {
    case SaMethod::kNStandardise: return "nstd";
    case SaMethod::kAStandardise: return "astd";
    case SaMethod::kCoral: return "coral";
    case SaMethod::kNca: return "nca";
    case SaMethod::kNcoral: return "ncoral";
  }
  return "?";
}

SaMethod parse_sa_method(std::string_view name) {
  for (auto m : {SaMethod::kNStandardise, SaMethod::kAStandardise, SaMethod::kCoral, SaMethod::kNca,
                 SaMethod::kNcoral}) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown alignment method '" + std::string(name) + "'");
}

AlignmentResult align(SaMethod method, const Matrix& xs, const Matrix& xt,
                      std::span<const std::size_t> normal_rows_s,
                      std::span<const std::size_t> normal_rows_t) {
  switch (method) {
    case SaMethod::kNStandardise: return n_standardise(xs, xt);
    case SaMethod::kAStandardise: return a_standardise(xs, xt);
    case SaMethod::kCoral: return coral(xs, xt);
    case SaMethod::kNca: return nca(xs, xt, normal_rows_s, normal_rows_t);
    case SaMethod::kNcoral: return ncoral(xs, xt, normal_rows_s, normal_rows_t);
  }
  throw Error(ErrorKind::kInvalidArgument, "unhandled alignment method");
}

}  // namespace sadapt
