#include "sadapt/kernel_da.hpp"

#include "krylov.hpp"
#include "sadapt/error.hpp"
#include "sadapt/kernel.hpp"
#include "sadapt/knn.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace sadapt {
namespace {

// M = Σ_k weights(k) · e_k e_kᵀ; every MMD matrix used here has this form
// with one vector per (marginal or class-conditional) term.
struct LowRankMmd {
  std::vector<Vector> vectors;
  std::vector<double> weights;
};

Vector marginal_vector(std::size_t ns, std::size_t nt) {
  Vector e(static_cast<Eigen::Index>(ns + nt));
  e.head(static_cast<Eigen::Index>(ns)).setConstant(1.0 / static_cast<double>(ns));
  e.tail(static_cast<Eigen::Index>(nt)).setConstant(-1.0 / static_cast<double>(nt));
  return e;
}

std::optional<Vector> class_vector(std::span<const ClassId> ys, std::span<const ClassId> yt, ClassId cls) {
  const auto count_s = static_cast<double>(std::count(ys.begin(), ys.end(), cls));
  const auto count_t = static_cast<double>(std::count(yt.begin(), yt.end(), cls));
  if (count_s == 0.0 || count_t == 0.0) return std::nullopt;
  Vector e = Vector::Zero(static_cast<Eigen::Index>(ys.size() + yt.size()));
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (ys[i] == cls) e(static_cast<Eigen::Index>(i)) = 1.0 / count_s;
  }
  for (std::size_t i = 0; i < yt.size(); ++i) {
    if (yt[i] == cls) e(static_cast<Eigen::Index>(ys.size() + i)) = -1.0 / count_t;
  }
  return e;
}

int resolve_dims(const KernelDaOptions& options, Eigen::Index d) {
  if (options.dims > 0) return options.dims;
  return std::max<int>(1, static_cast<int>(d) - 1);
}

void validate(const Matrix& xs, const Matrix& xt, const KernelDaOptions& options) {
  if (xs.cols() != xt.cols()) throw Error(ErrorKind::kDimensionMismatch, "source and target have different d");
  if (xs.rows() < 1 || xt.rows() < 1) throw Error(ErrorKind::kInvalidArgument, "empty domain");
  if (!(options.lambda > 0.0)) throw Error(ErrorKind::kInvalidArgument, "lambda must be positive");
  if (options.dims < 0) throw Error(ErrorKind::kInvalidArgument, "embedding dimension must be >= 1");
  const int m = resolve_dims(options, xs.cols());
  if (m >= xs.rows() + xt.rows()) {
    throw Error(ErrorKind::kInvalidArgument, "embedding dimension " + std::to_string(m) +
                                                 " must be below n_s + n_t = " +
                                                 std::to_string(xs.rows() + xt.rows()));
  }
}

Matrix pool(const Matrix& xs, const Matrix& xt) {
  Matrix pooled(xs.rows() + xt.rows(), xs.cols());
  pooled << xs, xt;
  return pooled;
}

Embedding solve_embedding(Matrix pooled, std::size_t ns, const Matrix& k, const LowRankMmd& mmd,
                          double lambda, int dims, double lengthscale) {
  const Eigen::Index n = k.rows();
  Matrix u(n, static_cast<Eigen::Index>(mmd.vectors.size()));
  for (std::size_t c = 0; c < mmd.vectors.size(); ++c) {
    u.col(static_cast<Eigen::Index>(c)) = std::sqrt(mmd.weights[c]) * (k * mmd.vectors[c]);
  }
  // B = λI + UUᵀ, inverted with the Woodbury identity.
  Matrix small = Matrix::Identity(u.cols(), u.cols()) * lambda + u.transpose() * u;
  const Eigen::LLT<Matrix> small_llt(small);
  if (small_llt.info() != Eigen::Success) throw Error(ErrorKind::kNumerical, "MMD regulariser is not SPD");

  const detail::LinearOp apply_a = [&k](const Vector& x) {
    Vector kx = k * x;
    kx.array() -= kx.mean();
    return Vector(k * kx);
  };
  const detail::LinearOp apply_b = [&u, lambda](const Vector& x) {
    return Vector(lambda * x + u * (u.transpose() * x));
  };
  const detail::LinearOp solve_b = [&u, &small_llt, lambda](const Vector& x) {
    return Vector((x - u * small_llt.solve(u.transpose() * x)) / lambda);
  };

  auto pairs = detail::top_generalized_eigenpairs(n, dims, apply_a, apply_b, solve_b);
  for (Eigen::Index i = 0; i < pairs.values.size(); ++i) {
    if (!(pairs.values(i) > 0.0)) {
      throw Error(ErrorKind::kNumerical, "kernel has fewer than " + std::to_string(dims) +
                                             " informative directions");
    }
  }
  detail::canonicalise_signs(pairs.vectors);

  Embedding emb;
  emb.projection = pairs.vectors * pairs.values.cwiseSqrt().cwiseInverse().asDiagonal();
  emb.train_rows = std::move(pooled);
  emb.n_source = ns;
  emb.lengthscale = lengthscale;
  emb.eigenvalues = pairs.values;
  emb.embedded = k * emb.projection;
  return emb;
}

}  // namespace

Matrix Embedding::source_embedded() const {
  return embedded.topRows(static_cast<Eigen::Index>(n_source));
}

Matrix Embedding::target_embedded() const {
  return embedded.bottomRows(embedded.rows() - static_cast<Eigen::Index>(n_source));
}

std::string Embedding::to_json() const {
  nlohmann::ordered_json j;
  j["lengthscale"] = lengthscale;
  j["dims"] = projection.cols();
  j["n_source"] = n_source;
  j["n_target"] = static_cast<std::size_t>(train_rows.rows()) - n_source;
  j["eigenvalues"] = std::vector<double>(eigenvalues.data(), eigenvalues.data() + eigenvalues.size());
  nlohmann::ordered_json proj = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < projection.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(projection.cols()));
    for (Eigen::Index c = 0; c < projection.cols(); ++c) row[static_cast<std::size_t>(c)] = projection(i, c);
    proj.push_back(row);
  }
  j["projection"] = proj;
  return j.dump();
}

Matrix marginal_mmd_matrix(std::size_t n_source, std::size_t n_target) {
  if (n_source == 0 || n_target == 0) throw Error(ErrorKind::kInvalidArgument, "empty domain");
  const Vector e = marginal_vector(n_source, n_target);
  return e * e.transpose();
}

Matrix conditional_mmd_matrix(std::span<const ClassId> source_labels, std::span<const ClassId> target_labels,
                              ClassId cls) {
  const auto n = static_cast<Eigen::Index>(source_labels.size() + target_labels.size());
  const auto e = class_vector(source_labels, target_labels, cls);
  if (!e) return Matrix::Zero(n, n);
  return (*e) * e->transpose();
}

Matrix centring_matrix(std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  return Matrix::Identity(m, m) - Matrix::Constant(m, m, 1.0 / static_cast<double>(n));
}

KernelDaProblem build_tca_problem(const Matrix& xs, const Matrix& xt, const KernelDaOptions& options) {
  validate(xs, xt, options);
  const Matrix pooled = pool(xs, xt);
  KernelDaProblem p;
  p.lengthscale = options.lengthscale.value_or(median_heuristic(pooled));
  p.kernel = rbf_kernel(pooled, pooled, p.lengthscale);
  p.mmd = marginal_mmd_matrix(static_cast<std::size_t>(xs.rows()), static_cast<std::size_t>(xt.rows()));
  p.centring = centring_matrix(static_cast<std::size_t>(pooled.rows()));
  p.lambda = options.lambda;
  p.balance = options.balance;
  p.dims = resolve_dims(options, xs.cols());
  return p;
}

Embedding tca_fit(const Matrix& xs, const Matrix& xt, const KernelDaOptions& options) {
  validate(xs, xt, options);
  Matrix pooled = pool(xs, xt);
  const double ell = options.lengthscale.value_or(median_heuristic(pooled));
  const Matrix k = rbf_kernel(pooled, pooled, ell);
  const auto ns = static_cast<std::size_t>(xs.rows());
  LowRankMmd mmd{{marginal_vector(ns, static_cast<std::size_t>(xt.rows()))}, {1.0}};
  return solve_embedding(std::move(pooled), ns, k, mmd, options.lambda, resolve_dims(options, xs.cols()), ell);
}

BdaResult bda_fit(const Matrix& xs, std::span<const ClassId> ys, const Matrix& xt, const KernelDaOptions& options,
                  Classifier classifier, std::optional<std::vector<ClassId>> initial_pseudo_labels) {
  validate(xs, xt, options);
  if (ys.size() != static_cast<std::size_t>(xs.rows())) {
    throw Error(ErrorKind::kDimensionMismatch, "source labels do not match source rows");
  }
  if (options.iterations < 1) throw Error(ErrorKind::kInvalidArgument, "BDA needs at least one iteration");
  if (!(options.balance >= 0.0 && options.balance <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "balance factor must lie in [0, 1]");
  }
  const std::set<ClassId> class_set(ys.begin(), ys.end());
  const std::vector<ClassId> classes(class_set.begin(), class_set.end());
  if (initial_pseudo_labels) {
    if (initial_pseudo_labels->size() != static_cast<std::size_t>(xt.rows())) {
      throw Error(ErrorKind::kDimensionMismatch, "initial pseudo-labels do not match target rows");
    }
    for (ClassId c : *initial_pseudo_labels) {
      if (!class_set.count(c)) {
        throw Error(ErrorKind::kInvalidArgument, "class " + std::to_string(c) + " is absent from the source");
      }
    }
  }
  if (!classifier) {
    classifier = [](const Matrix& train, std::span<const ClassId> labels, const Matrix& test) {
      return KnnModel(train, {labels.begin(), labels.end()}, 1).predict(test);
    };
  }

  Matrix pooled = pool(xs, xt);
  const double ell = options.lengthscale.value_or(median_heuristic(pooled));
  const Matrix k = rbf_kernel(pooled, pooled, ell);
  const auto ns = static_cast<std::size_t>(xs.rows());
  const auto nt = static_cast<std::size_t>(xt.rows());
  const int dims = resolve_dims(options, xs.cols());
  const double mu = options.balance;
  const double per_class = mu / static_cast<double>(classes.size());

  BdaResult result;
  std::vector<ClassId> pseudo = initial_pseudo_labels.value_or(std::vector<ClassId>{});
  for (int it = 0; it < options.iterations; ++it) {
    LowRankMmd mmd{{marginal_vector(ns, nt)}, {1.0 - mu}};
    if (!pseudo.empty() && per_class > 0.0) {
      for (ClassId c : classes) {
        // Classes missing from the current pseudo-labels contribute nothing.
        if (auto e = class_vector(ys, pseudo, c)) {
          mmd.vectors.push_back(std::move(*e));
          mmd.weights.push_back(per_class);
        }
      }
    }
    result.embedding = solve_embedding(pooled, ns, k, mmd, options.lambda, dims, ell);
    pseudo = classifier(result.embedding.source_embedded(), ys, result.embedding.target_embedded());
    if (pseudo.size() != nt) throw Error(ErrorKind::kDimensionMismatch, "classifier returned wrong label count");
    result.iterations = it + 1;
  }
  result.pseudo_labels = std::move(pseudo);
  return result;
}

Matrix embed_apply(const Embedding& embedding, const Matrix& rows) {
  if (rows.cols() != embedding.train_rows.cols()) {
    throw Error(ErrorKind::kDimensionMismatch, "embedding expects d=" + std::to_string(embedding.train_rows.cols()) +
                                                   ", got d=" + std::to_string(rows.cols()));
  }
  return rbf_kernel(rows, embedding.train_rows, embedding.lengthscale) * embedding.projection;
}

}  // namespace sadapt
