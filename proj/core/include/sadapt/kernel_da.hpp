#pragma once

#include "sadapt/types.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sadapt {

/// Hyperparameters shared by TCA and BDA.
struct KernelDaOptions {
  /// Frobenius regulariser λ.
  double lambda = 0.1;
  /// Embedding dimension m; 0 means d - 1 (at least 1).
  int dims = 0;
  /// BDA balance factor μ ∈ [0, 1] between marginal and conditional MMD.
  double balance = 0.5;
  /// BDA pseudo-labelling iterations.
  int iterations = 10;
  /// RBF length scale; estimated by the median heuristic on the pooled
  /// inputs when absent.
  std::optional<double> lengthscale;
};

/// Dense form of the TCA/BDA optimisation problem. The solvers never build
/// it (they use the low-rank structure of M); it exists for inspection and
/// for checking the matrix identities.
struct KernelDaProblem {
  Matrix kernel;     // K, (n_s + n_t)²
  Matrix mmd;        // M
  Matrix centring;   // H = I - 11ᵀ/n
  double lambda = 0.1;
  double balance = 0.5;
  int dims = 1;
  double lengthscale = 1.0;
};

/// Kernel embedding learnt on pooled source+target rows. Rows are embedded
/// as k(row, train_rows) · projection.
struct Embedding {
  Matrix projection;      // (n_s + n_t) × m
  Matrix train_rows;      // pooled inputs, source first
  std::size_t n_source = 0;
  double lengthscale = 1.0;
  /// Generalised eigenvalues ν of KHK a = ν (KMK + λI) a for the kept
  /// directions (ν = 1/η of the trace-minimisation pencil), descending.
  Vector eigenvalues;
  /// K · projection for the training rows.
  Matrix embedded;

  [[nodiscard]] Eigen::Index dims() const noexcept { return projection.cols(); }
  [[nodiscard]] Matrix source_embedded() const;
  [[nodiscard]] Matrix target_embedded() const;
  [[nodiscard]] std::string to_json() const;
};

/// M0: 1/n_s² on source-source, 1/n_t² on target-target, -1/(n_s n_t) across.
[[nodiscard]] Matrix marginal_mmd_matrix(std::size_t n_source, std::size_t n_target);

/// M_c over the source rows of class c and the target rows pseudo-labelled c.
/// Zero matrix when c is absent from either side.
[[nodiscard]] Matrix conditional_mmd_matrix(std::span<const ClassId> source_labels,
                                            std::span<const ClassId> target_labels, ClassId cls);

[[nodiscard]] Matrix centring_matrix(std::size_t n);

/// Assembles the dense TCA problem (M = M0) for inspection.
[[nodiscard]] KernelDaProblem build_tca_problem(const Matrix& xs, const Matrix& xt,
                                                const KernelDaOptions& options = {});

/// Transfer component analysis: the m directions minimising
/// tr(AᵀKMKA) + λ tr(AᵀA) subject to AᵀKHKA = I.
[[nodiscard]] Embedding tca_fit(const Matrix& xs, const Matrix& xt, const KernelDaOptions& options = {});

/// Trains on (features, labels) and predicts labels for test rows.
using Classifier = std::function<std::vector<ClassId>(
    const Matrix& train, std::span<const ClassId> train_labels, const Matrix& test)>;

struct BdaResult {
  Embedding embedding;
  std::vector<ClassId> pseudo_labels;
  int iterations = 0;
};

/// Balanced distribution adaptation: TCA with
/// M = (1-μ) M0 + μ (1/C) Σ_c M_c, re-estimating target pseudo-labels with
/// `classifier` (default 1-NN) after each embedding.
[[nodiscard]] BdaResult bda_fit(const Matrix& xs, std::span<const ClassId> ys, const Matrix& xt,
                                const KernelDaOptions& options = {}, Classifier classifier = {},
                                std::optional<std::vector<ClassId>> initial_pseudo_labels = std::nullopt);

/// Out-of-sample extension: k(rows, train_rows) · projection.
[[nodiscard]] Matrix embed_apply(const Embedding& embedding, const Matrix& rows);

}  // namespace sadapt
