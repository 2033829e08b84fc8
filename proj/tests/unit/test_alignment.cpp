#include "oracles.hpp"

#include "sadapt/alignment.hpp"
#include "sadapt/diagnostics.hpp"
#include "sadapt/error.hpp"
#include "sadapt/rng.hpp"

#include <gtest/gtest.h>

#include <random>

namespace {

using namespace sadapt;

Matrix sample(Eigen::Index n, Seed seed, double scale, double shift) {
  Engine engine(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix x(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = shift + scale * g(engine);
    x(i, 1) = 0.5 * x(i, 0) + scale * g(engine);
    x(i, 2) = -x(i, 1) + 2.0 * scale * g(engine) + (i % 2 ? 3.0 * scale : 0.0);
  }
  return x;
}

RowIndices first(std::size_t n) {
  RowIndices r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = i;
  return r;
}

TEST(Moments, MatchOracle) {
  const Matrix x = sample(57, 1, 2.0, 5.0);
  Vector mean;
  Vector sd;
  oracle::moments(x, mean, sd);
  const MomentStats m = fit_moments(x);
  EXPECT_LT((m.mean - mean).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((m.std - sd).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(m.n_used, 57u);
}

TEST(Moments, DegenerateFeatureIsFlooredWithWarning) {
  Matrix x = sample(20, 2, 1.0, 0.0);
  x.col(1).setConstant(4.0);
  ScopedWarningCapture warnings;
  const MomentStats m = fit_moments(x);
  EXPECT_EQ(m.degenerate_features, (std::vector<Eigen::Index>{1}));
  EXPECT_EQ(m.std(1), kStdFloor);
  EXPECT_TRUE(warnings.contains("degenerate"));
  EXPECT_THROW((void)fit_moments(x.topRows(1)), Error);
}

TEST(Standardise, PooledAndPerDomain) {
  const Matrix xs = sample(200, 3, 1.0, 0.0);
  const Matrix xt = sample(100, 4, 3.0, 10.0);
  const AlignmentResult n = n_standardise(xs, xt);
  Matrix pooled(300, 3);
  pooled << n.source, n.target;
  Vector mean;
  Vector sd;
  oracle::moments(pooled, mean, sd);
  EXPECT_LT(mean.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((sd.array() - 1.0).abs().maxCoeff(), 1e-12);

  const AlignmentResult a = a_standardise(xs, xt);
  for (const Matrix* z : {&a.source, &a.target}) {
    oracle::moments(*z, mean, sd);
    EXPECT_LT(mean.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((sd.array() - 1.0).abs().maxCoeff(), 1e-12);
  }
  EXPECT_TRUE(a.checks_passed());
}

TEST(Coral, StandardisesBeforeRecolouring) {
  const Matrix xs = sample(300, 5, 1.0, 0.0);
  const Matrix xt = sample(200, 6, 4.0, -3.0);
  const AlignmentResult r = coral(xs, xt);
  const AlignmentResult a = a_standardise(xs, xt);
  EXPECT_LT((r.target - a.target).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_TRUE(r.source_map.mixing().has_value());
  EXPECT_GE(r.source_map.mixing_condition(), 1.0);
  const Matrix cs = oracle::covariance(r.source);
  const Matrix ct = oracle::covariance(r.target);
  EXPECT_LT((cs - ct).norm() / ct.norm(), 1e-6);
}

TEST(Nca, NormalMomentsMatchAndTestRowsFollowTheMap) {
  const Matrix xs = sample(400, 7, 1.0, 0.0);
  const Matrix xt = sample(150, 8, 0.2, 40.0);
  const RowIndices ns = first(100);
  const RowIndices nt = first(50);
  const AlignmentResult r = nca(xs, xt, ns, nt);
  const MomentStats ms = fit_moments(r.source, ns);
  const MomentStats mt = fit_moments(r.target, nt);
  EXPECT_LT((ms.mean - mt.mean).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((ms.std - mt.std).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((r.target_map.apply(xt) - r.target).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_TRUE(r.checks_passed());
}

TEST(Ncoral, ShrunkNormalCovariancesMatch) {
  const Matrix xs = sample(400, 9, 1.0, 0.0);
  Matrix xt = sample(200, 10, 2.0, 1.0);
  xt.col(2) *= 0.1;
  const RowIndices ns = first(120);
  const RowIndices nt = first(60);
  for (double lambda : {0.0, 0.1, kNcoralShrinkage}) {
    const AlignmentResult r = ncoral(xs, xt, ns, nt, lambda);
    Matrix zs(120, 3);
    Matrix zt(60, 3);
    for (int i = 0; i < 120; ++i) zs.row(i) = r.source.row(i);
    for (int i = 0; i < 60; ++i) zt.row(i) = r.target.row(i);
    const Matrix id = Matrix::Identity(3, 3);
    const Matrix a = *r.source_map.mixing();
    // Recolouring moves the shrunk source covariance onto the shrunk target one.
    const Matrix lhs = oracle::covariance(zs) + lambda * a.transpose() * a;
    const Matrix rhs = oracle::covariance(zt) + lambda * id;
    EXPECT_LT((lhs - rhs).norm() / rhs.norm(), 1e-6) << "lambda " << lambda;
    EXPECT_LT((zs.colwise().mean() - zt.colwise().mean()).cwiseAbs().maxCoeff(), 1e-10);
  }
  EXPECT_THROW((void)ncoral(xs, xt, ns, nt, -1.0), Error);
}

TEST(AffineAlignment, InvertAndJsonRoundTrip) {
  const Matrix x = sample(30, 11, 1.0, 2.0);
  const AlignmentResult r = coral(x, sample(30, 12, 2.0, -1.0));
  const AffineAlignment& m = r.source_map;
  EXPECT_LT((m.invert(m.apply(x)) - x).cwiseAbs().maxCoeff(), 1e-10);
  const AffineAlignment back = AffineAlignment::from_json(m.to_json());
  EXPECT_EQ(back.apply(x), m.apply(x));
  EXPECT_EQ(back.fitted_on().size(), m.fitted_on().size());
}

TEST(Alignment, InputValidation) {
  const Matrix xs = sample(30, 13, 1.0, 0.0);
  EXPECT_THROW((void)n_standardise(xs, Matrix::Ones(5, 2)), Error);
  EXPECT_THROW((void)nca(xs, xs, RowIndices{}, first(5)), Error);
  EXPECT_THROW((void)nca(xs, xs, first(5), RowIndices{40}), Error);
  EXPECT_EQ(parse_sa_method("ncoral"), SaMethod::kNcoral);
  EXPECT_EQ(to_string(SaMethod::kAStandardise), "astd");
  EXPECT_THROW((void)parse_sa_method("whiten"), Error);
}

TEST(SymmetricPower, InverseSquareRootWhitens) {
  const Matrix c = oracle::covariance(sample(100, 14, 1.0, 0.0));
  const Matrix w = symmetric_power(c, -0.5, 1e-12);
  EXPECT_LT((w * c * w - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
  const Matrix s = symmetric_power(c, 0.5, 1e-12);
  EXPECT_LT((s * s - c).cwiseAbs().maxCoeff(), 1e-10);
}

}  // namespace
