#include "oracles.hpp"

#include "sadapt/error.hpp"
#include "sadapt/gmm.hpp"
#include "sadapt/kde.hpp"
#include "sadapt/knn.hpp"
#include "sadapt/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace {

using namespace sadapt;

TEST(Knn, NearestNeighbourAndTieRules) {
  Matrix train(4, 1);
  train << 0.0, 2.0, 2.0, 10.0;
  const KnnModel one(train, {5, 7, 8, 9}, 1);
  Matrix test(2, 1);
  test << 1.0, 2.0;
  // x = 1 is equidistant from rows 0 and 1: the lower index wins.
  EXPECT_EQ(one.predict(test), (std::vector<ClassId>{5, 7}));
  // k = 2 at x = 1: one vote each for 5 and 7; class of the lowest index wins.
  const KnnModel two(train, {5, 7, 8, 9}, 2);
  EXPECT_EQ(two.predict(test)[0], 5);
  const KnnModel three(train, {1, 2, 2, 1}, 3);
  EXPECT_EQ(three.predict(test)[1], 2);
}

TEST(Knn, MetricChangesTheNeighbour) {
  Matrix train(2, 2);
  train << 1.0, 0.0, 0.0, 1.5;
  Matrix test = Matrix::Zero(1, 2);
  EXPECT_EQ(KnnModel(train, {0, 1}).predict(test)[0], 0);
  Matrix g = Matrix::Identity(2, 2);
  g(0, 0) = 10.0;
  EXPECT_EQ(KnnModel(train, {0, 1}, 1, g).predict(test)[0], 1);
}

TEST(Knn, Validation) {
  const Matrix train = Matrix::Ones(3, 2);
  EXPECT_THROW(KnnModel(train, {0, 1}, 1), Error);
  EXPECT_THROW(KnnModel(train, {0, 1, 1}, 0), Error);
  EXPECT_THROW(KnnModel(train, {0, 1, 1}, 4), Error);
  EXPECT_THROW(KnnModel(train, {0, 1, 1}, 1, Matrix::Identity(3, 3)), Error);
  EXPECT_THROW((void)KnnModel(train, {0, 1, 1}).predict(Matrix::Ones(1, 3)), Error);
}

Matrix three_clusters(Seed seed) {
  Engine engine(seed);
  std::normal_distribution<double> g(0.0, 0.4);
  Matrix x(300, 2);
  const double cx[3] = {0.0, 5.0, 0.0};
  const double cy[3] = {0.0, 0.0, 5.0};
  for (int i = 0; i < 300; ++i) x.row(i) << cx[i % 3] + g(engine), cy[i % 3] + g(engine);
  return x;
}

TEST(Gmm, RecoversSeparatedClusters) {
  const Matrix x = three_clusters(3);
  const GmmModel m = gmm_fit(x, 3, 1);
  EXPECT_NEAR(m.weights.sum(), 1.0, 1e-12);
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(m.weights(c), 1.0 / 3.0, 0.02);
  const GmmPrediction p = gmm_predict(m, x);
  // Every generating cluster maps to a single component.
  for (int c = 0; c < 3; ++c) {
    for (int i = c; i < 300; i += 3) EXPECT_EQ(p.assignments[static_cast<std::size_t>(i)], p.assignments[static_cast<std::size_t>(c)]);
  }
  EXPECT_LT((p.responsibilities.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
  EXPECT_NEAR(gmm_log_likelihood(m, x), m.log_likelihood_trace.back(), 1e-6 * std::abs(m.log_likelihood_trace.back()));
}

TEST(Gmm, LogLikelihoodMatchesDirectSum) {
  const Matrix x = three_clusters(4);
  const GmmModel m = gmm_fit(x, 2, 9);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double p = 0.0;
    for (int c = 0; c < 2; ++c) {
      const Vector diff = (x.row(i) - m.means.row(c)).transpose();
      const Matrix& s = m.covariances[static_cast<std::size_t>(c)];
      p += m.weights(c) * std::exp(-0.5 * diff.dot(s.inverse() * diff)) / (2.0 * std::numbers::pi * std::sqrt(s.determinant()));
    }
    ll += std::log(p);
  }
  EXPECT_NEAR(gmm_log_likelihood(m, x), ll, 1e-9 * std::abs(ll));
}

TEST(Gmm, Validation) {
  EXPECT_THROW((void)gmm_fit(Matrix::Ones(5, 2), 3, 1), Error);
  EXPECT_THROW((void)gmm_fit(three_clusters(1), 0, 1), Error);
}

TEST(Kde, SilvermanMatchesFormula) {
  const std::vector<double> s{1.0, 2.0, 2.5, 4.0, 7.0, 7.5, 9.0, 12.0};
  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= 8.0;
  double ss = 0.0;
  for (double v : s) ss += (v - mean) * (v - mean);
  const double sigma = std::sqrt(ss / 7.0);
  // Type-7 quartiles of 8 sorted points: positions 1.75 and 5.25.
  const double q1 = 2.0 + 0.75 * 0.5;
  const double q3 = 7.5 + 0.25 * 1.5;
  const double want = 0.9 * std::min(sigma, (q3 - q1) / 1.34) * std::pow(8.0, -0.2);
  EXPECT_NEAR(silverman_bandwidth(s), want, 1e-12);
}

TEST(Kde, ZeroIqrFallsBackToSigma) {
  const std::vector<double> s{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 5.0};
  double mean = 11.0 / 7.0;
  double ss = 0.0;
  for (double v : s) ss += (v - mean) * (v - mean);
  EXPECT_NEAR(silverman_bandwidth(s), 0.9 * std::sqrt(ss / 6.0) * std::pow(7.0, -0.2), 1e-12);
  EXPECT_THROW((void)silverman_bandwidth(std::vector<double>{2.0, 2.0}), Error);
  EXPECT_THROW((void)silverman_bandwidth(std::vector<double>{2.0}), Error);
}

TEST(Kde, IntegratesToOne) {
  Engine engine(5);
  std::normal_distribution<double> g(3.0, 2.0);
  std::vector<double> s(200);
  for (auto& v : s) v = g(engine);
  const KdeModel model(s);
  const auto grid = kde_grid(model, 2000, 6.0);
  const auto dens = model.evaluate(grid);
  double area = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) area += 0.5 * (dens[i] + dens[i - 1]) * (grid[i] - grid[i - 1]);
  EXPECT_NEAR(area, 1.0, 1e-6);
  EXPECT_EQ(kde_1d(s, grid), dens);
  EXPECT_DOUBLE_EQ(model.density(3.0), model.evaluate(std::vector<double>{3.0})[0]);
}

}  // namespace
