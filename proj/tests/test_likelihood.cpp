#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cohsmix/likelihood.hpp"
#include "oracles.hpp"

using namespace cohsmix;

namespace {

ModelParams two_class_params() {
  ModelParams th;
  th.alpha = Vector(2);
  th.alpha << 0.3, 0.7;
  th.pi = Matrix(2, 2);
  th.pi << 0.8, 0.15, 0.15, 0.6;
  th.mu = Matrix(2, 2);
  th.mu << 0.0, 1.0, 2.0, -1.0;
  th.sigma2 = 0.7;
  return th;
}

}  // namespace

TEST(Likelihood, SingleClassHalfProbabilityEdgeTerm) {
  Rng rng(3);
  for (std::size_t n : {2u, 5u, 9u}) {
    const Graph g = oracle::random_graph(n, 0.4, rng);
    ModelParams th;
    th.alpha = Vector::Ones(1);
    th.pi = Matrix::Constant(1, 1, 0.5);
    th.mu = Matrix::Zero(1, 0);
    th.sigma2 = 1.0;
    const auto terms = complete_log_likelihood_terms(g, FeatureMatrix::empty(n),
                                                     Responsibilities(Matrix::Ones(n, 1)), th);
    EXPECT_NEAR(terms.edges, 0.5 * n * (n - 1.0) * std::log(0.5), 1e-12);
    EXPECT_EQ(terms.proportions, 0.0);
    EXPECT_EQ(terms.features, 0.0);
  }
}

TEST(Likelihood, TwoVerticesOneEdgeHandComputed) {
  const Graph g = Graph::from_edges(2, {{0, 1}});
  ModelParams th = two_class_params();
  th.mu = Matrix::Zero(2, 0);
  const auto terms = complete_log_likelihood_terms(g, FeatureMatrix::empty(2),
                                                   Responsibilities::one_hot({0, 1}, 2), th);
  EXPECT_NEAR(terms.edges, std::log(0.15), 1e-15);
  EXPECT_NEAR(terms.proportions, std::log(0.3) + std::log(0.7), 1e-15);
}

TEST(Likelihood, MatchesTermByTermOracle) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 6;
    const std::size_t q = 2 + trial % 2;
    const std::size_t p = trial % 3;
    const Graph g = oracle::random_graph(n, 0.5, rng);
    const FeatureMatrix f = oracle::random_features(n, p, rng);
    const ModelParams th = oracle::random_params(q, p, rng);
    const Matrix soft = oracle::random_tau(n, q, rng);
    const Matrix hard = oracle::one_hot(oracle::random_labels(n, static_cast<int>(q), rng), static_cast<long>(q));
    for (const Matrix& t : {soft, hard}) {
      EXPECT_NEAR(complete_log_likelihood(g, f, Responsibilities(t), th), oracle::complete_ll(g, f, t, th), 1e-10);
      EXPECT_NEAR(lower_bound_j(g, f, Responsibilities(t), th), oracle::lower_bound(g, f, t, th), 1e-10);
      EXPECT_NEAR(complete_log_likelihood(g, f, Responsibilities(t), th, FitMode::graph_only),
                  oracle::complete_ll(g, f, t, th, true, false), 1e-10);
      EXPECT_NEAR(complete_log_likelihood(g, f, Responsibilities(t), th, FitMode::features_only),
                  oracle::complete_ll(g, f, t, th, false, true), 1e-10);
    }
  }
}

TEST(Likelihood, PartitionOverloadEqualsOneHot) {
  Rng rng(5);
  const Graph g = oracle::random_graph(7, 0.3, rng);
  const FeatureMatrix f = oracle::random_features(7, 2, rng);
  const ModelParams th = oracle::random_params(3, 2, rng);
  const auto z = oracle::random_labels(7, 3, rng);
  EXPECT_DOUBLE_EQ(complete_log_likelihood(g, f, Partition{z}, th),
                   complete_log_likelihood(g, f, Responsibilities::one_hot(z, 3), th));
}

TEST(Likelihood, BoundAtOneHotEqualsCompleteLikelihood) {
  Rng rng(8);
  const Graph g = oracle::random_graph(8, 0.4, rng);
  const FeatureMatrix f = oracle::random_features(8, 2, rng);
  const ModelParams th = oracle::random_params(3, 2, rng);
  const auto tau = Responsibilities::one_hot(oracle::random_labels(8, 3, rng), 3);
  EXPECT_EQ(entropy(tau), 0.0);
  EXPECT_DOUBLE_EQ(lower_bound_j(g, f, tau, th), complete_log_likelihood(g, f, tau, th));
}

TEST(Likelihood, SingleClassBoundIsExact) {
  Rng rng(9);
  const Graph g = oracle::random_graph(6, 0.5, rng);
  const FeatureMatrix f = oracle::random_features(6, 2, rng);
  ModelParams th = oracle::random_params(1, 2, rng);
  const Responsibilities ones(Matrix::Ones(6, 1));
  EXPECT_NEAR(lower_bound_j(g, f, ones, th), exact_log_marginal(g, f, th), 1e-10);
}

TEST(ExactMarginal, SingleVertexIsGaussianMixtureDensity) {
  const Graph g(1);
  Matrix y(1, 2);
  y << 0.5, -0.3;
  const FeatureMatrix f(y);
  const ModelParams th = two_class_params();
  double mix = 0.0;
  for (int q = 0; q < 2; ++q) {
    const double d2 = (y.row(0) - th.mu.row(q)).squaredNorm();
    mix += th.alpha(q) * std::exp(-d2 / (2 * th.sigma2)) / (2 * std::numbers::pi * th.sigma2);
  }
  EXPECT_NEAR(exact_log_marginal(g, f, th), std::log(mix), 1e-12);
}

TEST(ExactMarginal, MatchesEnumerationOracle) {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(trial % 5);
    const std::size_t q = 2 + static_cast<std::size_t>(trial % 2);
    const Graph g = oracle::random_graph(n, 0.4, rng);
    const FeatureMatrix f = oracle::random_features(n, 1, rng);
    const ModelParams th = oracle::random_params(q, 1, rng);
    EXPECT_NEAR(exact_log_marginal(g, f, th), oracle::exact_marginal(g, f, th), 1e-9);
  }
}

TEST(ExactMarginal, BoundNeverExceedsIt) {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Graph g = oracle::random_graph(8, 0.35, rng);
    const FeatureMatrix f = oracle::random_features(8, 2, rng);
    const ModelParams th = oracle::random_params(2, 2, rng);
    const double exact = exact_log_marginal(g, f, th);
    for (int k = 0; k < 10; ++k) {
      const Responsibilities tau(oracle::random_tau(8, 2, rng));
      EXPECT_LE(lower_bound_j(g, f, tau, th), exact + 1e-9);
    }
  }
}

TEST(ExactMarginal, RefusesLargeInstances) {
  Rng rng(1);
  const Graph g = oracle::random_graph(25, 0.2, rng);
  const ModelParams th = oracle::random_params(2, 0, rng);
  EXPECT_THROW(exact_log_marginal(g, FeatureMatrix::empty(25), th), InvalidArgument);
}

TEST(Likelihood, InvariantUnderClassRelabeling) {
  Rng rng(31);
  const Graph g = oracle::random_graph(9, 0.4, rng);
  const FeatureMatrix f = oracle::random_features(9, 2, rng);
  const ModelParams th = oracle::random_params(3, 2, rng);
  const Matrix t = oracle::random_tau(9, 3, rng);
  const std::vector<int> perm{2, 0, 1};

  ModelParams ph = th;
  Matrix pt(t.rows(), t.cols());
  for (int a = 0; a < 3; ++a) {
    ph.alpha(perm[a]) = th.alpha(a);
    ph.mu.row(perm[a]) = th.mu.row(a);
    pt.col(perm[a]) = t.col(a);
    for (int b = 0; b < 3; ++b) ph.pi(perm[a], perm[b]) = th.pi(a, b);
  }
  EXPECT_NEAR(lower_bound_j(g, f, Responsibilities(t), th), lower_bound_j(g, f, Responsibilities(pt), ph), 1e-10);
  EXPECT_NEAR(exact_log_marginal(g, f, th), exact_log_marginal(g, f, ph), 1e-10);
}

TEST(Likelihood, InvariantUnderVertexRelabeling) {
  Rng rng(32);
  const std::size_t n = 9;
  const Graph g = oracle::random_graph(n, 0.4, rng);
  const FeatureMatrix f = oracle::random_features(n, 2, rng);
  const ModelParams th = oracle::random_params(2, 2, rng);
  const Matrix t = oracle::random_tau(n, 2, rng);
  const std::vector<std::size_t> perm{4, 7, 0, 2, 8, 1, 3, 6, 5};

  std::vector<Edge> edges;
  for (const auto& [i, j] : g.edges()) edges.emplace_back(perm[i], perm[j]);
  Matrix y(f.values().rows(), f.values().cols());
  Matrix pt(t.rows(), t.cols());
  for (std::size_t i = 0; i < n; ++i) {
    y.row(static_cast<long>(perm[i])) = f.values().row(static_cast<long>(i));
    pt.row(static_cast<long>(perm[i])) = t.row(static_cast<long>(i));
  }
  EXPECT_NEAR(lower_bound_j(g, f, Responsibilities(t), th),
              lower_bound_j(Graph::from_edges(n, edges), FeatureMatrix(y), Responsibilities(pt), th), 1e-10);
}

TEST(Likelihood, DimensionChecks) {
  Rng rng(2);
  const Graph g = oracle::random_graph(5, 0.4, rng);
  const ModelParams th = oracle::random_params(2, 2, rng);
  const Responsibilities tau(oracle::random_tau(5, 2, rng));
  EXPECT_THROW(complete_log_likelihood(g, oracle::random_features(4, 2, rng), tau, th), DimensionError);
  EXPECT_THROW(complete_log_likelihood(g, oracle::random_features(5, 3, rng), tau, th), DimensionError);
  EXPECT_THROW(complete_log_likelihood(g, oracle::random_features(5, 2, rng),
                                       Responsibilities(oracle::random_tau(5, 3, rng)), th),
               DimensionError);
}

TEST(FitModeNames, RoundTrip) {
  for (FitMode m : {FitMode::joint, FitMode::graph_only, FitMode::features_only}) {
    EXPECT_EQ(fit_mode_from_string(to_string(m)), m);
  }
  EXPECT_THROW(fit_mode_from_string("both"), InvalidArgument);
}
