#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "cohsmix/inference.hpp"

namespace cohsmix {

namespace {

constexpr double kSmoothing = 0.1;
constexpr int kKmeansIters = 20;

Responsibilities smoothed_one_hot(const std::vector<int>& labels, std::size_t q) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  const auto nq = static_cast<Eigen::Index>(q);
  Matrix t = Matrix::Constant(n, nq, kSmoothing / static_cast<double>(q));
  for (Eigen::Index i = 0; i < n; ++i) t(i, labels[static_cast<std::size_t>(i)]) += 1.0 - kSmoothing;
  return Responsibilities(std::move(t));
}

Responsibilities random_dirichlet(std::size_t n, std::size_t q, Rng& rng) {
  Matrix t(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(q));
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    for (Eigen::Index k = 0; k < t.cols(); ++k) t(i, k) = standard_exponential(rng);
    const double s = t.row(i).sum();
    if (s > 0.0) {
      t.row(i) /= s;
    } else {
      t.row(i).setConstant(1.0 / static_cast<double>(q));
    }
  }
  return Responsibilities(std::move(t));
}

// Lloyd's algorithm from k-means++ seeds. Returns 0-based cluster labels.
std::vector<int> kmeans_labels(const Matrix& y, std::size_t k, Rng& rng) {
  const auto n = static_cast<std::size_t>(y.rows());
  const auto kk = static_cast<Eigen::Index>(k);
  Matrix centers(kk, y.cols());

  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  centers.row(0) = y.row(static_cast<Eigen::Index>(uniform_index(rng, n)));
  for (Eigen::Index c = 1; c < kk; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      nearest[i] = std::min(nearest[i], (y.row(ii) - centers.row(c - 1)).squaredNorm());
      total += nearest[i];
    }
    std::size_t pick = uniform_index(rng, n);
    if (total > 0.0) {
      double target = uniform01(rng) * total;
      for (std::size_t i = 0; i < n; ++i) {
        target -= nearest[i];
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
    }
    centers.row(c) = y.row(static_cast<Eigen::Index>(pick));
  }

  std::vector<int> labels(n, 0);
  for (int iter = 0; iter < kKmeansIters; ++iter) {
    bool changed = false;
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (Eigen::Index c = 0; c < kk; ++c) {
        const double d = (y.row(ii) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      changed = changed || labels[i] != best;
      labels[i] = best;
      dist[i] = best_d;
    }

    Matrix sums = Matrix::Zero(kk, y.cols());
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums.row(labels[i]) += y.row(static_cast<Eigen::Index>(i));
      ++counts[static_cast<std::size_t>(labels[i])];
    }
    for (Eigen::Index c = 0; c < kk; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        continue;
      }
      // Empty cluster: take over the point farthest from its center.
      const auto far = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
      centers.row(c) = y.row(static_cast<Eigen::Index>(far));
      labels[far] = static_cast<int>(c);
      dist[far] = 0.0;
      changed = true;
    }
    if (!changed && iter > 0) break;
  }
  return labels;
}

std::vector<int> degree_quantile_labels(const Graph& g, std::size_t q) {
  const std::size_t n = g.n();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> deg(n);
  for (std::size_t i = 0; i < n; ++i) deg[i] = g.degree(i);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return deg[a] < deg[b]; });
  std::vector<int> labels(n, 0);
  for (std::size_t rank = 0; rank < n; ++rank) {
    labels[order[rank]] = static_cast<int>(rank * q / n);
  }
  return labels;
}

}  // namespace

Responsibilities init_responsibilities(const Graph& g, const FeatureMatrix& f, std::size_t q,
                                       InitStrategy strategy, Rng& rng) {
  check_compatible(g, f);
  if (q < 1) throw InvalidArgument("Q must be >= 1");
  const std::size_t n = g.n();
  if (q == 1) return Responsibilities(Matrix::Ones(static_cast<Eigen::Index>(n), 1));

  switch (strategy) {
    case InitStrategy::random_dirichlet:
      return random_dirichlet(n, q, rng);
    case InitStrategy::feature_kmeans:
      if (f.p() == 0 || n == 0) return random_dirichlet(n, q, rng);
      return smoothed_one_hot(kmeans_labels(f.values(), q, rng), q);
    case InitStrategy::graph_degree_quantile:
      return smoothed_one_hot(degree_quantile_labels(g, q), q);
  }
  return random_dirichlet(n, q, rng);
}

}  // namespace cohsmix
