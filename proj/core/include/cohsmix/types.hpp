#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace cohsmix {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Clamp bounds applied to every parameter estimate.
inline constexpr double kPiMin = 1e-6;
inline constexpr double kPiMax = 1.0 - 1e-6;
inline constexpr double kSigma2Floor = 1e-8;

using Edge = std::pair<std::size_t, std::size_t>;

/// Undirected simple graph. Holds both a dense 0/1 adjacency matrix and the
/// sorted list of unordered edges (i < j); the two views always agree.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n);

  /// Builds from an edge list. Pairs are symmetrized and deduplicated;
  /// self-loops and out-of-range endpoints raise InvalidArgument.
  static Graph from_edges(std::size_t n, const std::vector<Edge>& edges);

  /// Builds from a square 0/1 matrix that must be symmetric with zero diagonal.
  static Graph from_adjacency(const Matrix& adjacency);

  std::size_t n() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  const Matrix& adjacency() const { return adjacency_; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool has_edge(std::size_t i, std::size_t j) const { return adjacency_(i, j) != 0.0; }
  std::size_t degree(std::size_t i) const;
  double density() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t n_ = 0;
  Matrix adjacency_;
  std::vector<Edge> edges_;
};

/// n x p real matrix of vertex features; row i is the feature vector of vertex i.
/// p may be zero (graph-only data).
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  explicit FeatureMatrix(Matrix values);

  static FeatureMatrix empty(std::size_t n) { return FeatureMatrix(Matrix(static_cast<Eigen::Index>(n), 0)); }

  std::size_t n() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t p() const { return static_cast<std::size_t>(values_.cols()); }
  const Matrix& values() const { return values_; }

  friend bool operator==(const FeatureMatrix& a, const FeatureMatrix& b) {
    return a.values_.rows() == b.values_.rows() && a.values_.cols() == b.values_.cols() &&
           a.values_ == b.values_;
  }

 private:
  Matrix values_;
};

/// Model parameters: class proportions, connectivity, class means and the
/// shared per-coordinate feature variance.
struct ModelParams {
  Vector alpha;   // Q
  Matrix pi;      // Q x Q, symmetric
  Matrix mu;      // Q x p
  double sigma2 = 1.0;

  std::size_t num_classes() const { return static_cast<std::size_t>(alpha.size()); }
  std::size_t num_features() const { return static_cast<std::size_t>(mu.cols()); }

  /// Throws InvalidArgument when a structural invariant is broken.
  void validate() const;

  /// Copy with pi clamped to [kPiMin, kPiMax] and sigma2 floored.
  ModelParams clamped() const;
};

/// n x Q row-stochastic matrix of variational class-membership probabilities.
class Responsibilities {
 public:
  Responsibilities() = default;
  explicit Responsibilities(Matrix values);

  /// One-hot responsibilities from a hard partition with labels in [0, q).
  static Responsibilities one_hot(const std::vector<int>& labels, std::size_t q);

  std::size_t n() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t num_classes() const { return static_cast<std::size_t>(values_.cols()); }
  const Matrix& values() const { return values_; }
  double operator()(std::size_t i, std::size_t q) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(q));
  }

 private:
  Matrix values_;
};

/// Hard assignment of vertices to classes. Labels are 0-based class indices.
struct Partition {
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  int num_labels() const;

  /// Row-wise argmax; ties go to the lowest class index.
  static Partition from_responsibilities(const Responsibilities& tau);

  friend bool operator==(const Partition&, const Partition&) = default;
};

void check_compatible(const Graph& g, const FeatureMatrix& f);
void check_compatible(const Graph& g, const FeatureMatrix& f, const ModelParams& params);

}  // namespace cohsmix
