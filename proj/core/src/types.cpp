#include "cohsmix/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cohsmix {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

}  // namespace

Graph::Graph(std::size_t n) : n_(n), adjacency_(Matrix::Zero(idx(n), idx(n))) {}

Graph Graph::from_edges(std::size_t n, const std::vector<Edge>& edges) {
  Graph g(n);
  for (auto [a, b] : edges) {
    if (a >= n || b >= n) {
      throw InvalidArgument("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                            ") out of range for n = " + std::to_string(n));
    }
    if (a == b) {
      throw InvalidArgument("self-loop on vertex " + std::to_string(a));
    }
    g.adjacency_(idx(a), idx(b)) = 1.0;
    g.adjacency_(idx(b), idx(a)) = 1.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (g.adjacency_(idx(i), idx(j)) != 0.0) g.edges_.emplace_back(i, j);
    }
  }
  return g;
}

Graph Graph::from_adjacency(const Matrix& adjacency) {
  if (adjacency.rows() != adjacency.cols()) {
    throw DimensionError("adjacency matrix must be square");
  }
  const auto n = static_cast<std::size_t>(adjacency.rows());
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    if (adjacency(idx(i), idx(i)) != 0.0) {
      throw InvalidArgument("nonzero diagonal at vertex " + std::to_string(i));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double x = adjacency(idx(i), idx(j));
      if (x != 0.0 && x != 1.0) {
        throw InvalidArgument("adjacency entries must be 0 or 1");
      }
      if (x != adjacency(idx(j), idx(i))) {
        throw InvalidArgument("adjacency matrix is not symmetric");
      }
      if (j > i && x == 1.0) edges.emplace_back(i, j);
    }
  }
  return from_edges(n, edges);
}

std::size_t Graph::degree(std::size_t i) const {
  return static_cast<std::size_t>(adjacency_.row(idx(i)).sum());
}

double Graph::density() const {
  if (n_ < 2) return 0.0;
  const double pairs = 0.5 * static_cast<double>(n_) * static_cast<double>(n_ - 1);
  return static_cast<double>(edges_.size()) / pairs;
}

FeatureMatrix::FeatureMatrix(Matrix values) : values_(std::move(values)) {
  if (!values_.allFinite()) {
    throw InvalidArgument("feature matrix contains non-finite entries");
  }
}

void ModelParams::validate() const {
  const auto q = alpha.size();
  if (q < 1) throw InvalidArgument("model needs at least one class");
  if (pi.rows() != q || pi.cols() != q) throw DimensionError("pi must be Q x Q");
  if (mu.rows() != q) throw DimensionError("mu must have Q rows");
  if ((alpha.array() < 0.0).any()) throw InvalidArgument("alpha has negative entries");
  if (std::abs(alpha.sum() - 1.0) > 1e-9) throw InvalidArgument("alpha does not sum to 1");
  if ((pi.array() < 0.0).any() || (pi.array() > 1.0).any()) {
    throw InvalidArgument("pi entries must lie in [0, 1]");
  }
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw InvalidArgument("sigma2 must be positive");
  if (!mu.allFinite()) throw InvalidArgument("mu contains non-finite entries");
}

ModelParams ModelParams::clamped() const {
  ModelParams out = *this;
  out.pi = pi.cwiseMax(kPiMin).cwiseMin(kPiMax);
  out.sigma2 = std::max(sigma2, kSigma2Floor);
  return out;
}

Responsibilities::Responsibilities(Matrix values) : values_(std::move(values)) {
  if (values_.cols() < 1) throw InvalidArgument("responsibilities need at least one class");
  if (!values_.allFinite() || (values_.array() < 0.0).any()) {
    throw InvalidArgument("responsibilities must be finite and non-negative");
  }
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    if (std::abs(values_.row(i).sum() - 1.0) > 1e-8) {
      throw InvalidArgument("responsibility row " + std::to_string(i) + " does not sum to 1");
    }
  }
}

Responsibilities Responsibilities::one_hot(const std::vector<int>& labels, std::size_t q) {
  Matrix t = Matrix::Zero(idx(labels.size()), idx(q));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= q) {
      throw InvalidArgument("label out of range at vertex " + std::to_string(i));
    }
    t(idx(i), labels[i]) = 1.0;
  }
  return Responsibilities(std::move(t));
}

int Partition::num_labels() const {
  if (labels.empty()) return 0;
  return *std::max_element(labels.begin(), labels.end()) + 1;
}

Partition Partition::from_responsibilities(const Responsibilities& tau) {
  Partition out;
  out.labels.resize(tau.n());
  const Matrix& t = tau.values();
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index q = 1; q < t.cols(); ++q) {
      if (t(i, q) > t(i, best)) best = q;
    }
    out.labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

void check_compatible(const Graph& g, const FeatureMatrix& f) {
  if (g.n() != f.n()) {
    throw DimensionError("graph has " + std::to_string(g.n()) + " vertices but features have " +
                         std::to_string(f.n()) + " rows");
  }
}

void check_compatible(const Graph& g, const FeatureMatrix& f, const ModelParams& params) {
  check_compatible(g, f);
  params.validate();
  if (params.num_features() != f.p()) {
    throw DimensionError("mu has " + std::to_string(params.num_features()) +
                         " columns but features have p = " + std::to_string(f.p()));
  }
}

}  // namespace cohsmix
