#include "cohsmix/likelihood.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "cohsmix/numeric.hpp"
#include "edge_stats.hpp"

namespace cohsmix {

const char* to_string(FitMode mode) {
  switch (mode) {
    case FitMode::joint: return "joint";
    case FitMode::graph_only: return "graph-only";
    case FitMode::features_only: return "features-only";
  }
  return "joint";
}

FitMode fit_mode_from_string(const std::string& s) {
  if (s == "joint") return FitMode::joint;
  if (s == "graph-only") return FitMode::graph_only;
  if (s == "features-only") return FitMode::features_only;
  throw InvalidArgument("unknown fit mode '" + s + "'");
}

Matrix squared_distances(const FeatureMatrix& f, const Matrix& mu) {
  const Matrix& y = f.values();
  Matrix d(y.rows(), mu.rows());
  for (Eigen::Index q = 0; q < mu.rows(); ++q) {
    d.col(q) = (y.rowwise() - mu.row(q)).rowwise().squaredNorm();
  }
  return d;
}

namespace {

void check_tau(const Graph& g, const Responsibilities& tau, const ModelParams& params) {
  if (tau.n() != g.n()) throw DimensionError("tau row count does not match graph size");
  if (tau.num_classes() != params.num_classes()) {
    throw DimensionError("tau column count does not match Q");
  }
}

// Log-density constant of a p-dimensional spherical Gaussian.
double gaussian_log_norm(std::size_t p, double sigma2) {
  if (p == 0) return 0.0;
  return -0.5 * static_cast<double>(p) * std::log(2.0 * std::numbers::pi * sigma2);
}

}  // namespace

LikelihoodTerms complete_log_likelihood_terms(const Graph& g, const FeatureMatrix& f,
                                              const Responsibilities& tau, const ModelParams& params,
                                              FitMode mode) {
  check_compatible(g, f, params);
  check_tau(g, tau, params);
  const Matrix& t = tau.values();
  const auto nq = t.cols();
  LikelihoodTerms terms;

  const Vector mass = t.colwise().sum().transpose();
  for (Eigen::Index q = 0; q < nq; ++q) terms.proportions += xlogy(mass(q), params.alpha(q));

  if (mode != FitMode::features_only && t.rows() > 1) {
    const detail::EdgeStats es = detail::edge_stats(t, g.adjacency() * t);
    const Matrix& linked = es.linked;
    const Matrix& unlinked = es.unlinked;
    double sum = 0.0;
    for (Eigen::Index q = 0; q < nq; ++q) {
      for (Eigen::Index l = 0; l < nq; ++l) {
        sum += xlogy(linked(q, l), params.pi(q, l)) + xlogy(unlinked(q, l), 1.0 - params.pi(q, l));
      }
    }
    terms.edges = 0.5 * sum;
  }

  if (mode != FitMode::graph_only && f.p() > 0) {
    const Matrix d = squared_distances(f, params.mu);
    const double norm = gaussian_log_norm(f.p(), params.sigma2);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      for (Eigen::Index q = 0; q < nq; ++q) {
        if (t(i, q) == 0.0) continue;
        sum += t(i, q) * (norm - d(i, q) / (2.0 * params.sigma2));
      }
    }
    terms.features = sum;
  }
  return terms;
}

double complete_log_likelihood(const Graph& g, const FeatureMatrix& f, const Responsibilities& tau,
                               const ModelParams& params, FitMode mode) {
  const double value = complete_log_likelihood_terms(g, f, tau, params, mode).total();
  if (std::isnan(value)) throw NumericalError("complete log-likelihood is NaN; invalid parameters");
  return value;
}

double complete_log_likelihood(const Graph& g, const FeatureMatrix& f, const Partition& z,
                               const ModelParams& params, FitMode mode) {
  if (z.size() != g.n()) throw DimensionError("partition size does not match graph size");
  return complete_log_likelihood(g, f, Responsibilities::one_hot(z.labels, params.num_classes()),
                                 params, mode);
}

double entropy(const Responsibilities& tau) {
  double h = 0.0;
  const Matrix& t = tau.values();
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    for (Eigen::Index q = 0; q < t.cols(); ++q) h -= xlogy(t(i, q), t(i, q));
  }
  return h;
}

double lower_bound_j(const Graph& g, const FeatureMatrix& f, const Responsibilities& tau,
                     const ModelParams& params, FitMode mode) {
  return complete_log_likelihood(g, f, tau, params, mode) + entropy(tau);
}

double exact_log_marginal(const Graph& g, const FeatureMatrix& f, const ModelParams& params) {
  check_compatible(g, f, params);
  const std::size_t n = g.n();
  const std::size_t nq = params.num_classes();
  if (std::pow(static_cast<double>(nq), static_cast<double>(n)) > kMaxEnumeration) {
    throw InvalidArgument("instance too large for enumeration: Q^n = " + std::to_string(nq) + "^" +
                          std::to_string(n));
  }

  const auto ei = [](std::size_t i) { return static_cast<Eigen::Index>(i); };
  const Matrix d = squared_distances(f, params.mu);
  const double norm = gaussian_log_norm(f.p(), params.sigma2);
  // Per-vertex log alpha_q + log N(Y_i; mu_q, sigma2 I).
  Matrix vertex_term(ei(n), ei(nq));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t q = 0; q < nq; ++q) {
      vertex_term(ei(i), ei(q)) = std::log(params.alpha(ei(q))) +
                                  (f.p() > 0 ? norm - d(ei(i), ei(q)) / (2.0 * params.sigma2) : 0.0);
    }
  }
  const Matrix log_pi = params.pi.array().log();
  const Matrix log_not_pi = (1.0 - params.pi.array()).log();
  const Matrix& x = g.adjacency();

  std::vector<int> z(n, 0);
  std::vector<double> log_joint;
  log_joint.reserve(static_cast<std::size_t>(std::pow(static_cast<double>(nq), static_cast<double>(n))));
  for (;;) {
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      v += vertex_term(ei(i), z[i]);
      for (std::size_t j = i + 1; j < n; ++j) {
        v += x(ei(i), ei(j)) != 0.0 ? log_pi(z[i], z[j]) : log_not_pi(z[i], z[j]);
      }
    }
    log_joint.push_back(v);

    std::size_t k = 0;
    while (k < n && ++z[k] == static_cast<int>(nq)) {
      z[k] = 0;
      ++k;
    }
    if (k == n) break;
  }
  return log_sum_exp(log_joint);
}

}  // namespace cohsmix
