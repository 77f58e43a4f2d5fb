#pragma once

#include "cohsmix/types.hpp"

namespace cohsmix {

/// Which parts of the model take part in a likelihood or a fit.
/// graph_only drops the feature term (plain stochastic block model),
/// features_only drops the edge term (spherical Gaussian mixture).
enum class FitMode { joint, graph_only, features_only };

const char* to_string(FitMode mode);
FitMode fit_mode_from_string(const std::string& s);

/// Additive decomposition of log P(X, Y, Z).
struct LikelihoodTerms {
  double proportions = 0.0;  // sum_i sum_q z_iq log alpha_q
  double edges = 0.0;        // each unordered pair {i, j} counted once
  double features = 0.0;     // full Gaussian log-density, variance sigma2 per coordinate

  double total() const { return proportions + edges + features; }
};

/// Complete-data log-likelihood with Z replaced by tau (soft) and tau_iq
/// tau_jl standing in for Z_iq Z_jl on distinct vertices. One-hot tau gives
/// the hard complete log-likelihood.
LikelihoodTerms complete_log_likelihood_terms(const Graph& g, const FeatureMatrix& f,
                                              const Responsibilities& tau, const ModelParams& params,
                                              FitMode mode = FitMode::joint);

double complete_log_likelihood(const Graph& g, const FeatureMatrix& f, const Responsibilities& tau,
                               const ModelParams& params, FitMode mode = FitMode::joint);

double complete_log_likelihood(const Graph& g, const FeatureMatrix& f, const Partition& z,
                               const ModelParams& params, FitMode mode = FitMode::joint);

/// -sum_i sum_q tau_iq log tau_iq.
double entropy(const Responsibilities& tau);

/// Variational lower bound: E_R[log P(X, Y, Z)] + H(R) for the fully
/// factorized R given by tau.
double lower_bound_j(const Graph& g, const FeatureMatrix& f, const Responsibilities& tau,
                     const ModelParams& params, FitMode mode = FitMode::joint);

/// Largest Q^n accepted by exact_log_marginal.
inline constexpr double kMaxEnumeration = 1e6;

/// log sum_Z P(X, Y, Z) by enumerating all Q^n labelings.
/// Throws InvalidArgument when Q^n exceeds kMaxEnumeration.
double exact_log_marginal(const Graph& g, const FeatureMatrix& f, const ModelParams& params);

/// n x Q matrix of squared distances ||Y_i - mu_q||^2.
Matrix squared_distances(const FeatureMatrix& f, const Matrix& mu);

}  // namespace cohsmix
