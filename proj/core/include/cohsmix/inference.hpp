#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cohsmix/likelihood.hpp"
#include "cohsmix/random.hpp"
#include "cohsmix/types.hpp"

namespace cohsmix {

enum class InitStrategy { random_dirichlet, feature_kmeans, graph_degree_quantile };

const char* to_string(InitStrategy s);
InitStrategy init_strategy_from_string(const std::string& s);

struct EMConfig {
  int max_em_iters = 100;
  int max_fixedpoint_sweeps = 50;
  double tau_tol = 1e-4;     // sup-norm fixed-point residual
  double j_rel_tol = 1e-6;   // relative change of J between EM iterations
  double damping = 0.5;      // new tau = (1 - damping) * update + damping * old
  int n_restarts = 10;
  std::uint64_t rng_seed = 0;
  InitStrategy init_strategy = InitStrategy::feature_kmeans;
  FitMode mode = FitMode::joint;
  // Throw MonotonicityError if J decreases by more than 1e-8 between M-steps.
  bool check_monotone = false;
  // Workers for independent restarts.
  unsigned threads = 1;

  void validate() const;
};

struct FitResult {
  ModelParams params;
  Responsibilities tau;
  Partition partition;
  std::vector<double> j_trace;  // J after every M-step, starting with the one on the initial tau
  bool converged = false;
  int iterations = 0;
  FitMode mode = FitMode::joint;
  InitStrategy init = InitStrategy::feature_kmeans;
  int restart_index = 0;
  // Trace positions preceded by an empty-class re-seed; J may drop there.
  std::vector<std::size_t> reseeds;
  double icl = std::numeric_limits<double>::quiet_NaN();

  std::size_t num_classes() const { return params.num_classes(); }
  double final_j() const { return j_trace.empty() ? -std::numeric_limits<double>::infinity() : j_trace.back(); }
};

/// Raised by m_step when a class carries (almost) no responsibility mass.
class EmptyClassError : public Error {
 public:
  EmptyClassError(std::vector<int> classes, const std::string& what)
      : Error(what), classes_(std::move(classes)) {}
  const std::vector<int>& classes() const { return classes_; }

 private:
  std::vector<int> classes_;
};

inline constexpr double kEmptyClassMass = 1e-10;

/// Raised when EMConfig::check_monotone is set and J drops between M-steps.
/// Never swallowed by the restart or Q-scan drivers.
class MonotonicityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// One Jacobi application of the mean-field fixed-point map: every row is
/// recomputed from `tau` and normalized in the log domain.
Responsibilities fixed_point_update(const Graph& g, const FeatureMatrix& f, const ModelParams& params,
                                    const Responsibilities& tau, FitMode mode = FitMode::joint);

/// Sup-norm distance between tau and its fixed-point update.
double fixed_point_residual(const Graph& g, const FeatureMatrix& f, const ModelParams& params,
                            const Responsibilities& tau, FitMode mode = FitMode::joint);

/// Variational E-step. Damped Jacobi sweeps until the fixed-point residual is
/// at most cfg.tau_tol or cfg.max_fixedpoint_sweeps is reached. A sweep that
/// would lower J is replaced by a damped sequential (row-by-row) sweep, which
/// cannot lower it.
Responsibilities e_step(const Graph& g, const FeatureMatrix& f, const ModelParams& params,
                        const Responsibilities& tau_init, const EMConfig& cfg);

/// Closed-form maximizer of J over the parameters at fixed tau, clamped.
/// Throws EmptyClassError when some class mass is below kEmptyClassMass.
ModelParams m_step(const Graph& g, const FeatureMatrix& f, const Responsibilities& tau,
                   FitMode mode = FitMode::joint);

/// Strategy actually used once the data and mode are taken into account:
/// feature-kmeans needs features that the fit looks at, so it falls back to
/// random-dirichlet when p = 0 or in graph-only mode.
InitStrategy effective_strategy(InitStrategy s, FitMode mode, std::size_t p);

Responsibilities init_responsibilities(const Graph& g, const FeatureMatrix& f, std::size_t q,
                                       InitStrategy strategy, Rng& rng);

/// Moves responsibility onto each listed class: the vertex whose largest
/// responsibility is smallest gets 0.9 on it, the rest of its row is rescaled.
Responsibilities reseed_classes(const Responsibilities& tau, const std::vector<int>& classes);

FitResult fit(const Graph& g, const FeatureMatrix& f, std::size_t q, const EMConfig& cfg);

/// Seed and strategy used by restart `r` of fit_multi_restart; restart 0 is
/// exactly cfg.
EMConfig restart_config(const EMConfig& cfg, int r);

/// Best-J result over cfg.n_restarts independent fits (ties to the lowest
/// restart index). Throws Error if every restart fails.
FitResult fit_multi_restart(const Graph& g, const FeatureMatrix& f, std::size_t q, const EMConfig& cfg);

FitResult fit_ablation(const Graph& g, const FeatureMatrix& f, std::size_t q, const EMConfig& cfg,
                       FitMode mode);

}  // namespace cohsmix
