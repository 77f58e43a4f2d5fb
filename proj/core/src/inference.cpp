#include "cohsmix/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "cohsmix/numeric.hpp"
#include "cohsmix/parallel.hpp"
#include "edge_stats.hpp"

namespace cohsmix {

const char* to_string(InitStrategy s) {
  switch (s) {
    case InitStrategy::random_dirichlet: return "random-dirichlet";
    case InitStrategy::feature_kmeans: return "feature-kmeans";
    case InitStrategy::graph_degree_quantile: return "graph-degree-quantile";
  }
  return "feature-kmeans";
}

InitStrategy init_strategy_from_string(const std::string& s) {
  if (s == "random-dirichlet") return InitStrategy::random_dirichlet;
  if (s == "feature-kmeans") return InitStrategy::feature_kmeans;
  if (s == "graph-degree-quantile") return InitStrategy::graph_degree_quantile;
  throw InvalidArgument("unknown init strategy '" + s + "'");
}

void EMConfig::validate() const {
  if (max_em_iters < 1 || max_fixedpoint_sweeps < 1 || n_restarts < 1) {
    throw InvalidArgument("iteration caps and restart count must be >= 1");
  }
  if (!(tau_tol > 0.0) || !(j_rel_tol > 0.0)) throw InvalidArgument("tolerances must be positive");
  if (!(damping >= 0.0 && damping < 1.0)) throw InvalidArgument("damping must lie in [0, 1)");
}

namespace {

void check_tau_shape(const Graph& g, const Responsibilities& tau, std::size_t q) {
  if (tau.n() != g.n() || tau.num_classes() != q) {
    throw DimensionError("tau must be n x Q");
  }
}

// Normalizes each row of a matrix of unnormalized log-probabilities.
Matrix normalize_log_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  std::vector<double> row(static_cast<std::size_t>(logits.cols()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    for (Eigen::Index q = 0; q < logits.cols(); ++q) row[static_cast<std::size_t>(q)] = logits(i, q);
    const double lse = log_sum_exp(row);
    if (!std::isfinite(lse)) throw NumericalError("non-finite log-normalizer in fixed-point update");
    for (Eigen::Index q = 0; q < logits.cols(); ++q) out(i, q) = std::exp(logits(i, q) - lse);
    out.row(i) /= out.row(i).sum();
  }
  return out;
}

struct LogParams {
  Vector log_alpha;
  Matrix log_pi;
  Matrix log_not_pi;
};

LogParams log_params(const ModelParams& params) {
  return {params.alpha.array().log().matrix(), params.pi.array().log().matrix(),
          (1.0 - params.pi.array()).log().matrix()};
}

// Per-vertex terms that do not depend on the other rows of tau:
// log alpha_q plus the Gaussian log-density of Y_i under class q.
Matrix vertex_logits(const FeatureMatrix& f, const ModelParams& params, const LogParams& lp,
                     std::size_t n, FitMode mode) {
  Matrix out = lp.log_alpha.transpose().replicate(static_cast<Eigen::Index>(n), 1);
  if (mode != FitMode::graph_only && f.p() > 0) {
    const double norm =
        -0.5 * static_cast<double>(f.p()) * std::log(2.0 * std::numbers::pi * params.sigma2);
    out.array() += norm;
    out -= squared_distances(f, params.mu) / (2.0 * params.sigma2);
  }
  return out;
}

// Everything the fixed-point map and J need at fixed parameters.
struct SweepContext {
  const Graph& g;
  FitMode mode;
  LogParams lp;
  Matrix vertex;

  SweepContext(const Graph& graph, const FeatureMatrix& f, const ModelParams& params, FitMode m)
      : g(graph), mode(m), lp(log_params(params)), vertex(vertex_logits(f, params, lp, graph.n(), m)) {}

  bool uses_edges() const { return mode != FitMode::features_only; }

  // xt = adjacency * t
  Matrix logits(const Matrix& t, const Matrix& xt) const {
    Matrix out = vertex;
    if (uses_edges()) {
      // sum_{j != i} tau_jl [x_ij log pi_ql + (1 - x_ij) log(1 - pi_ql)]
      //   = A_il (log pi_ql - log(1 - pi_ql)) + (s_l - tau_il) log(1 - pi_ql),  A = X tau, s = colsum(tau)
      const Matrix others = t.colwise().sum().replicate(t.rows(), 1) - t;
      out += xt * (lp.log_pi - lp.log_not_pi).transpose() + others * lp.log_not_pi.transpose();
    }
    return out;
  }

  // Lower bound J at (t, params).
  double bound(const Matrix& t, const Matrix& xt) const {
    double j = 0.0;
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      for (Eigen::Index q = 0; q < t.cols(); ++q) {
        if (t(i, q) == 0.0) continue;
        j += t(i, q) * (vertex(i, q) - std::log(t(i, q)));
      }
    }
    if (uses_edges() && t.rows() > 1) {
      const detail::EdgeStats es = detail::edge_stats(t, xt);
      double e = 0.0;
      for (Eigen::Index q = 0; q < t.cols(); ++q) {
        for (Eigen::Index l = 0; l < t.cols(); ++l) {
          e += xlogy(es.linked(q, l), std::exp(lp.log_pi(q, l))) +
               xlogy(es.unlinked(q, l), std::exp(lp.log_not_pi(q, l)));
        }
      }
      j += 0.5 * e;
    }
    return j;
  }
};

Matrix sequential_sweep(const SweepContext& ctx, const Matrix& start, double damping) {
  const Matrix& x = ctx.g.adjacency();
  const Matrix log_ratio = (ctx.lp.log_pi - ctx.lp.log_not_pi).transpose();
  const Matrix log_not_t = ctx.lp.log_not_pi.transpose();

  Matrix t = start;
  Eigen::RowVectorXd s = t.colwise().sum();
  std::vector<double> row(static_cast<std::size_t>(t.cols()));
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    Eigen::RowVectorXd logit = ctx.vertex.row(i);
    if (ctx.uses_edges()) {
      const Eigen::RowVectorXd a = x.row(i) * t;
      logit += a * log_ratio + (s - t.row(i)) * log_not_t;
    }
    for (Eigen::Index q = 0; q < t.cols(); ++q) row[static_cast<std::size_t>(q)] = logit(q);
    const double lse = log_sum_exp(row);
    if (!std::isfinite(lse)) throw NumericalError("non-finite log-normalizer in fixed-point update");
    Eigen::RowVectorXd updated = (logit.array() - lse).exp().matrix();
    updated = (1.0 - damping) * updated + damping * t.row(i);
    updated /= updated.sum();
    s += updated - t.row(i);
    t.row(i) = updated;
  }
  return t;
}

}  // namespace

Responsibilities fixed_point_update(const Graph& g, const FeatureMatrix& f, const ModelParams& params,
                                    const Responsibilities& tau, FitMode mode) {
  check_compatible(g, f, params);
  check_tau_shape(g, tau, params.num_classes());
  const SweepContext ctx(g, f, params, mode);
  const Matrix& t = tau.values();
  return Responsibilities(normalize_log_rows(ctx.logits(t, g.adjacency() * t)));
}

double fixed_point_residual(const Graph& g, const FeatureMatrix& f, const ModelParams& params,
                            const Responsibilities& tau, FitMode mode) {
  const Responsibilities u = fixed_point_update(g, f, params, tau, mode);
  if (tau.n() == 0) return 0.0;
  return (u.values() - tau.values()).cwiseAbs().maxCoeff();
}

Responsibilities e_step(const Graph& g, const FeatureMatrix& f, const ModelParams& params,
                        const Responsibilities& tau_init, const EMConfig& cfg) {
  check_compatible(g, f, params);
  check_tau_shape(g, tau_init, params.num_classes());
  if (g.n() == 0) return tau_init;

  const SweepContext ctx(g, f, params, cfg.mode);
  const Matrix& x = g.adjacency();
  Matrix t = tau_init.values();
  Matrix xt = x * t;
  double j_current = ctx.bound(t, xt);
  for (int sweep = 0; sweep < cfg.max_fixedpoint_sweeps; ++sweep) {
    const Matrix update = normalize_log_rows(ctx.logits(t, xt));
    if ((update - t).cwiseAbs().maxCoeff() <= cfg.tau_tol) break;

    Matrix candidate = (1.0 - cfg.damping) * update + cfg.damping * t;
    for (Eigen::Index i = 0; i < candidate.rows(); ++i) candidate.row(i) /= candidate.row(i).sum();
    Matrix candidate_xt = x * candidate;
    double j_candidate = ctx.bound(candidate, candidate_xt);
    if (j_candidate < j_current) {
      candidate = sequential_sweep(ctx, t, cfg.damping);
      candidate_xt = x * candidate;
      j_candidate = ctx.bound(candidate, candidate_xt);
    }
    t = std::move(candidate);
    xt = std::move(candidate_xt);
    j_current = j_candidate;
  }
  return Responsibilities(std::move(t));
}

ModelParams m_step(const Graph& g, const FeatureMatrix& f, const Responsibilities& tau, FitMode mode) {
  check_compatible(g, f);
  if (tau.n() != g.n()) throw DimensionError("tau row count does not match graph size");
  const Matrix& t = tau.values();
  const auto n = t.rows();
  const auto nq = t.cols();
  if (n == 0) throw InvalidArgument("m_step needs at least one vertex");

  const Vector mass = t.colwise().sum().transpose();
  std::vector<int> empty;
  for (Eigen::Index q = 0; q < nq; ++q) {
    if (mass(q) < kEmptyClassMass) empty.push_back(static_cast<int>(q));
  }
  if (!empty.empty()) {
    throw EmptyClassError(empty, "class " + std::to_string(empty.front()) + " has no responsibility mass");
  }

  ModelParams out;
  out.alpha = mass / mass.sum();

  if (mode == FitMode::features_only || n < 2) {
    out.pi = Matrix::Constant(nq, nq, 0.5);
  } else {
    const detail::EdgeStats es = detail::edge_stats(t, g.adjacency() * t);
    const Matrix& linked = es.linked;
    const Matrix& unlinked = es.unlinked;
    const double fallback = g.density();
    out.pi.resize(nq, nq);
    for (Eigen::Index q = 0; q < nq; ++q) {
      for (Eigen::Index l = 0; l < nq; ++l) {
        const double pairs = linked(q, l) + unlinked(q, l);
        out.pi(q, l) = pairs > 0.0 ? linked(q, l) / pairs : fallback;
      }
    }
    out.pi = (0.5 * (out.pi + out.pi.transpose())).eval();
  }

  const auto p = static_cast<Eigen::Index>(f.p());
  if (mode == FitMode::graph_only || p == 0) {
    out.mu = Matrix::Zero(nq, p);
    out.sigma2 = 1.0;
  } else {
    out.mu = (t.transpose() * f.values()).array().colwise() / mass.array();
    const Matrix d = squared_distances(f, out.mu);
    out.sigma2 = t.cwiseProduct(d).sum() / (static_cast<double>(p) * mass.sum());
  }
  return out.clamped();
}

InitStrategy effective_strategy(InitStrategy s, FitMode mode, std::size_t p) {
  if (s == InitStrategy::feature_kmeans && (p == 0 || mode == FitMode::graph_only)) {
    return InitStrategy::random_dirichlet;
  }
  return s;
}

Responsibilities reseed_classes(const Responsibilities& tau, const std::vector<int>& classes) {
  Matrix t = tau.values();
  std::vector<bool> used(static_cast<std::size_t>(t.rows()), false);
  for (int c : classes) {
    Eigen::Index pick = -1;
    double lowest = 2.0;
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      const double m = t.row(i).maxCoeff();
      if (!used[static_cast<std::size_t>(i)] && m < lowest) {
        lowest = m;
        pick = i;
      }
    }
    if (pick < 0) break;
    used[static_cast<std::size_t>(pick)] = true;
    const double rest = t.row(pick).sum() - t(pick, c);
    for (Eigen::Index q = 0; q < t.cols(); ++q) {
      if (q == c) continue;
      t(pick, q) = rest > 0.0 ? 0.1 * t(pick, q) / rest : 0.1 / static_cast<double>(t.cols() - 1);
    }
    t(pick, c) = 0.9;
    t.row(pick) /= t.row(pick).sum();
  }
  return Responsibilities(std::move(t));
}

namespace {

constexpr int kMaxReseeds = 3;

ModelParams m_step_with_rescue(const Graph& g, const FeatureMatrix& f, Responsibilities& tau,
                               FitMode mode, bool& reseeded) {
  reseeded = false;
  for (int attempt = 0;; ++attempt) {
    try {
      return m_step(g, f, tau, mode);
    } catch (const EmptyClassError& e) {
      if (attempt == kMaxReseeds) throw;
      tau = reseed_classes(tau, e.classes());
      reseeded = true;
    }
  }
}

}  // namespace

FitResult fit(const Graph& g, const FeatureMatrix& f, std::size_t q, const EMConfig& cfg) {
  cfg.validate();
  check_compatible(g, f);
  if (q < 1) throw InvalidArgument("Q must be >= 1");
  if (g.n() == 0) throw InvalidArgument("cannot fit an empty graph");

  FitResult res;
  res.mode = cfg.mode;
  res.init = effective_strategy(cfg.init_strategy, cfg.mode, f.p());

  Rng rng(cfg.rng_seed);
  Responsibilities tau = init_responsibilities(g, f, q, res.init, rng);
  bool reseeded = false;
  ModelParams params = m_step_with_rescue(g, f, tau, cfg.mode, reseeded);
  res.j_trace.push_back(lower_bound_j(g, f, tau, params, cfg.mode));

  for (int it = 1; it <= cfg.max_em_iters; ++it) {
    tau = e_step(g, f, params, tau, cfg);
    params = m_step_with_rescue(g, f, tau, cfg.mode, reseeded);
    const double j = lower_bound_j(g, f, tau, params, cfg.mode);
    const double previous = res.j_trace.back();
    if (reseeded) res.reseeds.push_back(res.j_trace.size());
    if (cfg.check_monotone && !reseeded && j < previous - 1e-8) {
      throw MonotonicityError("lower bound decreased from " + std::to_string(previous) + " to " +
                           std::to_string(j) + " at EM iteration " + std::to_string(it));
    }
    res.j_trace.push_back(j);
    res.iterations = it;
    if (!reseeded && std::abs(j - previous) <= cfg.j_rel_tol * std::abs(previous)) {
      res.converged = true;
      break;
    }
  }

  res.partition = Partition::from_responsibilities(tau);
  res.params = std::move(params);
  res.tau = std::move(tau);
  return res;
}

EMConfig restart_config(const EMConfig& cfg, int r) {
  EMConfig out = cfg;
  if (r == 0) return out;
  out.rng_seed = derive_seed(cfg.rng_seed, static_cast<std::uint64_t>(r));
  if (r == 1) {
    out.init_strategy = cfg.init_strategy == InitStrategy::graph_degree_quantile
                            ? InitStrategy::feature_kmeans
                            : InitStrategy::graph_degree_quantile;
  } else if (r % 2 == 1) {
    out.init_strategy = InitStrategy::random_dirichlet;
  }
  return out;
}

FitResult fit_multi_restart(const Graph& g, const FeatureMatrix& f, std::size_t q, const EMConfig& cfg) {
  cfg.validate();
  const auto restarts = static_cast<std::size_t>(cfg.n_restarts);
  std::vector<std::optional<FitResult>> results(restarts);
  std::vector<std::string> errors(restarts);

  parallel_for(restarts, cfg.threads, [&](std::size_t r) {
    EMConfig rc = restart_config(cfg, static_cast<int>(r));
    rc.threads = 1;
    try {
      results[r] = fit(g, f, q, rc);
      results[r]->restart_index = static_cast<int>(r);
    } catch (const MonotonicityError&) {
      throw;
    } catch (const Error& e) {
      errors[r] = e.what();
    }
  });

  std::optional<std::size_t> best;
  for (std::size_t r = 0; r < restarts; ++r) {
    if (!results[r]) continue;
    if (!best || results[r]->final_j() > results[*best]->final_j()) best = r;
  }
  if (!best) {
    std::string msg = "all " + std::to_string(restarts) + " restarts failed";
    if (!errors.empty()) msg += ": " + errors.front();
    throw Error(msg);
  }
  return std::move(*results[*best]);
}

FitResult fit_ablation(const Graph& g, const FeatureMatrix& f, std::size_t q, const EMConfig& cfg,
                       FitMode mode) {
  EMConfig c = cfg;
  c.mode = mode;
  return fit(g, f, q, c);
}

}  // namespace cohsmix
