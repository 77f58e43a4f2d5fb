#include "cohsmix/selection.hpp"

#include <cmath>

namespace cohsmix {

double icl_penalty(std::size_t q, std::size_t n, std::size_t p) {
  const double dq = static_cast<double>(q);
  const double dn = static_cast<double>(n);
  const double dp = static_cast<double>(p);
  const double log_pairs = std::log(dn * (dn - 1.0) / 2.0);
  const double connectivity = 0.5 * dq * (dq - 1.0) * log_pairs;
  const double proportions = 0.5 * (dq - 1.0) * std::log(dn);
  const double features = dp * (dp - 1.0) * log_pairs + dp * dq * log_pairs;
  return connectivity + proportions + features;
}

double icl_score(const FitResult& fit, const Graph& g, const FeatureMatrix& f, IclLikelihood kind) {
  const std::size_t p = fit.mode == FitMode::graph_only ? 0 : f.p();
  const double loglik = kind == IclLikelihood::soft
                            ? complete_log_likelihood(g, f, fit.tau, fit.params, fit.mode)
                            : complete_log_likelihood(g, f, fit.partition, fit.params, fit.mode);
  return loglik - icl_penalty(fit.num_classes(), g.n(), p);
}

ICLScan select_q(const Graph& g, const FeatureMatrix& f, std::size_t q_min, std::size_t q_max,
                 const EMConfig& cfg, IclLikelihood kind) {
  if (q_min < 1 || q_min > q_max) throw InvalidArgument("need 1 <= q_min <= q_max");
  ICLScan scan;
  scan.q_min = q_min;
  scan.q_max = q_max;
  for (std::size_t q = q_min; q <= q_max; ++q) {
    ScanEntry entry;
    entry.q = q;
    try {
      entry.fit = fit_multi_restart(g, f, q, cfg);
      entry.icl = icl_score(*entry.fit, g, f, kind);
      entry.fit->icl = entry.icl;
      if (!std::isfinite(entry.icl)) {
        entry.error = "non-finite ICL";
        entry.fit.reset();
      }
    } catch (const MonotonicityError&) {
      throw;
    } catch (const Error& e) {
      entry.error = e.what();
      entry.fit.reset();
    }
    scan.entries.push_back(std::move(entry));
    const ScanEntry& added = scan.entries.back();
    if (added.fit && (scan.selected_q == 0 || added.icl > scan.selected().icl)) scan.selected_q = q;
  }
  if (scan.selected_q == 0) throw Error("every Q in the scan failed to fit");
  return scan;
}

}  // namespace cohsmix
