#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cohsmix/inference.hpp"

namespace cohsmix {

/// Which complete log-likelihood enters ICL: tau-weighted (default) or the
/// hard partition obtained by row-wise argmax.
enum class IclLikelihood { soft, hard };

/// Penalty part of ICL(Q) for n vertices and p features:
///   1/2 Q(Q-1) log(n(n-1)/2) + (Q-1)/2 log n + p(p-1) log(n(n-1)/2) + p Q log(n(n-1)/2)
double icl_penalty(std::size_t q, std::size_t n, std::size_t p);

/// Complete log-likelihood at the fitted parameters minus icl_penalty. In
/// graph-only mode the features are ignored and p is taken as 0.
double icl_score(const FitResult& fit, const Graph& g, const FeatureMatrix& f,
                 IclLikelihood kind = IclLikelihood::soft);

struct ScanEntry {
  std::size_t q = 0;
  std::optional<FitResult> fit;  // empty when the fit failed
  double icl = 0.0;
  std::string error;
};

struct ICLScan {
  std::size_t q_min = 0;
  std::size_t q_max = 0;
  std::vector<ScanEntry> entries;  // one per Q in [q_min, q_max]
  std::size_t selected_q = 0;

  const ScanEntry& selected() const { return entries.at(selected_q - q_min); }
  const FitResult& best() const { return *selected().fit; }
};

/// Runs fit_multi_restart for every Q in [q_min, q_max] and keeps the one
/// with the largest ICL (ties to the smaller Q). Failed fits are recorded and
/// skipped; throws Error if all of them fail.
ICLScan select_q(const Graph& g, const FeatureMatrix& f, std::size_t q_min, std::size_t q_max,
                 const EMConfig& cfg, IclLikelihood kind = IclLikelihood::soft);

}  // namespace cohsmix
