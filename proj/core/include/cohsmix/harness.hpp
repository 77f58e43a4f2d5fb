#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cohsmix/inference.hpp"
#include "cohsmix/selection.hpp"
#include "cohsmix/simulator.hpp"

namespace cohsmix {

struct GridConfig {
  EMConfig em;                  // em.n_restarts restarts per Q
  std::size_t replicates = 20;
  std::size_t q_min = 2;        // ICL scan lower bound
  std::size_t q_margin = 2;     // scan goes up to true Q + q_margin
  double center = kDefaultConnectivityCenter;
  std::uint64_t seed = 0;
  unsigned threads = 1;         // workers over replicates
  IclLikelihood icl_kind = IclLikelihood::soft;
};

/// One fitted replicate of one grid spec.
struct ExperimentRecord {
  char setting = 'a';
  std::size_t spec_index = 0;
  std::string varied;
  double varied_value = 0.0;
  AffiliationSpec spec;
  std::size_t replicate = 0;
  std::size_t fitted_q = 0;
  double final_j = 0.0;
  double icl = 0.0;
  double ari = 0.0;
  double wall_seconds = 0.0;
  std::string status = "ok";  // "ok" or "error: <message>"

  bool ok() const { return status == "ok"; }
};

/// Median adjusted Rand index of one grid spec over its successful replicates.
struct AggregateRow {
  char setting = 'a';
  std::size_t spec_index = 0;
  std::string varied;
  double varied_value = 0.0;
  std::size_t replicates_ok = 0;
  double median_ari = 0.0;
  double mean_ari = 0.0;
  double median_fitted_q = 0.0;
};

/// Simulates replicate `replicate` of `grid`, selects Q by ICL over
/// [q_min, true Q + q_margin] and scores the selected partition. Errors are
/// captured in the status field.
ExperimentRecord run_replicate(const GridSpec& grid, std::size_t replicate, const GridConfig& cfg);

/// Every spec of a setting times cfg.replicates, ordered by (spec, replicate).
std::vector<ExperimentRecord> run_grid(char setting, const GridConfig& cfg);
std::vector<ExperimentRecord> run_grid(const std::vector<GridSpec>& specs, const GridConfig& cfg);

std::vector<AggregateRow> aggregate(const std::vector<ExperimentRecord>& records);

double median(std::vector<double> values);

/// results.csv: deterministic given the inputs (no timing columns).
void write_results_csv(const std::vector<ExperimentRecord>& records, const std::filesystem::path& path);
void write_aggregate_csv(const std::vector<AggregateRow>& rows, const std::filesystem::path& path);
void write_timings_csv(const std::vector<ExperimentRecord>& records, const std::filesystem::path& path);

}  // namespace cohsmix
