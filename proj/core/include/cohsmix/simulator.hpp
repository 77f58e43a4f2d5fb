#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cohsmix/types.hpp"

namespace cohsmix {

/// Affiliation model: within-class edge probability lambda, between-class
/// epsilon, equal class proportions, spherical Gaussian features whose class
/// means sit at (q + 1) * mean_gap on every coordinate.
struct AffiliationSpec {
  std::size_t n = 150;
  std::size_t q = 2;
  std::size_t p = 3;
  double lambda = 0.5;
  double epsilon = 0.1;
  double mean_gap = 4.0;
  double sigma_sim = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SimulatedData {
  Graph graph;
  FeatureMatrix features;
  Partition truth;
};

SimulatedData generate(const AffiliationSpec& spec);

/// One row of an experiment grid: the spec plus the parameter the setting varies.
struct GridSpec {
  char setting = 'a';
  std::size_t index = 0;       // position within the setting
  std::string varied;          // "Q", "nbCov", "d_lambda_epsilon" or "d_mu"
  double varied_value = 0.0;
  double connectivity_gap = 0.0;  // lambda - epsilon
  AffiliationSpec spec;
};

inline constexpr double kDefaultConnectivityCenter = 0.3;

/// Grid rows for setting a, b, c or d. lambda and epsilon are placed
/// symmetrically around `center`. Throws InvalidArgument on an unknown setting.
std::vector<GridSpec> grid_specs(char setting, double center = kDefaultConnectivityCenter);

}  // namespace cohsmix
