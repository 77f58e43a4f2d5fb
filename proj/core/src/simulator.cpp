#include "cohsmix/simulator.hpp"

#include <string>

#include "cohsmix/random.hpp"

namespace cohsmix {

void AffiliationSpec::validate() const {
  if (q < 1) throw InvalidArgument("Q must be >= 1");
  if (n < q) throw InvalidArgument("n must be >= Q");
  if (!(0.0 <= epsilon && epsilon <= lambda && lambda <= 1.0)) {
    throw InvalidArgument("need 0 <= epsilon <= lambda <= 1");
  }
  if (!(sigma_sim >= 0.0)) throw InvalidArgument("sigma_sim must be non-negative");
}

SimulatedData generate(const AffiliationSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const auto n = static_cast<Eigen::Index>(spec.n);

  Partition truth;
  truth.labels.resize(spec.n);
  for (auto& z : truth.labels) z = static_cast<int>(uniform_index(rng, spec.q));

  std::vector<Edge> edges;
  for (std::size_t i = 0; i < spec.n; ++i) {
    for (std::size_t j = i + 1; j < spec.n; ++j) {
      const double prob = truth.labels[i] == truth.labels[j] ? spec.lambda : spec.epsilon;
      if (uniform01(rng) < prob) edges.emplace_back(i, j);
    }
  }

  Matrix y(n, static_cast<Eigen::Index>(spec.p));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mean = static_cast<double>(truth.labels[static_cast<std::size_t>(i)] + 1) * spec.mean_gap;
    for (Eigen::Index k = 0; k < y.cols(); ++k) y(i, k) = mean + spec.sigma_sim * standard_normal(rng);
  }

  return {Graph::from_edges(spec.n, edges), FeatureMatrix(std::move(y)), std::move(truth)};
}

std::vector<GridSpec> grid_specs(char setting, double center) {
  std::vector<GridSpec> out;
  auto add = [&](std::size_t q, std::size_t p, double gap, double mean_gap, const char* varied, double value) {
    GridSpec g;
    g.setting = setting;
    g.index = out.size();
    g.varied = varied;
    g.varied_value = value;
    g.connectivity_gap = gap;
    g.spec.q = q;
    g.spec.p = p;
    g.spec.lambda = center + gap / 2.0;
    g.spec.epsilon = center - gap / 2.0;
    g.spec.mean_gap = mean_gap;
    g.spec.validate();
    out.push_back(g);
  };

  switch (setting) {
    case 'a':
      for (std::size_t q = 2; q <= 12; ++q) add(q, 3, 0.4, 4.0, "Q", static_cast<double>(q));
      break;
    case 'b':
      for (std::size_t p = 2; p <= 15; ++p) add(5, p, 0.2, 4.0, "nbCov", static_cast<double>(p));
      break;
    case 'c':
      for (int k = 0; k <= 10; ++k) add(3, 3, 0.05 * k, 4.0, "d_lambda_epsilon", 0.05 * k);
      break;
    case 'd':
      for (int k = 0; k <= 6; ++k) add(3, 3, 0.0, 4.0 + 0.75 * k, "d_mu", 4.0 + 0.75 * k);
      break;
    default:
      throw InvalidArgument(std::string("unknown grid setting '") + setting + "'");
  }
  return out;
}

}  // namespace cohsmix
