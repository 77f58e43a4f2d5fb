// cohsmix: fit, select the number of classes, simulate affiliation graphs and
// run simulation grids from the command line.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cohsmix/harness.hpp"
#include "cohsmix/inference.hpp"
#include "cohsmix/io.hpp"
#include "cohsmix/parallel.hpp"
#include "cohsmix/selection.hpp"
#include "cohsmix/simulator.hpp"

namespace fs = std::filesystem;
using namespace cohsmix;

namespace {

struct GlobalOptions {
  std::uint64_t seed = 0;
  int restarts = 10;
  int max_iters = 100;
  std::string out = "cohsmix_out";
  std::string init = "feature-kmeans";
  bool check_monotone = false;
};

struct DataOptions {
  std::string graph;
  std::string features;
};

EMConfig make_em_config(const GlobalOptions& g) {
  EMConfig cfg;
  cfg.rng_seed = g.seed;
  cfg.n_restarts = g.restarts;
  cfg.max_em_iters = g.max_iters;
  cfg.init_strategy = init_strategy_from_string(g.init);
  cfg.check_monotone = g.check_monotone;
  cfg.threads = default_thread_count();
  return cfg;
}

std::pair<Graph, FeatureMatrix> load_data(const DataOptions& d) {
  GraphReadResult gr = read_graph(d.graph);
  if (gr.self_loops_dropped > 0) {
    std::cerr << "warning: dropped " << gr.self_loops_dropped << " self-loop(s) from " << d.graph << '\n';
  }
  FeatureMatrix f = d.features.empty() ? FeatureMatrix::empty(gr.graph.n()) : read_features(d.features);
  if (f.n() != gr.graph.n()) {
    throw DimensionError("features have " + std::to_string(f.n()) + " rows but the graph has " +
                         std::to_string(gr.graph.n()) + " vertices");
  }
  return {std::move(gr.graph), std::move(f)};
}

void print_fit(const FitResult& fit, const ResultPaths& paths) {
  std::cout << "Q=" << fit.num_classes() << " J=" << format_double(fit.final_j())
            << " ICL=" << format_double(fit.icl) << " converged=" << (fit.converged ? "yes" : "no")
            << " iterations=" << fit.iterations << '\n'
            << "wrote " << paths.partition.string() << ", " << paths.tau.string() << ", "
            << paths.params.string() << ", " << paths.summary.string() << '\n';
}

int run_fit(const GlobalOptions& g, const DataOptions& d, std::size_t q, const std::string& mode) {
  auto [graph, features] = load_data(d);
  EMConfig cfg = make_em_config(g);
  cfg.mode = fit_mode_from_string(mode);
  FitResult fit = fit_multi_restart(graph, features, q, cfg);
  fit.icl = icl_score(fit, graph, features);
  print_fit(fit, write_result(fit, g.out));
  return 0;
}

int run_select_q(const GlobalOptions& g, const DataOptions& d, std::size_t q_min, std::size_t q_max,
                 bool hard_icl) {
  auto [graph, features] = load_data(d);
  const EMConfig cfg = make_em_config(g);
  const ICLScan scan =
      select_q(graph, features, q_min, q_max, cfg, hard_icl ? IclLikelihood::hard : IclLikelihood::soft);

  fs::create_directories(g.out);
  std::ofstream csv(fs::path(g.out) / "icl_scan.csv", std::ios::binary);
  csv << "q,icl,final_j,status\n";
  for (const auto& e : scan.entries) {
    if (e.fit) {
      csv << e.q << ',' << format_double(e.icl) << ',' << format_double(e.fit->final_j()) << ",ok\n";
    } else {
      csv << e.q << ",,,\"error: " << e.error << "\"\n";
    }
  }
  std::cout << "selected Q=" << scan.selected_q << '\n';
  print_fit(scan.best(), write_result(scan.best(), g.out));
  return 0;
}

void write_instance(const SimulatedData& data, const fs::path& dir) {
  fs::create_directories(dir);
  write_graph(data.graph, dir / "graph.tsv");
  write_features(data.features, dir / "features.csv");
  write_partition(data.truth, dir / "truth.csv");
}

int run_simulate(const GlobalOptions& g, const std::string& setting, const AffiliationSpec& explicit_spec,
                 double center) {
  const fs::path out = g.out;
  if (setting.empty()) {
    AffiliationSpec spec = explicit_spec;
    spec.seed = g.seed;
    write_instance(generate(spec), out);
    std::cout << "wrote " << out.string() << "/{graph.tsv,features.csv,truth.csv}\n";
    return 0;
  }
  if (setting.size() != 1) throw InvalidArgument("unknown grid setting '" + setting + "'");
  const auto specs = grid_specs(setting[0], center);
  fs::create_directories(out);
  std::ofstream manifest(out / "specs.csv", std::ios::binary);
  manifest << "setting,spec_index,directory,n,q,nb_cov,lambda,epsilon,mean_gap,sigma_sim,seed\n";
  for (const auto& gs : specs) {
    AffiliationSpec spec = gs.spec;
    spec.seed = derive_seed(g.seed, gs.index);
    const std::string name = std::string(1, gs.setting) + "_" + std::to_string(gs.index);
    write_instance(generate(spec), out / name);
    manifest << gs.setting << ',' << gs.index << ',' << name << ',' << spec.n << ',' << spec.q << ',' << spec.p
             << ',' << format_double(spec.lambda) << ',' << format_double(spec.epsilon) << ','
             << format_double(spec.mean_gap) << ',' << format_double(spec.sigma_sim) << ',' << spec.seed << '\n';
  }
  std::cout << "wrote " << specs.size() << " instances under " << out.string() << '\n';
  return 0;
}

int run_grid_command(const GlobalOptions& g, const std::string& setting, std::size_t replicates,
                     std::size_t q_min, std::size_t q_margin, double center) {
  if (setting.size() != 1) throw InvalidArgument("unknown grid setting '" + setting + "'");
  GridConfig cfg;
  cfg.em = make_em_config(g);
  cfg.em.threads = 1;
  cfg.replicates = replicates;
  cfg.q_min = q_min;
  cfg.q_margin = q_margin;
  cfg.center = center;
  cfg.seed = g.seed;
  cfg.threads = default_thread_count();

  const auto records = run_grid(setting[0], cfg);
  const fs::path out = g.out;
  write_results_csv(records, out / "results.csv");
  write_aggregate_csv(aggregate(records), out / "aggregate.csv");
  write_timings_csv(records, out / "timings.csv");

  std::size_t failed = 0;
  for (const auto& r : records) failed += r.ok() ? 0 : 1;
  std::cout << "wrote " << records.size() << " records to " << (out / "results.csv").string() << " ("
            << failed << " failed)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clustering of graphs with vertex features (stochastic block model + Gaussian features)"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Random seed")->capture_default_str();
  app.add_option("--restarts", global.restarts, "EM restarts per fit")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--max-iters", global.max_iters, "Maximum EM iterations")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--out", global.out, "Output directory")->capture_default_str();
  app.add_option("--init", global.init, "Initialization: feature-kmeans, random-dirichlet, graph-degree-quantile")
      ->capture_default_str();
  app.add_flag("--check-monotone", global.check_monotone, "Fail if the lower bound ever decreases");

  DataOptions data;
  std::size_t q = 2;
  std::string mode = "joint";
  auto* fit_cmd = app.add_subcommand("fit", "Fit a model with a fixed number of classes");
  fit_cmd->add_option("--graph", data.graph, "Edge list (or dense .csv) file")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--features", data.features, "Feature CSV (omit for graph-only data)")->check(CLI::ExistingFile);
  fit_cmd->add_option("--q", q, "Number of classes")->required()->check(CLI::PositiveNumber);
  fit_cmd->add_option("--mode", mode, "joint, graph-only or features-only")
      ->capture_default_str()
      ->check(CLI::IsMember({"joint", "graph-only", "features-only"}));

  std::size_t q_min = 2;
  std::size_t q_max = 6;
  bool hard_icl = false;
  auto* select_cmd = app.add_subcommand("select-q", "Choose the number of classes by ICL");
  select_cmd->add_option("--graph", data.graph, "Edge list (or dense .csv) file")->required()->check(CLI::ExistingFile);
  select_cmd->add_option("--features", data.features, "Feature CSV")->check(CLI::ExistingFile);
  select_cmd->add_option("--qmin", q_min, "Smallest Q")->capture_default_str()->check(CLI::PositiveNumber);
  select_cmd->add_option("--qmax", q_max, "Largest Q")->capture_default_str()->check(CLI::PositiveNumber);
  select_cmd->add_flag("--hard-icl", hard_icl, "Score ICL with the hard partition instead of tau");

  std::string setting;
  double center = kDefaultConnectivityCenter;
  AffiliationSpec spec;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate affiliation-model graphs with features");
  sim_cmd->add_option("--setting", setting, "Grid setting a, b, c or d")->check(CLI::IsMember({"a", "b", "c", "d"}));
  sim_cmd->add_option("--n", spec.n, "Vertices")->capture_default_str();
  sim_cmd->add_option("--q", spec.q, "Classes")->capture_default_str();
  sim_cmd->add_option("--lambda", spec.lambda, "Within-class edge probability")->capture_default_str();
  sim_cmd->add_option("--epsilon", spec.epsilon, "Between-class edge probability")->capture_default_str();
  sim_cmd->add_option("--gap", spec.mean_gap, "Per-coordinate gap between class means")->capture_default_str();
  sim_cmd->add_option("--p", spec.p, "Number of features")->capture_default_str();
  sim_cmd->add_option("--sigma", spec.sigma_sim, "Feature noise standard deviation")->capture_default_str();
  sim_cmd->add_option("--center", center, "Midpoint of lambda and epsilon for grid settings")->capture_default_str();

  std::size_t replicates = 20;
  std::size_t grid_q_min = 2;
  std::size_t q_margin = 2;
  auto* grid_cmd = app.add_subcommand("grid", "Run a simulation grid and score partitions by ARI");
  grid_cmd->add_option("--setting", setting, "Grid setting a, b, c or d")
      ->required()
      ->check(CLI::IsMember({"a", "b", "c", "d"}));
  grid_cmd->add_option("--replicates", replicates, "Replicates per spec")->capture_default_str()->check(CLI::PositiveNumber);
  grid_cmd->add_option("--qmin", grid_q_min, "Smallest Q in the ICL scan")->capture_default_str()->check(CLI::PositiveNumber);
  grid_cmd->add_option("--q-margin", q_margin, "Scan up to true Q plus this margin")->capture_default_str();
  grid_cmd->add_option("--center", center, "Midpoint of lambda and epsilon")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*fit_cmd) return run_fit(global, data, q, mode);
    if (*select_cmd) return run_select_q(global, data, q_min, q_max, hard_icl);
    if (*sim_cmd) return run_simulate(global, setting, spec, center);
    if (*grid_cmd) return run_grid_command(global, setting, replicates, grid_q_min, q_margin, center);
  } catch (const ParseError& e) {
    std::cerr << "error: parse: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: io: " << e.what() << '\n';
    return 1;
  } catch (const DimensionError& e) {
    std::cerr << "error: dimension: " << e.what() << '\n';
    return 1;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: invalid-argument: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: runtime: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
