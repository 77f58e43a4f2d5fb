#include "cohsmix/harness.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <numeric>

#include "cohsmix/io.hpp"
#include "cohsmix/metrics.hpp"
#include "cohsmix/parallel.hpp"

namespace cohsmix {

namespace {

std::uint64_t replicate_seed(std::uint64_t seed, char setting, std::size_t spec_index, std::size_t replicate) {
  const std::uint64_t stream = (static_cast<std::uint64_t>(static_cast<unsigned char>(setting)) << 48) ^
                               (static_cast<std::uint64_t>(spec_index) << 24) ^ replicate;
  return derive_seed(seed, stream);
}

std::ofstream open_csv(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

ExperimentRecord run_replicate(const GridSpec& grid, std::size_t replicate, const GridConfig& cfg) {
  ExperimentRecord rec;
  rec.setting = grid.setting;
  rec.spec_index = grid.index;
  rec.varied = grid.varied;
  rec.varied_value = grid.varied_value;
  rec.spec = grid.spec;
  rec.spec.seed = replicate_seed(cfg.seed, grid.setting, grid.index, replicate);
  rec.replicate = replicate;

  const auto start = std::chrono::steady_clock::now();
  try {
    const SimulatedData data = generate(rec.spec);
    EMConfig em = cfg.em;
    em.rng_seed = derive_seed(rec.spec.seed, 1);
    em.threads = 1;
    const std::size_t q_max = std::max(cfg.q_min, rec.spec.q + cfg.q_margin);
    const ICLScan scan = select_q(data.graph, data.features, cfg.q_min, q_max, em, cfg.icl_kind);
    const FitResult& best = scan.best();
    rec.fitted_q = scan.selected_q;
    rec.final_j = best.final_j();
    rec.icl = scan.selected().icl;
    rec.ari = adjusted_rand_index(best.partition, data.truth);
  } catch (const std::exception& e) {
    rec.status = std::string("error: ") + e.what();
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<ExperimentRecord> run_grid(const std::vector<GridSpec>& specs, const GridConfig& cfg) {
  std::vector<ExperimentRecord> records(specs.size() * cfg.replicates);
  parallel_for(records.size(), cfg.threads, [&](std::size_t k) {
    records[k] = run_replicate(specs[k / cfg.replicates], k % cfg.replicates, cfg);
  });
  return records;
}

std::vector<ExperimentRecord> run_grid(char setting, const GridConfig& cfg) {
  return run_grid(grid_specs(setting, cfg.center), cfg);
}

std::vector<AggregateRow> aggregate(const std::vector<ExperimentRecord>& records) {
  std::map<std::pair<char, std::size_t>, std::vector<const ExperimentRecord*>> groups;
  for (const auto& r : records) groups[{r.setting, r.spec_index}].push_back(&r);

  std::vector<AggregateRow> rows;
  for (const auto& [key, members] : groups) {
    AggregateRow row;
    row.setting = key.first;
    row.spec_index = key.second;
    row.varied = members.front()->varied;
    row.varied_value = members.front()->varied_value;
    std::vector<double> aris;
    std::vector<double> qs;
    for (const auto* r : members) {
      if (!r->ok()) continue;
      aris.push_back(r->ari);
      qs.push_back(static_cast<double>(r->fitted_q));
    }
    row.replicates_ok = aris.size();
    row.median_ari = median(aris);
    row.mean_ari = aris.empty() ? std::numeric_limits<double>::quiet_NaN()
                                : std::accumulate(aris.begin(), aris.end(), 0.0) / static_cast<double>(aris.size());
    row.median_fitted_q = median(qs);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

// Keeps a status message on one CSV field.
std::string csv_field(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

void write_results_csv(const std::vector<ExperimentRecord>& records, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "setting,spec_index,varied,varied_value,n,true_q,nb_cov,lambda,epsilon,mean_gap,sigma_sim,"
         "replicate,seed,fitted_q,final_j,icl,ari,status\n";
  for (const auto& r : records) {
    out << r.setting << ',' << r.spec_index << ',' << r.varied << ',' << format_double(r.varied_value) << ','
        << r.spec.n << ',' << r.spec.q << ',' << r.spec.p << ',' << format_double(r.spec.lambda) << ','
        << format_double(r.spec.epsilon) << ',' << format_double(r.spec.mean_gap) << ','
        << format_double(r.spec.sigma_sim) << ',' << r.replicate << ',' << r.spec.seed << ',';
    if (r.ok()) {
      out << r.fitted_q << ',' << format_double(r.final_j) << ',' << format_double(r.icl) << ','
          << format_double(r.ari) << ",ok\n";
    } else {
      out << ",,,," << csv_field(r.status) << '\n';
    }
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_aggregate_csv(const std::vector<AggregateRow>& rows, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "setting,spec_index,varied,varied_value,replicates_ok,median_ari,mean_ari,median_fitted_q\n";
  for (const auto& r : rows) {
    out << r.setting << ',' << r.spec_index << ',' << r.varied << ',' << format_double(r.varied_value) << ','
        << r.replicates_ok << ',' << format_double(r.median_ari) << ',' << format_double(r.mean_ari) << ','
        << format_double(r.median_fitted_q) << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_timings_csv(const std::vector<ExperimentRecord>& records, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "setting,spec_index,replicate,wall_seconds\n";
  for (const auto& r : records) {
    out << r.setting << ',' << r.spec_index << ',' << r.replicate << ',' << format_double(r.wall_seconds) << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace cohsmix
