#include "cohsmix/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include <json.hpp>

namespace cohsmix {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(s);
  while (std::getline(in, cell, sep)) out.push_back(trim(cell));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::optional<double> parse_double(const std::string& s) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || begin == end) return std::nullopt;
  return v;
}

std::optional<std::size_t> parse_index(const std::string& s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return trim(hash == std::string::npos ? line : line.substr(0, hash));
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

GraphReadResult parse_edge_list(std::istream& in) {
  std::optional<std::size_t> declared_n;
  std::vector<Edge> edges;
  std::size_t loops = 0;
  std::size_t max_index = 0;
  bool any = false;

  std::string raw;
  for (std::size_t lineno = 1; std::getline(in, raw); ++lineno) {
    const std::string line = strip_comment(raw);
    if (line.empty()) continue;
    if (line.rfind("n=", 0) == 0) {
      const auto n = parse_index(trim(line.substr(2)));
      if (!n) throw ParseError("line " + std::to_string(lineno) + ": malformed header '" + line + "'", lineno);
      declared_n = *n;
      continue;
    }
    std::istringstream fields(line);
    std::string a;
    std::string b;
    std::string extra;
    fields >> a >> b;
    const auto i = parse_index(a);
    const auto j = parse_index(b);
    if (!i || !j || (fields >> extra)) {
      throw ParseError("line " + std::to_string(lineno) + ": expected two vertex indices, got '" + line + "'",
                       lineno);
    }
    if (declared_n && (*i >= *declared_n || *j >= *declared_n)) {
      throw ParseError("line " + std::to_string(lineno) + ": vertex index out of range for n=" +
                           std::to_string(*declared_n),
                       lineno);
    }
    max_index = std::max({max_index, *i, *j});
    any = true;
    if (*i == *j) {
      ++loops;
      continue;
    }
    edges.emplace_back(*i, *j);
  }

  std::size_t n = declared_n.value_or(any ? max_index + 1 : 0);
  if (declared_n && any && max_index >= n) {
    throw ParseError("vertex index " + std::to_string(max_index) + " out of range for n=" + std::to_string(n), 0);
  }
  return {Graph::from_edges(n, edges), loops};
}

GraphReadResult parse_dense_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string raw;
  for (std::size_t lineno = 1; std::getline(in, raw); ++lineno) {
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::vector<double> row;
    for (const auto& cell : split(line, ',')) {
      const auto v = parse_double(cell);
      if (!v || (*v != 0.0 && *v != 1.0)) {
        throw ParseError("line " + std::to_string(lineno) + ": adjacency entries must be 0 or 1", lineno);
      }
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  const std::size_t n = rows.size();
  std::vector<Edge> edges;
  std::size_t loops = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      throw ParseError("row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                           " entries; expected " + std::to_string(n),
                       i + 1);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i][i] != 0.0) ++loops;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rows[i][j] != 0.0 || rows[j][i] != 0.0) edges.emplace_back(i, j);
    }
  }
  return {Graph::from_edges(n, edges), loops};
}

GraphReadResult read_graph(const fs::path& path) {
  auto in = open_input(path);
  return path.extension() == ".csv" ? parse_dense_csv(in) : parse_edge_list(in);
}

void write_graph(const Graph& g, const fs::path& path) {
  auto out = open_output(path);
  out << "n=" << g.n() << '\n';
  for (auto [i, j] : g.edges()) out << i << '\t' << j << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

FeatureMatrix parse_features(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string raw;
  bool first = true;
  std::size_t width = 0;
  for (std::size_t lineno = 1; std::getline(in, raw); ++lineno) {
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    std::vector<double> row;
    row.reserve(cells.size());
    bool numeric = true;
    for (const auto& cell : cells) {
      const auto v = parse_double(cell);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw ParseError("line " + std::to_string(lineno) + ": non-numeric cell", lineno);
    }
    if (rows.empty()) {
      width = row.size();
    } else if (row.size() != width) {
      throw ParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(width) +
                           " columns, got " + std::to_string(row.size()),
                       lineno);
    }
    for (double v : row) {
      if (!std::isfinite(v)) throw ParseError("line " + std::to_string(lineno) + ": non-finite value", lineno);
    }
    first = false;
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < width; ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  }
  return FeatureMatrix(std::move(m));
}

FeatureMatrix read_features(const fs::path& path) {
  auto in = open_input(path);
  return parse_features(in);
}

namespace {

void write_matrix_rows(std::ostream& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      if (k > 0) out << ',';
      out << format_double(m(i, k));
    }
    out << '\n';
  }
}

}  // namespace

void write_features(const FeatureMatrix& f, const fs::path& path) {
  auto out = open_output(path);
  write_matrix_rows(out, f.values());
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<int> read_partition(const fs::path& path) {
  auto in = open_input(path);
  std::map<std::size_t, int> labels;
  std::string raw;
  for (std::size_t lineno = 1; std::getline(in, raw); ++lineno) {
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 2) throw ParseError("line " + std::to_string(lineno) + ": expected vertex,label", lineno);
    const auto v = parse_index(cells[0]);
    const auto l = parse_index(cells[1]);
    if (!v || !l) {
      if (lineno == 1) continue;  // header
      throw ParseError("line " + std::to_string(lineno) + ": expected vertex,label", lineno);
    }
    labels[*v] = static_cast<int>(*l);
  }
  std::vector<int> out;
  out.reserve(labels.size());
  std::size_t expect = 0;
  for (auto [v, l] : labels) {
    if (v != expect++) throw ParseError("partition file skips vertex " + std::to_string(expect - 1), 0);
    out.push_back(l);
  }
  return out;
}

void write_partition(const Partition& z, const fs::path& path) {
  auto out = open_output(path);
  out << "vertex,label\n";
  for (std::size_t i = 0; i < z.size(); ++i) out << i << ',' << z.labels[i] << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, Eigen::Index cols_if_empty_rows) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j.at(0).size()) : cols_if_empty_rows;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols) throw ParseError("ragged matrix in params file", 0);
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
  }
  return m;
}

}  // namespace

ResultPaths write_result(const FitResult& fit, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");

  ResultPaths paths{dir / "partition.csv", dir / "tau.csv", dir / "params.json", dir / "summary.txt"};

  write_partition(fit.partition, paths.partition);

  {
    auto out = open_output(paths.tau);
    write_matrix_rows(out, fit.tau.values());
    if (!out) throw IoError("failed writing '" + paths.tau.string() + "'");
  }

  {
    json j;
    j["Q"] = fit.num_classes();
    j["alpha"] = std::vector<double>(fit.params.alpha.data(), fit.params.alpha.data() + fit.params.alpha.size());
    j["pi"] = matrix_to_json(fit.params.pi);
    j["mu"] = matrix_to_json(fit.params.mu);
    j["p"] = fit.params.num_features();
    j["sigma2"] = fit.params.sigma2;
    j["j_trace"] = fit.j_trace;
    j["icl"] = std::isfinite(fit.icl) ? json(fit.icl) : json(nullptr);
    j["mode"] = to_string(fit.mode);
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    auto out = open_output(paths.params);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing '" + paths.params.string() + "'");
  }

  {
    auto out = open_output(paths.summary);
    std::vector<std::size_t> sizes(fit.num_classes(), 0);
    for (int l : fit.partition.labels) ++sizes[static_cast<std::size_t>(l)];
    out << "classes: " << fit.num_classes() << '\n'
        << "vertices: " << fit.partition.size() << '\n'
        << "features: " << fit.params.num_features() << '\n'
        << "mode: " << to_string(fit.mode) << '\n'
        << "init: " << to_string(fit.init) << '\n'
        << "restart: " << fit.restart_index << '\n'
        << "converged: " << (fit.converged ? "yes" : "no") << '\n'
        << "iterations: " << fit.iterations << '\n'
        << "lower bound: " << format_double(fit.final_j()) << '\n'
        << "ICL: " << format_double(fit.icl) << '\n'
        << "sigma2: " << format_double(fit.params.sigma2) << '\n';
    for (std::size_t q = 0; q < sizes.size(); ++q) {
      out << "class " << q << ": " << sizes[q] << " vertices, alpha " << format_double(fit.params.alpha(static_cast<Eigen::Index>(q))) << '\n';
    }
    if (!out) throw IoError("failed writing '" + paths.summary.string() + "'");
  }
  return paths;
}

ParamsFile read_params(const fs::path& path) {
  auto in = open_input(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("invalid JSON in '" + path.string() + "': " + e.what(), 0);
  }
  try {
    ParamsFile out;
    const auto alpha = j.at("alpha").get<std::vector<double>>();
    out.params.alpha = Eigen::Map<const Vector>(alpha.data(), static_cast<Eigen::Index>(alpha.size()));
    out.params.pi = matrix_from_json(j.at("pi"), 0);
    out.params.mu = matrix_from_json(j.at("mu"), j.value("p", 0));
    out.params.sigma2 = j.at("sigma2").get<double>();
    out.j_trace = j.at("j_trace").get<std::vector<double>>();
    out.icl = j.at("icl").is_null() ? std::numeric_limits<double>::quiet_NaN() : j.at("icl").get<double>();
    out.mode = fit_mode_from_string(j.value("mode", std::string("joint")));
    out.converged = j.value("converged", false);
    out.iterations = j.value("iterations", 0);
    if (j.at("Q").get<std::size_t>() != out.params.num_classes()) throw ParseError("Q disagrees with alpha", 0);
    out.params.validate();
    return out;
  } catch (const json::exception& e) {
    throw ParseError("malformed params file '" + path.string() + "': " + e.what(), 0);
  }
}

Matrix read_matrix_csv(const fs::path& path) {
  auto in = open_input(path);
  return parse_features(in).values();
}

}  // namespace cohsmix
