#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cohsmix/inference.hpp"
#include "cohsmix/types.hpp"

namespace cohsmix {

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed input; line() is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line) : Error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct GraphReadResult {
  Graph graph;
  std::size_t self_loops_dropped = 0;
};

/// Edge list: one "i<TAB>j" pair of 0-based vertex indices per line, '#'
/// comments, optional "n=<count>" header. Without a header n is one past the
/// largest index. Pairs are symmetrized and duplicates merged.
GraphReadResult parse_edge_list(std::istream& in);

/// Dense square 0/1 CSV. Asymmetric entries are OR-ed, the diagonal dropped.
GraphReadResult parse_dense_csv(std::istream& in);

/// Dispatches on extension: ".csv" is dense, anything else an edge list.
GraphReadResult read_graph(const std::filesystem::path& path);

/// Writes the "n=<count>" header then one "i\tj" line per edge with i < j.
void write_graph(const Graph& g, const std::filesystem::path& path);

/// Numeric CSV, one row per vertex. A first line with any non-numeric cell
/// is taken as a header.
FeatureMatrix parse_features(std::istream& in);
FeatureMatrix read_features(const std::filesystem::path& path);
void write_features(const FeatureMatrix& f, const std::filesystem::path& path);

/// "vertex,label" CSV with header.
std::vector<int> read_partition(const std::filesystem::path& path);
void write_partition(const Partition& z, const std::filesystem::path& path);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

struct ResultPaths {
  std::filesystem::path partition;
  std::filesystem::path tau;
  std::filesystem::path params;
  std::filesystem::path summary;
};

/// Writes partition.csv, tau.csv, params.json and summary.txt into dir,
/// creating it if needed.
ResultPaths write_result(const FitResult& fit, const std::filesystem::path& dir);

struct ParamsFile {
  ModelParams params;
  std::vector<double> j_trace;
  double icl = 0.0;  // NaN when the file stores null
  FitMode mode = FitMode::joint;
  bool converged = false;
  int iterations = 0;
};

ParamsFile read_params(const std::filesystem::path& path);

/// Plain numeric CSV without header (tau.csv).
Matrix read_matrix_csv(const std::filesystem::path& path);

}  // namespace cohsmix
