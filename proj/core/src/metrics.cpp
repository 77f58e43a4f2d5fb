#include "cohsmix/metrics.hpp"

#include <algorithm>
#include <map>

namespace cohsmix {

namespace {

std::vector<std::size_t> dense_codes(const std::vector<int>& labels, std::size_t& distinct) {
  std::vector<int> sorted = labels;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  distinct = sorted.size();
  std::vector<std::size_t> codes(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    codes[i] = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), labels[i]) - sorted.begin());
  }
  return codes;
}

double choose2(std::int64_t k) { return 0.5 * static_cast<double>(k) * static_cast<double>(k - 1); }

}  // namespace

ContingencyTable::ContingencyTable(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw DimensionError("partitions have different lengths");
  std::size_t ka = 0;
  std::size_t kb = 0;
  const auto ca = dense_codes(a, ka);
  const auto cb = dense_codes(b, kb);
  counts_.assign(ka * kb, 0);
  row_totals_.assign(ka, 0);
  col_totals_.assign(kb, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++counts_[ca[i] * kb + cb[i]];
    ++row_totals_[ca[i]];
    ++col_totals_[cb[i]];
  }
  total_ = static_cast<std::int64_t>(a.size());
}

bool same_up_to_relabeling(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> forward;
  std::map<int, int> backward;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [f, fnew] = forward.emplace(a[i], b[i]);
    auto [r, rnew] = backward.emplace(b[i], a[i]);
    if (f->second != b[i] || r->second != a[i]) return false;
  }
  return true;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw DimensionError("partitions have different lengths");
  if (a.size() < 2) throw InvalidArgument("adjusted Rand index needs at least two items");
  const ContingencyTable table(a, b);

  double index = 0.0;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c) index += choose2(table.count(r, c));
  }
  double sum_a = 0.0;
  for (auto t : table.row_totals()) sum_a += choose2(t);
  double sum_b = 0.0;
  for (auto t : table.col_totals()) sum_b += choose2(t);

  const double expected = sum_a * sum_b / choose2(table.total());
  const double max_index = 0.5 * (sum_a + sum_b);
  const double denom = max_index - expected;
  if (denom == 0.0) return same_up_to_relabeling(a, b) ? 1.0 : 0.0;
  return (index - expected) / denom;
}

double adjusted_rand_index(const Partition& a, const Partition& b) {
  return adjusted_rand_index(a.labels, b.labels);
}

}  // namespace cohsmix
