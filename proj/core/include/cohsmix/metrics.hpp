#pragma once

#include <cstdint>
#include <vector>

#include "cohsmix/types.hpp"

namespace cohsmix {

/// Co-assignment counts between two partitions of the same items. Labels may
/// be arbitrary integers; rows and columns follow the sorted distinct labels.
class ContingencyTable {
 public:
  ContingencyTable(const std::vector<int>& a, const std::vector<int>& b);

  std::size_t rows() const { return row_totals_.size(); }
  std::size_t cols() const { return col_totals_.size(); }
  std::int64_t count(std::size_t r, std::size_t c) const { return counts_[r * cols() + c]; }
  const std::vector<std::int64_t>& row_totals() const { return row_totals_; }
  const std::vector<std::int64_t>& col_totals() const { return col_totals_; }
  std::int64_t total() const { return total_; }

 private:
  std::vector<std::int64_t> counts_;
  std::vector<std::int64_t> row_totals_;
  std::vector<std::int64_t> col_totals_;
  std::int64_t total_ = 0;
};

/// Hubert-Arabie adjusted Rand index. When the expected-index denominator
/// vanishes the result is 1 for partitions equal up to relabeling and 0
/// otherwise. Throws DimensionError on length mismatch and InvalidArgument
/// for fewer than two items.
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);
double adjusted_rand_index(const Partition& a, const Partition& b);

/// True when a and b induce the same grouping (labels may differ).
bool same_up_to_relabeling(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace cohsmix
