#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace vip {

using Index = std::uint32_t;

// Binary sparse matrix in compressed-row form with sorted, unique columns.
class SparseBinary {
 public:
  SparseBinary() = default;
  SparseBinary(std::size_t rows, std::size_t cols);

  // Duplicate entries collapse to one. Throws on out-of-range indices.
  static SparseBinary from_pairs(std::size_t rows, std::size_t cols,
                                 std::vector<std::pair<Index, Index>> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return col_idx_.size(); }

  std::span<const Index> row(std::size_t r) const {
    return {col_idx_.data() + row_ptr_[r], col_idx_.data() + row_ptr_[r + 1]};
  }
  bool contains(std::size_t r, std::size_t c) const;

  SparseBinary transpose() const;
  std::vector<std::pair<Index, Index>> entries() const;

  bool operator==(const SparseBinary&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<Index> col_idx_;
};

}  // namespace vip
