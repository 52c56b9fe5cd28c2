#include "vip/sparse.hpp"

#include <algorithm>
#include <string>

#include "vip/error.hpp"

namespace vip {

SparseBinary::SparseBinary(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

SparseBinary SparseBinary::from_pairs(std::size_t rows, std::size_t cols,
                                      std::vector<std::pair<Index, Index>> entries) {
  for (const auto& [r, c] : entries) {
    if (r >= rows || c >= cols) {
      throw Error("sparse entry (" + std::to_string(r) + ", " + std::to_string(c) +
                  ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
    }
  }
  std::sort(entries.begin(), entries.end());
  entries.erase(std::unique(entries.begin(), entries.end()), entries.end());

  SparseBinary m(rows, cols);
  m.col_idx_.reserve(entries.size());
  for (const auto& [r, c] : entries) {
    ++m.row_ptr_[r + 1];
    m.col_idx_.push_back(c);
  }
  for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

bool SparseBinary::contains(std::size_t r, std::size_t c) const {
  if (r >= rows_) return false;
  const auto cols = row(r);
  return std::binary_search(cols.begin(), cols.end(), static_cast<Index>(c));
}

SparseBinary SparseBinary::transpose() const {
  std::vector<std::pair<Index, Index>> flipped;
  flipped.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (const Index c : row(r)) flipped.emplace_back(c, static_cast<Index>(r));
  }
  return from_pairs(cols_, rows_, std::move(flipped));
}

std::vector<std::pair<Index, Index>> SparseBinary::entries() const {
  std::vector<std::pair<Index, Index>> out;
  out.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (const Index c : row(r)) out.emplace_back(static_cast<Index>(r), c);
  }
  return out;
}

}  // namespace vip
