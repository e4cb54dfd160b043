#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "fibrestab/exactalg.hpp"

namespace fibrestab::exactalg {

/// Column-major sparse integer matrix with machine-word entries. Boundary
/// operators live in this form; columns are kept sorted by row.
class SparseIntegerMatrix {
 public:
  using Entry = std::pair<std::size_t, std::int64_t>;

  SparseIntegerMatrix() = default;
  SparseIntegerMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), columns_(cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return columns_.size(); }
  std::size_t nonzeros() const;

  /// Replaces column j; entries are sorted and zeros dropped.
  void set_column(std::size_t j, std::vector<Entry> entries);
  const std::vector<Entry>& column(std::size_t j) const { return columns_[j]; }

  IntegerMatrix to_dense() const;
  static SparseIntegerMatrix from_dense(const IntegerMatrix& a);

 private:
  std::size_t rows_ = 0;
  std::vector<std::vector<Entry>> columns_;
};

/// Rank and non-unit invariant factors of a sparse integer matrix.
struct SmithSummary {
  std::size_t rank = 0;
  /// Invariant factors greater than one, in divisibility order.
  std::vector<Integer> torsion;
};

/// Eliminates unit pivots in machine arithmetic and finishes the small residual
/// block with the dense arbitrary-precision Smith form. Falls back to the dense
/// algorithm on the whole matrix if an intermediate entry would overflow.
SmithSummary sparse_smith_summary(const SparseIntegerMatrix& a);

/// Rank over Z/p of a sparse matrix; p must be prime.
std::size_t sparse_rank_mod_p(const SparseIntegerMatrix& a, std::uint64_t p);

}  // namespace fibrestab::exactalg
