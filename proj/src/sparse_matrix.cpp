#include "fibrestab/sparse_matrix.hpp"

#include <algorithm>
#include <functional>
#include <queue>

#include "fibrestab/errors.hpp"

namespace fibrestab::exactalg {

std::size_t SparseIntegerMatrix::nonzeros() const {
  std::size_t total = 0;
  for (const auto& c : columns_) total += c.size();
  return total;
}

void SparseIntegerMatrix::set_column(std::size_t j, std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end());
  std::vector<Entry> merged;
  for (const Entry& e : entries) {
    if (e.first >= rows_) throw DimensionMismatch("SparseIntegerMatrix: row index out of range");
    if (!merged.empty() && merged.back().first == e.first) {
      merged.back().second += e.second;
    } else {
      merged.push_back(e);
    }
  }
  std::erase_if(merged, [](const Entry& e) { return e.second == 0; });
  columns_.at(j) = std::move(merged);
}

IntegerMatrix SparseIntegerMatrix::to_dense() const {
  IntegerMatrix d(rows_, cols());
  for (std::size_t j = 0; j < cols(); ++j)
    for (const auto& [i, v] : columns_[j]) d(i, j) = static_cast<long>(v);
  return d;
}

SparseIntegerMatrix SparseIntegerMatrix::from_dense(const IntegerMatrix& a) {
  SparseIntegerMatrix s(a.rows(), a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    std::vector<Entry> col;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      const Integer& x = a(i, j);
      if (sgn(x) == 0) continue;
      if (!x.fits_slong_p()) throw DimensionMismatch("SparseIntegerMatrix: entry exceeds 64 bits");
      col.emplace_back(i, x.get_si());
    }
    s.columns_[j] = std::move(col);
  }
  return s;
}

namespace {

struct Overflow {};

using Row = std::vector<std::pair<std::size_t, std::int64_t>>;

// Row-oriented elimination state shared by the integer and mod-p reductions.
struct RowSystem {
  std::vector<Row> rows;
  std::vector<std::vector<std::size_t>> column_rows;  // may hold stale row ids
  std::vector<bool> row_alive;
  std::vector<bool> column_done;

  explicit RowSystem(const SparseIntegerMatrix& a)
      : rows(a.rows()), column_rows(a.cols()), row_alive(a.rows(), true), column_done(a.cols(), false) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      for (const auto& [i, v] : a.column(j)) {
        rows[i].emplace_back(j, v);
        column_rows[j].push_back(i);
      }
    }
    for (Row& r : rows) std::sort(r.begin(), r.end());
  }

  const std::int64_t* find(std::size_t r, std::size_t c) const {
    const Row& row = rows[r];
    auto it = std::lower_bound(row.begin(), row.end(), std::make_pair(c, INT64_MIN));
    if (it == row.end() || it->first != c) return nullptr;
    return &it->second;
  }

  // Alive rows with a nonzero in column c, deduplicated.
  std::vector<std::size_t> live_rows(std::size_t c) {
    std::vector<std::size_t>& ids = column_rows[c];
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::vector<std::size_t> live;
    std::vector<std::size_t> keep;
    for (std::size_t r : ids) {
      if (!row_alive[r] || find(r, c) == nullptr) continue;
      live.push_back(r);
      keep.push_back(r);
    }
    ids = std::move(keep);
    return live;
  }

  // target -= factor * source, with `combine` producing the new entry value.
  template <typename Combine>
  void axpy(std::size_t target, std::size_t source, Combine combine) {
    const Row& src = rows[source];
    Row& dst = rows[target];
    Row out;
    out.reserve(dst.size() + src.size());
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < dst.size() || j < src.size()) {
      if (j == src.size() || (i < dst.size() && dst[i].first < src[j].first)) {
        out.push_back(dst[i++]);
      } else if (i == dst.size() || src[j].first < dst[i].first) {
        const std::int64_t v = combine(0, src[j].second);
        if (v != 0) {
          out.emplace_back(src[j].first, v);
          column_rows[src[j].first].push_back(target);
        }
        ++j;
      } else {
        const std::int64_t v = combine(dst[i].second, src[j].second);
        if (v != 0) out.emplace_back(dst[i].first, v);
        ++i;
        ++j;
      }
    }
    dst = std::move(out);
  }
};

SmithSummary summary_from_dense(const IntegerMatrix& a) {
  SmithSummary s;
  for (Integer& f : invariant_factors(a)) {
    ++s.rank;
    if (f != 1) s.torsion.push_back(std::move(f));
  }
  return s;
}

// Columns in increasing order of live entry count, re-keyed lazily: a popped
// column whose count changed since it was queued is pushed back.
class ColumnQueue {
 public:
  explicit ColumnQueue(RowSystem& sys) : sys_(sys) {
    for (std::size_t c = 0; c < sys.column_rows.size(); ++c)
      if (!sys.column_done[c]) heap_.emplace(sys.column_rows[c].size(), c);
  }

  // Next column with its live rows, or false when exhausted.
  bool pop(std::size_t& column, std::vector<std::size_t>& live) {
    while (!heap_.empty()) {
      const auto [count, c] = heap_.top();
      heap_.pop();
      if (sys_.column_done[c]) continue;
      live = sys_.live_rows(c);
      if (live.size() > count) {
        heap_.emplace(live.size(), c);
        continue;
      }
      column = c;
      return true;
    }
    return false;
  }

 private:
  using Key = std::pair<std::size_t, std::size_t>;
  RowSystem& sys_;
  std::priority_queue<Key, std::vector<Key>, std::greater<Key>> heap_;
};

SmithSummary eliminate_units(const SparseIntegerMatrix& a) {
  RowSystem sys(a);
  std::size_t unit_pivots = 0;
  bool progress = true;
  while (progress) {
    progress = false;
    ColumnQueue queue(sys);
    std::size_t c = 0;
    std::vector<std::size_t> live;
    while (queue.pop(c, live)) {
      if (live.empty()) {
        sys.column_done[c] = true;
        continue;
      }
      std::size_t pivot_row = SIZE_MAX;
      for (std::size_t r : live) {
        const std::int64_t v = *sys.find(r, c);
        if (v != 1 && v != -1) continue;
        if (pivot_row == SIZE_MAX || sys.rows[r].size() < sys.rows[pivot_row].size()) pivot_row = r;
      }
      if (pivot_row == SIZE_MAX) continue;
      const std::int64_t pivot = *sys.find(pivot_row, c);
      for (std::size_t r : live) {
        if (r == pivot_row) continue;
        const std::int64_t q = *sys.find(r, c) * pivot;  // pivot is a unit
        sys.axpy(r, pivot_row, [q](std::int64_t x, std::int64_t y) {
          std::int64_t prod = 0;
          std::int64_t out = 0;
          if (__builtin_mul_overflow(q, y, &prod) || __builtin_sub_overflow(x, prod, &out)) throw Overflow{};
          return out;
        });
      }
      sys.row_alive[pivot_row] = false;
      sys.column_done[c] = true;
      ++unit_pivots;
      progress = true;
    }
  }

  // Whatever survives has no unit entries; it is typically tiny.
  std::vector<std::size_t> residual_rows;
  std::vector<std::size_t> residual_cols;
  for (std::size_t r = 0; r < a.rows(); ++r)
    if (sys.row_alive[r] && !sys.rows[r].empty()) residual_rows.push_back(r);
  for (std::size_t c = 0; c < a.cols(); ++c)
    if (!sys.column_done[c]) residual_cols.push_back(c);
  SmithSummary result;
  if (!residual_rows.empty() && !residual_cols.empty()) {
    IntegerMatrix block(residual_rows.size(), residual_cols.size());
    for (std::size_t i = 0; i < residual_rows.size(); ++i) {
      for (const auto& [c, v] : sys.rows[residual_rows[i]]) {
        auto it = std::lower_bound(residual_cols.begin(), residual_cols.end(), c);
        if (it != residual_cols.end() && *it == c) {
          block(i, static_cast<std::size_t>(it - residual_cols.begin())) = static_cast<long>(v);
        }
      }
    }
    result = summary_from_dense(block);
  }
  result.rank += unit_pivots;
  return result;
}

std::int64_t inverse_mod(std::int64_t a, std::int64_t p) {
  // Extended Euclid on non-negative residues.
  std::int64_t t = 0;
  std::int64_t new_t = 1;
  std::int64_t r = p;
  std::int64_t new_r = a;
  while (new_r != 0) {
    const std::int64_t q = r / new_r;
    t = t - q * new_t;
    std::swap(t, new_t);
    r = r - q * new_r;
    std::swap(r, new_r);
  }
  return t < 0 ? t + p : t;
}

}  // namespace

SmithSummary sparse_smith_summary(const SparseIntegerMatrix& a) {
  try {
    return eliminate_units(a);
  } catch (const Overflow&) {
    return summary_from_dense(a.to_dense());
  }
}

std::size_t sparse_rank_mod_p(const SparseIntegerMatrix& a, std::uint64_t p) {
  if (!is_prime(p)) throw CompositeModulus("sparse_rank_mod_p: " + std::to_string(p) + " is not prime");
  if (p >= (std::uint64_t{1} << 31)) return rank_over_field(a.to_dense(), p);
  const auto mod = static_cast<std::int64_t>(p);
  SparseIntegerMatrix reduced(a.rows(), a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    std::vector<SparseIntegerMatrix::Entry> col;
    for (const auto& [i, v] : a.column(j)) {
      const std::int64_t r = ((v % mod) + mod) % mod;
      if (r != 0) col.emplace_back(i, r);
    }
    reduced.set_column(j, std::move(col));
  }
  RowSystem sys(reduced);
  std::size_t rank = 0;
  ColumnQueue queue(sys);
  std::size_t c = 0;
  std::vector<std::size_t> live;
  while (queue.pop(c, live)) {
    sys.column_done[c] = true;
    if (live.empty()) continue;
    std::size_t pivot_row = live.front();
    for (std::size_t r : live)
      if (sys.rows[r].size() < sys.rows[pivot_row].size()) pivot_row = r;
    const std::int64_t inv = inverse_mod(*sys.find(pivot_row, c), mod);
    for (std::size_t r : live) {
      if (r == pivot_row) continue;
      const std::int64_t q = (*sys.find(r, c) * inv) % mod;
      sys.axpy(r, pivot_row, [q, mod](std::int64_t x, std::int64_t y) {
        return ((x - q * y) % mod + mod) % mod;
      });
    }
    sys.row_alive[pivot_row] = false;
    ++rank;
  }
  return rank;
}

}  // namespace fibrestab::exactalg
