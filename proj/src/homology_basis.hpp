#pragma once

// Chain-level homology bases over a field. Shared by induced maps and the
// exact-sequence verifiers; not part of the installed interface.

#include <stdexcept>
#include <utility>
#include <vector>

#include "fibrestab/errors.hpp"
#include "fibrestab/field_linalg.hpp"
#include "fibrestab/homology.hpp"

namespace fibrestab::homology::detail {

using linalg::EchelonBasis;
using linalg::Vec;

/// Calls fn with the field policy matching `c`.
template <typename Fn>
decltype(auto) with_field(const Coefficients& c, Fn&& fn) {
  switch (c.kind()) {
    case Coefficients::Kind::kRationals:
      return fn(linalg::RationalField{});
    case Coefficients::Kind::kPrime:
      return fn(linalg::PrimeField{c.characteristic()});
    case Coefficients::Kind::kIntegers:
      break;
  }
  throw std::invalid_argument("field coefficients (Q or Z/p) are required, got " + c.to_string());
}

template <typename F>
Vec<F> apply_boundary(const F& f, const ChainComplex& c, int k, const Vec<F>& v) {
  if (k <= 0 || k > c.top_degree()) return Vec<F>(k - 1 >= 0 ? c.rank(k - 1) : 0, f.zero());
  const auto& d = c.boundary[static_cast<std::size_t>(k)];
  Vec<F> out(d.rows(), f.zero());
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (f.is_zero(v[j])) continue;
    for (const auto& [i, x] : d.column(j)) out[i] = f.add(out[i], f.mul(f.from_int(x), v[j]));
  }
  return out;
}

/// Pushes a degree-k chain along the map that sends a generator to the equally
/// named generator of `to`, or to zero when `to` lacks it. Covers inclusions,
/// projections onto quotients, and restrictions to subcomplexes.
template <typename F>
Vec<F> transfer(const F& f, const ChainComplex& from, const ChainComplex& to, int k, const Vec<F>& v) {
  Vec<F> out(to.rank(k), f.zero());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (f.is_zero(v[i])) continue;
    const std::ptrdiff_t j = to.index_of(from.cells[static_cast<std::size_t>(k)][i]);
    if (j >= 0) out[static_cast<std::size_t>(j)] = f.add(out[static_cast<std::size_t>(j)], v[i]);
  }
  return out;
}

/// Basis of H_k of a chain complex. Representatives are cycles reduced modulo
/// the boundary echelon and kept in fully reduced echelon form, so the class
/// of any cycle is read off at the representatives' pivots.
template <typename F>
class DegreeBasis {
 public:
  DegreeBasis(const F& f, const ChainComplex& c, int k)
      : f_(f), chain_dim_(c.rank(k)), boundaries_(f, chain_dim_), reps_(f, chain_dim_) {
    if (chain_dim_ == 0) return;
    std::vector<Vec<F>> cycles;
    if (k == 0) {
      for (std::size_t i = 0; i < chain_dim_; ++i) {
        Vec<F> e(chain_dim_, f.zero());
        e[i] = f.one();
        cycles.push_back(std::move(e));
      }
    } else {
      cycles = linalg::kernel_basis(f, linalg::from_sparse(f, c.boundary[static_cast<std::size_t>(k)]));
    }
    if (k + 1 <= c.top_degree()) {
      const auto& up = c.boundary[static_cast<std::size_t>(k) + 1];
      for (std::size_t j = 0; j < up.cols(); ++j) {
        Vec<F> col(chain_dim_, f.zero());
        for (const auto& [i, x] : up.column(j)) col[i] = f.from_int(x);
        boundaries_.insert(std::move(col));
      }
    }
    for (Vec<F>& z : cycles) {
      boundaries_.reduce(z);
      reps_.insert(std::move(z));
    }
  }

  std::size_t dimension() const { return reps_.size(); }
  std::size_t chain_dimension() const { return chain_dim_; }
  const std::vector<Vec<F>>& representatives() const { return reps_.vectors(); }

  /// Coordinates of the class of a cycle.
  Vec<F> coordinates(Vec<F> cycle) const {
    boundaries_.reduce(cycle);
    Vec<F> out(reps_.size(), f_.zero());
    for (std::size_t i = 0; i < reps_.size(); ++i) out[i] = cycle[reps_.pivots()[i]];
    return out;
  }

 private:
  F f_;
  std::size_t chain_dim_;
  EchelonBasis<F> boundaries_;
  EchelonBasis<F> reps_;
};

template <typename F>
FieldMatrix to_field_matrix(const F& f, const std::vector<Vec<F>>& columns, std::size_t rows) {
  FieldMatrix m(rows, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j)
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = f.to_rational(columns[j][i]);
  return m;
}

template <typename F>
linalg::Matrix<F> from_field_matrix(const F& f, const FieldMatrix& m) {
  linalg::Matrix<F> out(f, m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) out(i, j) = f.from_rational(m(i, j));
  return out;
}

}  // namespace fibrestab::homology::detail
