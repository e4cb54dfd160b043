#pragma once

// Dense linear algebra over Q and Z/p, templated on a small field policy.
// Used where chain-level representatives are needed (induced maps, connecting
// homomorphisms, exactness ranks); plain ranks go through sparse_matrix.hpp.

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fibrestab/exactalg.hpp"
#include "fibrestab/sparse_matrix.hpp"

namespace fibrestab::linalg {

struct RationalField {
  using value_type = mpq_class;

  value_type zero() const { return 0; }
  value_type one() const { return 1; }
  bool is_zero(const value_type& x) const { return sgn(x) == 0; }
  value_type from_int(std::int64_t v) const { return mpq_class(static_cast<long>(v)); }
  value_type from_rational(const mpq_class& q) const { return q; }
  mpq_class to_rational(const value_type& x) const { return x; }
  value_type add(const value_type& a, const value_type& b) const { return a + b; }
  value_type sub(const value_type& a, const value_type& b) const { return a - b; }
  value_type mul(const value_type& a, const value_type& b) const { return a * b; }
  value_type neg(const value_type& a) const { return -a; }
  value_type inv(const value_type& a) const { return 1 / a; }
};

struct PrimeField {
  using value_type = std::uint64_t;
  std::uint64_t p;

  value_type zero() const { return 0; }
  value_type one() const { return 1; }
  bool is_zero(value_type x) const { return x == 0; }
  value_type from_int(std::int64_t v) const {
    const auto m = static_cast<std::int64_t>(p);
    return static_cast<value_type>(((v % m) + m) % m);
  }
  value_type from_rational(const mpq_class& q) const {
    mpz_class num;
    mpz_class den;
    mpz_fdiv_r_ui(num.get_mpz_t(), q.get_num_mpz_t(), p);
    mpz_fdiv_r_ui(den.get_mpz_t(), q.get_den_mpz_t(), p);
    if (den == 0) throw std::domain_error("rational value has a denominator divisible by p");
    return mul(num.get_ui(), inv(den.get_ui()));
  }
  mpq_class to_rational(value_type x) const { return mpq_class(static_cast<unsigned long>(x)); }
  value_type add(value_type a, value_type b) const { return (a + b) % p; }
  value_type sub(value_type a, value_type b) const { return (a + p - b) % p; }
  value_type mul(value_type a, value_type b) const {
    __extension__ using u128 = unsigned __int128;
    return static_cast<value_type>(static_cast<u128>(a) * b % p);
  }
  value_type neg(value_type a) const { return a == 0 ? 0 : p - a; }
  value_type inv(value_type a) const {
    value_type result = 1;
    value_type base = a;
    std::uint64_t e = p - 2;
    while (e > 0) {
      if (e & 1) result = mul(result, base);
      base = mul(base, base);
      e >>= 1;
    }
    return result;
  }
};

template <typename F>
using Vec = std::vector<typename F::value_type>;

/// y += a * x
template <typename F>
void axpy(const F& f, Vec<F>& y, const typename F::value_type& a, const Vec<F>& x) {
  if (f.is_zero(a)) return;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (f.is_zero(x[i])) continue;
    y[i] = f.add(y[i], f.mul(a, x[i]));
  }
}

template <typename F>
bool is_zero_vector(const F& f, const Vec<F>& v) {
  for (const auto& x : v)
    if (!f.is_zero(x)) return false;
  return true;
}

template <typename F>
class Matrix {
 public:
  using value_type = typename F::value_type;

  Matrix() = default;
  Matrix(const F& f, std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, f.zero()) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  value_type& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const value_type& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Vec<F> column(std::size_t j) const {
    Vec<F> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  void set_column(std::size_t j, const Vec<F>& c) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<value_type> data_;
};

template <typename F>
Matrix<F> from_sparse(const F& f, const exactalg::SparseIntegerMatrix& a) {
  Matrix<F> m(f, a.rows(), a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (const auto& [i, v] : a.column(j)) m(i, j) = f.from_int(v);
  return m;
}

template <typename F>
Matrix<F> multiply(const F& f, const Matrix<F>& a, const Matrix<F>& b) {
  Matrix<F> c(f, a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (f.is_zero(a(i, k))) continue;
      for (std::size_t j = 0; j < b.cols(); ++j)
        if (!f.is_zero(b(k, j))) c(i, j) = f.add(c(i, j), f.mul(a(i, k), b(k, j)));
    }
  return c;
}

/// Reduces m in place to reduced row echelon form; returns the pivot columns.
template <typename F>
std::vector<std::size_t> rref(const F& f, Matrix<F>& m) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  std::vector<std::size_t> support;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t piv = row;
    while (piv < m.rows() && f.is_zero(m(piv, col))) ++piv;
    if (piv == m.rows()) continue;
    if (piv != row)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(row, j), m(piv, j));
    const auto inv = f.inv(m(row, col));
    support.clear();
    for (std::size_t j = col; j < m.cols(); ++j) {
      if (f.is_zero(m(row, j))) continue;
      m(row, j) = f.mul(m(row, j), inv);
      support.push_back(j);
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == row || f.is_zero(m(i, col))) continue;
      const auto factor = m(i, col);
      for (std::size_t j : support) m(i, j) = f.sub(m(i, j), f.mul(factor, m(row, j)));
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <typename F>
std::size_t rank(const F& f, Matrix<F> m) {
  return rref(f, m).size();
}

/// Basis of the null space, one vector per free column, in column order.
template <typename F>
std::vector<Vec<F>> kernel_basis(const F& f, Matrix<F> m) {
  const std::vector<std::size_t> pivots = rref(f, m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (std::size_t c : pivots) is_pivot[c] = true;
  std::vector<Vec<F>> basis;
  for (std::size_t free_col = 0; free_col < m.cols(); ++free_col) {
    if (is_pivot[free_col]) continue;
    Vec<F> v(m.cols(), f.zero());
    v[free_col] = f.one();
    for (std::size_t r = 0; r < pivots.size(); ++r)
      if (!f.is_zero(m(r, free_col))) v[pivots[r]] = f.neg(m(r, free_col));
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Fully reduced echelon basis of a subspace. Each stored vector has a pivot
/// (its lowest nonzero index) equal to one and zeros at every other pivot.
template <typename F>
class EchelonBasis {
 public:
  EchelonBasis(const F& f, std::size_t ambient) : f_(f), ambient_(ambient) {}

  std::size_t ambient() const { return ambient_; }
  std::size_t size() const { return vectors_.size(); }
  const std::vector<Vec<F>>& vectors() const { return vectors_; }
  const std::vector<std::size_t>& pivots() const { return pivots_; }

  /// Subtracts the span component; afterwards v vanishes at every pivot.
  void reduce(Vec<F>& v) const {
    for (std::size_t k = 0; k < vectors_.size(); ++k) {
      const auto c = v[pivots_[k]];
      if (f_.is_zero(c)) continue;
      axpy(f_, v, f_.neg(c), vectors_[k]);
    }
  }

  /// Adds v to the span; returns false when it was already contained.
  bool insert(Vec<F> v) {
    reduce(v);
    std::size_t pivot = 0;
    while (pivot < v.size() && f_.is_zero(v[pivot])) ++pivot;
    if (pivot == v.size()) return false;
    const auto inv = f_.inv(v[pivot]);
    for (auto& x : v)
      if (!f_.is_zero(x)) x = f_.mul(x, inv);
    for (auto& w : vectors_) {
      const auto c = w[pivot];
      if (!f_.is_zero(c)) axpy(f_, w, f_.neg(c), v);
    }
    vectors_.push_back(std::move(v));
    pivots_.push_back(pivot);
    return true;
  }

 private:
  F f_;
  std::size_t ambient_;
  std::vector<Vec<F>> vectors_;
  std::vector<std::size_t> pivots_;
};

}  // namespace fibrestab::linalg
