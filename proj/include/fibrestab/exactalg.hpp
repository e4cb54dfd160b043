#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace fibrestab::exactalg {

using Integer = mpz_class;
using Rational = mpq_class;

/// Dense row-major matrix of arbitrary-precision integers.
class IntegerMatrix {
 public:
  IntegerMatrix() = default;
  IntegerMatrix(std::size_t rows, std::size_t cols);
  /// Throws DimensionMismatch unless entries.size() == rows * cols.
  IntegerMatrix(std::size_t rows, std::size_t cols, std::vector<Integer> entries);

  static IntegerMatrix identity(std::size_t n);
  /// Builds a matrix from nested rows; all rows must have equal length.
  static IntegerMatrix from_rows(const std::vector<std::vector<long>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<Integer>& entries() const { return entries_; }

  Integer& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const Integer& operator()(std::size_t i, std::size_t j) const {
    return entries_[i * cols_ + j];
  }

  bool is_zero() const;
  IntegerMatrix transposed() const;

  friend IntegerMatrix operator*(const IntegerMatrix& a, const IntegerMatrix& b);
  friend bool operator==(const IntegerMatrix& a, const IntegerMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> entries_;
};

/// Fraction-free (Bareiss) determinant of a square matrix.
Integer determinant(const IntegerMatrix& a);

/// Smith normal form with unimodular witnesses: left * A * right is the
/// diagonal matrix whose leading entries are `invariant_factors`.
struct SmithDecomposition {
  /// Nonzero invariant factors, positive, each dividing the next.
  std::vector<Integer> invariant_factors;
  std::size_t rank = 0;
  IntegerMatrix left;
  IntegerMatrix right;

  /// The rows x cols diagonal matrix carrying the invariant factors.
  IntegerMatrix diagonal(std::size_t rows, std::size_t cols) const;
};

/// Pivots on the smallest nonzero absolute value of the active block, ties
/// broken by lowest (row, col); output is a deterministic function of `a`.
SmithDecomposition smith_normal_form(const IntegerMatrix& a);

/// The invariant factors alone (same values as smith_normal_form).
std::vector<Integer> invariant_factors(const IntegerMatrix& a);

bool is_prime(std::uint64_t n);

/// Rank of `a` over Q (p == 0) or over Z/p. Throws CompositeModulus when p is
/// neither 0 nor prime.
std::size_t rank_over_field(const IntegerMatrix& a, std::uint64_t p);

/// Coefficient ring for homology: Z, Q, or Z/p.
class Coefficients {
 public:
  enum class Kind { kIntegers, kRationals, kPrime };

  static Coefficients integers() { return Coefficients(Kind::kIntegers, 0); }
  static Coefficients rationals() { return Coefficients(Kind::kRationals, 0); }
  /// Throws CompositeModulus unless p is prime.
  static Coefficients modulo(std::uint64_t p);
  /// Accepts "Z", "Q", "Z/p" (also "Zp" and "GF(p)").
  static Coefficients parse(const std::string& text);

  Kind kind() const { return kind_; }
  /// 0 for Z and Q.
  std::uint64_t characteristic() const { return p_; }
  bool is_field() const { return kind_ != Kind::kIntegers; }
  std::string to_string() const;

  friend bool operator==(const Coefficients& a, const Coefficients& b) {
    return a.kind_ == b.kind_ && a.p_ == b.p_;
  }

 private:
  Coefficients(Kind kind, std::uint64_t p) : kind_(kind), p_(p) {}
  Kind kind_;
  std::uint64_t p_;
};

/// Finitely generated abelian group in invariant-factor form:
/// Z^free_rank + Z/t_1 + ... + Z/t_k with 2 <= t_1 | t_2 | ... | t_k.
class AbelianGroup {
 public:
  AbelianGroup() = default;

  static AbelianGroup zero() { return {}; }
  static AbelianGroup free(std::size_t rank);
  static AbelianGroup cyclic(const Integer& order);
  /// Canonicalizes an arbitrary list of cyclic orders. Orders equal to 1 are
  /// dropped; an order of 0 contributes a free summand.
  static AbelianGroup from_cyclic_orders(std::size_t free_rank,
                                         std::vector<Integer> orders);

  std::size_t free_rank() const { return free_rank_; }
  const std::vector<Integer>& torsion() const { return torsion_; }
  bool is_zero() const { return free_rank_ == 0 && torsion_.empty(); }
  bool is_free() const { return torsion_.empty(); }

  /// Direct sum.
  friend AbelianGroup operator+(const AbelianGroup& a, const AbelianGroup& b);
  friend bool operator==(const AbelianGroup& a, const AbelianGroup& b) {
    return a.free_rank_ == b.free_rank_ && a.torsion_ == b.torsion_;
  }
  friend bool operator!=(const AbelianGroup& a, const AbelianGroup& b) { return !(a == b); }

  /// Human-readable form such as "0", "Z", "Z^2 + Z/2".
  std::string to_string() const;

 private:
  std::size_t free_rank_ = 0;
  std::vector<Integer> torsion_;
};

AbelianGroup tensor_product(const AbelianGroup& a, const AbelianGroup& b);

/// Tor(A, B): one Z/gcd(a, b) per pair of torsion coefficients; free parts
/// contribute nothing.
AbelianGroup tor_product(const AbelianGroup& a, const AbelianGroup& b);

}  // namespace fibrestab::exactalg
