#include "fibrestab/exactalg.hpp"

#include <algorithm>
#include <charconv>
#include <optional>
#include <sstream>

#include "fibrestab/errors.hpp"

namespace fibrestab::exactalg {

IntegerMatrix::IntegerMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {}

IntegerMatrix::IntegerMatrix(std::size_t rows, std::size_t cols, std::vector<Integer> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw DimensionMismatch("IntegerMatrix: " + std::to_string(entries_.size()) +
                            " entries for a " + std::to_string(rows_) + "x" +
                            std::to_string(cols_) + " matrix");
  }
}

IntegerMatrix IntegerMatrix::identity(std::size_t n) {
  IntegerMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntegerMatrix IntegerMatrix::from_rows(const std::vector<std::vector<long>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  IntegerMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) throw DimensionMismatch("IntegerMatrix::from_rows: ragged rows");
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

bool IntegerMatrix::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const Integer& x) { return sgn(x) == 0; });
}

IntegerMatrix IntegerMatrix::transposed() const {
  IntegerMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

IntegerMatrix operator*(const IntegerMatrix& a, const IntegerMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("IntegerMatrix product: inner dimensions differ");
  IntegerMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Integer& aik = a(i, k);
      if (sgn(aik) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Integer determinant(const IntegerMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("determinant of a non-square matrix");
  const std::size_t n = a.rows();
  if (n == 0) return 1;
  IntegerMatrix m = a;
  Integer sign = 1;
  Integer prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (sgn(m(k, k)) == 0) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && sgn(m(swap_row, k)) == 0) ++swap_row;
      if (swap_row == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(swap_row, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer v = m(i, j) * m(k, k) - m(i, k) * m(k, j);
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        m(i, j) = v;
      }
      m(i, k) = 0;
    }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

IntegerMatrix SmithDecomposition::diagonal(std::size_t rows, std::size_t cols) const {
  IntegerMatrix d(rows, cols);
  for (std::size_t i = 0; i < invariant_factors.size(); ++i) d(i, i) = invariant_factors[i];
  return d;
}

namespace {

// Working state of the Smith reduction. Row operations are mirrored on
// `left`, column operations on `right`, when witnesses are requested.
class SmithReducer {
 public:
  SmithReducer(const IntegerMatrix& a, bool track)
      : m_(a.rows()), n_(a.cols()), a_(a), track_(track) {
    if (track_) {
      left_ = IntegerMatrix::identity(m_);
      right_ = IntegerMatrix::identity(n_);
    }
  }

  void run() {
    std::size_t t = 0;
    while (t < std::min(m_, n_)) {
      std::optional<std::pair<std::size_t, std::size_t>> pivot = smallest_entry(t);
      if (!pivot) break;
      swap_rows(t, pivot->first);
      swap_cols(t, pivot->second);
      if (!clear_cross(t)) continue;
      if (auto bad = first_non_multiple(t)) {
        add_row(t, *bad, 1);
        continue;
      }
      if (sgn(a_(t, t)) < 0) negate_row(t);
      factors_.push_back(a_(t, t));
      ++t;
    }
  }

  std::vector<Integer>& factors() { return factors_; }
  IntegerMatrix& left() { return left_; }
  IntegerMatrix& right() { return right_; }

 private:
  std::optional<std::pair<std::size_t, std::size_t>> smallest_entry(std::size_t t) const {
    std::optional<std::pair<std::size_t, std::size_t>> best;
    for (std::size_t i = t; i < m_; ++i) {
      for (std::size_t j = t; j < n_; ++j) {
        const Integer& x = a_(i, j);
        if (sgn(x) == 0) continue;
        if (!best || mpz_cmpabs(x.get_mpz_t(), a_(best->first, best->second).get_mpz_t()) < 0) best = {i, j};
      }
    }
    return best;
  }

  // Reduces row t and column t modulo the pivot. Returns true when both are
  // clear apart from the pivot itself.
  bool clear_cross(std::size_t t) {
    bool clean = true;
    Integer q;
    for (std::size_t i = t + 1; i < m_; ++i) {
      if (sgn(a_(i, t)) == 0) continue;
      mpz_tdiv_q(q.get_mpz_t(), a_(i, t).get_mpz_t(), a_(t, t).get_mpz_t());
      add_row(i, t, -q);
      if (sgn(a_(i, t)) != 0) clean = false;
    }
    for (std::size_t j = t + 1; j < n_; ++j) {
      if (sgn(a_(t, j)) == 0) continue;
      mpz_tdiv_q(q.get_mpz_t(), a_(t, j).get_mpz_t(), a_(t, t).get_mpz_t());
      add_col(j, t, -q);
      if (sgn(a_(t, j)) != 0) clean = false;
    }
    return clean;
  }

  std::optional<std::size_t> first_non_multiple(std::size_t t) const {
    for (std::size_t i = t + 1; i < m_; ++i)
      for (std::size_t j = t + 1; j < n_; ++j)
        if (!mpz_divisible_p(a_(i, j).get_mpz_t(), a_(t, t).get_mpz_t())) return i;
    return std::nullopt;
  }

  void swap_rows(std::size_t i, std::size_t k) {
    if (i == k) return;
    for (std::size_t j = 0; j < n_; ++j) std::swap(a_(i, j), a_(k, j));
    if (track_)
      for (std::size_t j = 0; j < m_; ++j) std::swap(left_(i, j), left_(k, j));
  }

  void swap_cols(std::size_t j, std::size_t l) {
    if (j == l) return;
    for (std::size_t i = 0; i < m_; ++i) std::swap(a_(i, j), a_(i, l));
    if (track_)
      for (std::size_t i = 0; i < n_; ++i) std::swap(right_(i, j), right_(i, l));
  }

  // row dst += q * row src
  void add_row(std::size_t dst, std::size_t src, const Integer& q) {
    for (std::size_t j = 0; j < n_; ++j)
      if (sgn(a_(src, j)) != 0) a_(dst, j) += q * a_(src, j);
    if (track_)
      for (std::size_t j = 0; j < m_; ++j)
        if (sgn(left_(src, j)) != 0) left_(dst, j) += q * left_(src, j);
  }

  // col dst += q * col src
  void add_col(std::size_t dst, std::size_t src, const Integer& q) {
    for (std::size_t i = 0; i < m_; ++i)
      if (sgn(a_(i, src)) != 0) a_(i, dst) += q * a_(i, src);
    if (track_)
      for (std::size_t i = 0; i < n_; ++i)
        if (sgn(right_(i, src)) != 0) right_(i, dst) += q * right_(i, src);
  }

  void negate_row(std::size_t i) {
    for (std::size_t j = 0; j < n_; ++j) a_(i, j) = -a_(i, j);
    if (track_)
      for (std::size_t j = 0; j < m_; ++j) left_(i, j) = -left_(i, j);
  }

  std::size_t m_;
  std::size_t n_;
  IntegerMatrix a_;
  bool track_;
  IntegerMatrix left_;
  IntegerMatrix right_;
  std::vector<Integer> factors_;
};

__extension__ using u128 = unsigned __int128;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (e > 0) {
    if (e & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    e >>= 1;
  }
  return result;
}

std::uint64_t reduce_mod(const Integer& x, std::uint64_t p) {
  Integer r;
  mpz_fdiv_r_ui(r.get_mpz_t(), x.get_mpz_t(), p);
  return r.get_ui();
}

std::size_t rank_mod_p_dense(const IntegerMatrix& a, std::uint64_t p) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  std::vector<std::uint64_t> w(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) w[i * n + j] = reduce_mod(a(i, j), p);
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < m; ++col) {
    std::size_t piv = rank;
    while (piv < m && w[piv * n + col] == 0) ++piv;
    if (piv == m) continue;
    for (std::size_t j = 0; j < n; ++j) std::swap(w[rank * n + j], w[piv * n + j]);
    const std::uint64_t inv = pow_mod(w[rank * n + col], p - 2, p);
    for (std::size_t i = rank + 1; i < m; ++i) {
      const std::uint64_t f = mul_mod(w[i * n + col], inv, p);
      if (f == 0) continue;
      for (std::size_t j = col; j < n; ++j) {
        const std::uint64_t sub = mul_mod(f, w[rank * n + j], p);
        w[i * n + j] = (w[i * n + j] + p - sub) % p;
      }
    }
    ++rank;
  }
  return rank;
}

std::size_t rank_rational_dense(const IntegerMatrix& a) {
  // Fraction-free elimination keeps every entry integral.
  IntegerMatrix w = a;
  const std::size_t m = w.rows();
  const std::size_t n = w.cols();
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < m; ++col) {
    std::size_t piv = rank;
    while (piv < m && sgn(w(piv, col)) == 0) ++piv;
    if (piv == m) continue;
    for (std::size_t j = 0; j < n; ++j) std::swap(w(rank, j), w(piv, j));
    for (std::size_t i = rank + 1; i < m; ++i) {
      if (sgn(w(i, col)) == 0) continue;
      Integer g = gcd(w(i, col), w(rank, col));
      Integer fi = w(rank, col) / g;
      Integer fr = w(i, col) / g;
      for (std::size_t j = col; j < n; ++j) w(i, j) = fi * w(i, j) - fr * w(rank, j);
    }
    ++rank;
  }
  return rank;
}

}  // namespace

SmithDecomposition smith_normal_form(const IntegerMatrix& a) {
  SmithReducer reducer(a, /*track=*/true);
  reducer.run();
  SmithDecomposition result;
  result.invariant_factors = std::move(reducer.factors());
  result.rank = result.invariant_factors.size();
  result.left = std::move(reducer.left());
  result.right = std::move(reducer.right());
  return result;
}

std::vector<Integer> invariant_factors(const IntegerMatrix& a) {
  SmithReducer reducer(a, /*track=*/false);
  reducer.run();
  return std::move(reducer.factors());
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t small : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
    if (n % small == 0) return n == small;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // These witnesses are sufficient for every 64-bit input.
  for (std::uint64_t witness : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
    std::uint64_t x = pow_mod(witness, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::size_t rank_over_field(const IntegerMatrix& a, std::uint64_t p) {
  if (p == 0) return rank_rational_dense(a);
  if (!is_prime(p)) throw CompositeModulus("rank_over_field: " + std::to_string(p) + " is not prime");
  return rank_mod_p_dense(a, p);
}

Coefficients Coefficients::modulo(std::uint64_t p) {
  if (!is_prime(p)) throw CompositeModulus("Z/" + std::to_string(p) + " is not a field");
  return Coefficients(Kind::kPrime, p);
}

Coefficients Coefficients::parse(const std::string& text) {
  if (text == "Z") return integers();
  if (text == "Q") return rationals();
  std::string digits;
  if (text.rfind("Z/", 0) == 0) {
    digits = text.substr(2);
  } else if (text.rfind("GF(", 0) == 0 && text.back() == ')') {
    digits = text.substr(3, text.size() - 4);
  } else if (text.size() > 1 && text[0] == 'Z') {
    digits = text.substr(1);
  } else {
    throw ParseError("unknown coefficient ring '" + text + "'");
  }
  std::uint64_t p = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), p);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) {
    throw ParseError("unknown coefficient ring '" + text + "'");
  }
  return modulo(p);
}

std::string Coefficients::to_string() const {
  switch (kind_) {
    case Kind::kIntegers:
      return "Z";
    case Kind::kRationals:
      return "Q";
    case Kind::kPrime:
      return "Z/" + std::to_string(p_);
  }
  return "?";
}

AbelianGroup AbelianGroup::free(std::size_t rank) {
  AbelianGroup g;
  g.free_rank_ = rank;
  return g;
}

AbelianGroup AbelianGroup::cyclic(const Integer& order) { return from_cyclic_orders(0, {order}); }

AbelianGroup AbelianGroup::from_cyclic_orders(std::size_t free_rank, std::vector<Integer> orders) {
  AbelianGroup g;
  g.free_rank_ = free_rank;
  std::vector<Integer> finite;
  for (Integer& o : orders) {
    o = abs(o);
    if (sgn(o) == 0) {
      ++g.free_rank_;
    } else if (o != 1) {
      finite.push_back(std::move(o));
    }
  }
  // Pairwise (gcd, lcm) replacement leaves a divisibility chain.
  for (std::size_t i = 0; i < finite.size(); ++i) {
    for (std::size_t j = i + 1; j < finite.size(); ++j) {
      Integer g_ij = gcd(finite[i], finite[j]);
      Integer l_ij = lcm(finite[i], finite[j]);
      finite[i] = std::move(g_ij);
      finite[j] = std::move(l_ij);
    }
  }
  for (Integer& o : finite)
    if (o != 1) g.torsion_.push_back(std::move(o));
  return g;
}

AbelianGroup operator+(const AbelianGroup& a, const AbelianGroup& b) {
  std::vector<Integer> orders = a.torsion_;
  orders.insert(orders.end(), b.torsion_.begin(), b.torsion_.end());
  return AbelianGroup::from_cyclic_orders(a.free_rank_ + b.free_rank_, std::move(orders));
}

std::string AbelianGroup::to_string() const {
  if (is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  if (free_rank_ > 0) {
    out << "Z";
    if (free_rank_ > 1) out << "^" << free_rank_;
    first = false;
  }
  for (const Integer& t : torsion_) {
    if (!first) out << " + ";
    out << "Z/" << t.get_str();
    first = false;
  }
  return out.str();
}

AbelianGroup tensor_product(const AbelianGroup& a, const AbelianGroup& b) {
  std::vector<Integer> orders;
  for (std::size_t k = 0; k < b.free_rank(); ++k)
    orders.insert(orders.end(), a.torsion().begin(), a.torsion().end());
  for (std::size_t k = 0; k < a.free_rank(); ++k)
    orders.insert(orders.end(), b.torsion().begin(), b.torsion().end());
  for (const Integer& x : a.torsion())
    for (const Integer& y : b.torsion()) orders.push_back(gcd(x, y));
  return AbelianGroup::from_cyclic_orders(a.free_rank() * b.free_rank(), std::move(orders));
}

AbelianGroup tor_product(const AbelianGroup& a, const AbelianGroup& b) {
  std::vector<Integer> orders;
  for (const Integer& x : a.torsion())
    for (const Integer& y : b.torsion()) orders.push_back(gcd(x, y));
  return AbelianGroup::from_cyclic_orders(0, std::move(orders));
}

}  // namespace fibrestab::exactalg
