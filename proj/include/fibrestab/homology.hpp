#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fibrestab/complexes.hpp"
#include "fibrestab/exactalg.hpp"
#include "fibrestab/sparse_matrix.hpp"

namespace fibrestab::homology {

using complexes::Simplex;
using complexes::SimplicialComplex;
using complexes::SimplicialPair;
using exactalg::AbelianGroup;
using exactalg::Coefficients;
using exactalg::Rational;

/// A based chain complex whose generators are simplices. For a pair (X, A)
/// the generators are the simplices of X outside A.
struct ChainComplex {
  /// cells[k] lists the degree-k generators in lexicographic order.
  std::vector<std::vector<Simplex>> cells;
  /// boundary[k] maps C_k to C_{k-1}; boundary[0] has zero rows.
  std::vector<exactalg::SparseIntegerMatrix> boundary;

  int top_degree() const { return static_cast<int>(cells.size()) - 1; }
  std::size_t rank(int k) const;
  /// Index of a generator in cells[dim s], if present.
  std::ptrdiff_t index_of(const Simplex& s) const;
};

ChainComplex simplicial_chains(const SimplicialComplex& x);
/// Quotient C(total) / C(sub).
ChainComplex relative_chains(const SimplicialPair& pair);

/// H_0 .. H_dim of a complex; groups above the top degree are zero.
struct HomologyProfile {
  Coefficients ring = Coefficients::integers();
  std::vector<AbelianGroup> groups;

  /// Zero for degrees outside the stored range.
  AbelianGroup group(int k) const;
  std::vector<std::size_t> betti_numbers() const;

  friend bool operator==(const HomologyProfile& a, const HomologyProfile& b) {
    return a.ring == b.ring && a.groups == b.groups;
  }
  std::string to_string() const;
};

HomologyProfile homology(const ChainComplex& c, const Coefficients& ring);
HomologyProfile homology(const SimplicialComplex& x,
                         const Coefficients& ring = Coefficients::integers());
/// Reduced homology: degree 0 loses one free summand when x is nonempty.
HomologyProfile reduced_homology(const SimplicialComplex& x,
                                 const Coefficients& ring = Coefficients::integers());
/// Throws NotASubcomplex when sub is not contained in total.
HomologyProfile relative_homology(const SimplicialPair& pair,
                                  const Coefficients& ring = Coefficients::integers());
/// H_k(X, X - v) computed as the relative homology of (star, deleted star).
HomologyProfile local_homology(const SimplicialComplex& x, complexes::Vertex v,
                               const Coefficients& ring = Coefficients::integers());

/// Computes single homology groups on demand, caching boundary ranks. Useful
/// when only a few degrees of a large complex matter.
class HomologyCalculator {
 public:
  HomologyCalculator(ChainComplex chains, Coefficients ring);
  explicit HomologyCalculator(const SimplicialComplex& x,
                              Coefficients ring = Coefficients::integers());

  const ChainComplex& chains() const { return chains_; }
  const Coefficients& ring() const { return ring_; }
  int top_degree() const { return chains_.top_degree(); }
  /// H_k; zero outside 0..top_degree.
  AbelianGroup group(int k);
  HomologyProfile profile();

 private:
  struct Rank {
    bool known = false;
    std::size_t rank = 0;
    std::vector<exactalg::Integer> torsion;
  };
  const Rank& boundary_rank(int k);

  ChainComplex chains_;
  Coefficients ring_;
  std::vector<Rank> ranks_;
};

/// Dense matrix over Q or Z/p (entries stored as rationals; over Z/p they are
/// the residues 0..p-1).
struct FieldMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Rational> entries;

  FieldMatrix() = default;
  FieldMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), entries(r * c) {}
  static FieldMatrix identity(std::size_t n);

  Rational& operator()(std::size_t i, std::size_t j) { return entries[i * cols + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }
  FieldMatrix transposed() const;
  friend bool operator==(const FieldMatrix& a, const FieldMatrix& b) {
    return a.rows == b.rows && a.cols == b.cols && a.entries == b.entries;
  }
};

/// Rank over the given field.
std::size_t rank(const FieldMatrix& m, const Coefficients& field);
/// Product over the given field (entries reduced mod p for Z/p).
FieldMatrix multiply(const FieldMatrix& a, const FieldMatrix& b, const Coefficients& field);

/// Map on degree-k homology induced by the inclusion sub -> total, in the
/// canonical echelon bases of both sides.
struct InducedMap {
  int degree = 0;
  Coefficients field = Coefficients::rationals();
  /// dim H_k(total) x dim H_k(sub).
  FieldMatrix matrix;
  /// Chain-level cycle representatives of the basis of H_k(sub), written in
  /// the k-simplices of sub.
  std::vector<std::vector<Rational>> basis_witnesses;
};

/// Throws NotASubcomplex, and CompositeModulus or std::invalid_argument when
/// `field` is not a field.
InducedMap induced_map(const SimplicialPair& pair, int k, const Coefficients& field);

std::size_t connected_components(const SimplicialComplex& x);
bool is_connected(const SimplicialComplex& x);

/// H_1(X; Z), the abelianization of the fundamental group. A nonzero value
/// certifies that X is not simply connected; zero is inconclusive. Throws
/// NotConnected.
AbelianGroup pi1_abelianized(const SimplicialComplex& x);

}  // namespace fibrestab::homology
