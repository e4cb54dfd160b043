#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fibrestab/homology.hpp"

namespace fibrestab::sequences {

using complexes::SimplicialComplex;
using complexes::SimplicialPair;
using exactalg::AbelianGroup;
using exactalg::Coefficients;
using homology::FieldMatrix;

/// One vector space of a sequence and the map to the next one.
struct SequenceNode {
  std::string label;
  std::size_t dimension = 0;
  /// dimension(next) x dimension; absent on the last node.
  std::optional<FieldMatrix> map_out;
};

/// A 0 -> A -> B -> 0 window; exactness there forces A -> B to be bijective.
struct IsomorphismCheck {
  /// Index of the node holding A.
  std::size_t node = 0;
  bool isomorphism = false;
};

struct ExactnessReport {
  Coefficients field = Coefficients::rationals();
  std::vector<std::string> labels;
  std::vector<std::size_t> dimensions;
  /// Rank of the map leaving node i, for every node but the last.
  std::vector<std::size_t> map_ranks;
  /// Indices 1 .. n-2: the nodes exactness is checked at.
  std::vector<std::size_t> interior_nodes;
  std::vector<bool> exact_at;
  /// (rank of incoming image, dimension of outgoing kernel) per interior node.
  std::vector<std::pair<std::size_t, std::size_t>> rank_data;
  /// Whether the composition through the node vanishes.
  std::vector<bool> composition_zero;
  std::vector<IsomorphismCheck> isomorphisms;
  bool verdict = false;
};

/// Exact at an interior node iff the composite through it is zero and
/// rank(incoming) = dim ker(outgoing). Throws DimensionMismatch when the
/// matrices do not chain.
ExactnessReport check_exactness(const std::vector<SequenceNode>& sequence, const Coefficients& field);

/// Assembles H_{hi+1}(X) -> H_hi(A∩B) -> H_hi(A)+H_hi(B) -> H_hi(X) -> ... ->
/// H_lo(X) -> H_{lo-1}(A∩B) (or 0 when lo = 0) and checks it. Throws NotACover
/// unless A and B are subcomplexes of X and every simplex of X lies in A or B.
ExactnessReport mayer_vietoris(const SimplicialComplex& x, const SimplicialComplex& a,
                               const SimplicialComplex& b, const Coefficients& field, int lo, int hi);
/// The cover condition used by mayer_vietoris.
bool is_cover(const SimplicialComplex& x, const SimplicialComplex& a, const SimplicialComplex& b);

/// Assembles H_{hi+1}(X,A) -> H_hi(A) -> H_hi(X) -> H_hi(X,A) -> ... ->
/// H_lo(X,A) -> H_{lo-1}(A) (or 0 when lo = 0) and checks it.
ExactnessReport pair_les_check(const SimplicialPair& pair, const Coefficients& field, int lo, int hi);

struct KunnethReport {
  int degree = 0;
  Coefficients ring = Coefficients::integers();
  /// Sum over i + j = k of H_i(X) (x) H_j(Y).
  AbelianGroup lhs;
  /// Sum over i + j = k - 1 of Tor(H_i(X), H_j(Y)); zero over a field.
  AbelianGroup tor_term;
  /// H_k of the product triangulation.
  AbelianGroup product_hom;
  bool consistent = false;
};

/// Compares the product triangulation with the prediction built from the
/// factors. Over a field only dimensions enter.
KunnethReport kunneth_check(const SimplicialComplex& x, const SimplicialComplex& y, const Coefficients& ring,
                            int k);
/// Same for every degree in [lo, hi], triangulating the product once.
std::vector<KunnethReport> kunneth_check(const SimplicialComplex& x, const SimplicialComplex& y,
                                         const Coefficients& ring, int lo, int hi);
/// Prediction step alone, from already computed profiles.
KunnethReport kunneth_report(const homology::HomologyProfile& hx, const homology::HomologyProfile& hy,
                             const homology::HomologyProfile& product, int k);

}  // namespace fibrestab::sequences
