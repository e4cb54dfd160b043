#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fibrestab/exactalg.hpp"
#include "fibrestab/sparse_matrix.hpp"

namespace fibrestab::complexes {

using Vertex = std::int32_t;
/// Vertices in strictly increasing order; this order orients the simplex.
using Simplex = std::vector<Vertex>;

/// Finite abstract simplicial complex described by its facets. Immutable;
/// copies share the face tables.
class SimplicialComplex {
 public:
  /// The empty complex.
  SimplicialComplex();

  /// Throws InvalidComplex on out-of-range or repeated vertices, empty or
  /// duplicated facets, or a facet contained in another one.
  SimplicialComplex(std::size_t vertex_count, std::vector<Simplex> facets, std::string name = {});

  /// Closure of an arbitrary generating set; non-maximal members are dropped.
  static SimplicialComplex from_simplices(std::size_t vertex_count, std::vector<Simplex> simplices,
                                          std::string name = {});

  const std::string& name() const { return data_->name; }
  SimplicialComplex renamed(std::string name) const;

  /// Upper bound on vertex labels; not every label has to be in use.
  std::size_t vertex_count() const { return data_->vertex_count; }
  /// Sorted lexicographically.
  const std::vector<Simplex>& facets() const { return data_->facets; }
  /// -1 for the empty complex.
  int dimension() const { return static_cast<int>(data_->simplices.size()) - 1; }
  bool empty() const { return data_->facets.empty(); }

  /// k-simplices in lexicographic order (empty outside 0..dimension).
  const std::vector<Simplex>& simplices(int k) const;
  std::size_t count(int k) const { return simplices(k).size(); }
  std::size_t total_simplices() const;
  std::optional<std::size_t> index_of(const Simplex& s) const;
  bool contains(const Simplex& s) const { return index_of(s).has_value(); }
  /// Vertices that occur in some facet.
  std::vector<Vertex> vertices() const;
  bool has_vertex(Vertex v) const;

  long euler_characteristic() const;

  friend bool operator==(const SimplicialComplex& a, const SimplicialComplex& b) {
    return a.vertex_count() == b.vertex_count() && a.facets() == b.facets();
  }

 private:
  struct Data {
    std::string name;
    std::size_t vertex_count = 0;
    std::vector<Simplex> facets;
    std::vector<std::vector<Simplex>> simplices;
  };
  static std::shared_ptr<const Data> build(std::size_t vertex_count, std::vector<Simplex> generators,
                                           std::string name, bool strict);
  explicit SimplicialComplex(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

  std::shared_ptr<const Data> data_;
};

/// A complex together with a subcomplex sharing its vertex labels.
struct SimplicialPair {
  SimplicialComplex total;
  SimplicialComplex sub;
};

/// Throws NotASubcomplex unless every facet of `sub` is a simplex of `total`.
SimplicialPair make_pair(SimplicialComplex total, SimplicialComplex sub);
bool is_subcomplex(const SimplicialComplex& sub, const SimplicialComplex& total);

/// Matrix of the boundary map from k-simplices to (k-1)-simplices, both in
/// lexicographic order. Entry (face i of s) = (-1)^i. Throws DegreeOutOfRange
/// unless 0 <= k <= dimension.
exactalg::IntegerMatrix boundary_matrix(const SimplicialComplex& x, int k);
/// Same map in sparse form; degrees outside the range give empty matrices.
exactalg::SparseIntegerMatrix sparse_boundary(const SimplicialComplex& x, int k);

/// Staircase triangulation of |x| x |y|. Vertex (a, b) is labelled
/// a * y.vertex_count() + b; each pair of facets of dimensions p and q
/// contributes binomial(p + q, p) simplices.
SimplicialComplex product(const SimplicialComplex& x, const SimplicialComplex& y);

/// Deletes the open star of v: the full subcomplex on the remaining vertices.
SimplicialComplex puncture(const SimplicialComplex& x, Vertex v);
SimplicialComplex link(const SimplicialComplex& x, Vertex v);
SimplicialComplex star(const SimplicialComplex& x, Vertex v);
/// Apex is labelled x.vertex_count().
SimplicialComplex cone(const SimplicialComplex& x);
/// Vertices of the result are the simplices of x, numbered by dimension and
/// then lexicographically.
SimplicialComplex barycentric_subdivision(const SimplicialComplex& x);

/// Inserts a vertex (labelled x.vertex_count()) at the barycentre of one facet.
struct StellarSubdivision {
  SimplicialComplex complex;
  Vertex centre;
};
StellarSubdivision stellar_subdivision(const SimplicialComplex& x, const Simplex& facet);

SimplicialComplex union_of(const SimplicialComplex& a, const SimplicialComplex& b);
SimplicialComplex intersection_of(const SimplicialComplex& a, const SimplicialComplex& b);
/// Full subcomplex on the given vertex labels.
SimplicialComplex induced_subcomplex(const SimplicialComplex& x, const std::vector<Vertex>& vertices);

/// Pure of dimension d and every (d-1)-simplex lies in exactly two facets.
/// A pure 0-dimensional complex counts as closed.
bool is_closed_pseudomanifold(const SimplicialComplex& x);
/// The (d-1)-simplices lying in exactly one facet, as a complex.
SimplicialComplex pseudomanifold_boundary(const SimplicialComplex& x);

/// The k-skeleton.
SimplicialComplex skeleton(const SimplicialComplex& x, int k);

}  // namespace fibrestab::complexes
