#include "fibrestab/homology.hpp"

#include <algorithm>
#include <numeric>

#include "fibrestab/errors.hpp"
#include "homology_basis.hpp"

namespace fibrestab::homology {

std::size_t ChainComplex::rank(int k) const {
  if (k < 0 || k > top_degree()) return 0;
  return cells[static_cast<std::size_t>(k)].size();
}

std::ptrdiff_t ChainComplex::index_of(const Simplex& s) const {
  const int k = static_cast<int>(s.size()) - 1;
  if (k < 0 || k > top_degree()) return -1;
  const auto& layer = cells[static_cast<std::size_t>(k)];
  auto it = std::lower_bound(layer.begin(), layer.end(), s);
  if (it == layer.end() || *it != s) return -1;
  return it - layer.begin();
}

ChainComplex simplicial_chains(const SimplicialComplex& x) {
  ChainComplex c;
  for (int k = 0; k <= x.dimension(); ++k) {
    c.cells.push_back(x.simplices(k));
    c.boundary.push_back(complexes::sparse_boundary(x, k));
  }
  return c;
}

ChainComplex relative_chains(const SimplicialPair& pair) {
  if (!complexes::is_subcomplex(pair.sub, pair.total))
    throw NotASubcomplex("relative chains: sub is not contained in total");
  ChainComplex c;
  const SimplicialComplex& x = pair.total;
  for (int k = 0; k <= x.dimension(); ++k) {
    std::vector<Simplex> keep;
    for (const Simplex& s : x.simplices(k))
      if (!pair.sub.contains(s)) keep.push_back(s);
    c.cells.push_back(std::move(keep));
  }
  for (int k = 0; k <= x.dimension(); ++k) {
    const auto& here = c.cells[static_cast<std::size_t>(k)];
    exactalg::SparseIntegerMatrix d(k == 0 ? 0 : c.cells[static_cast<std::size_t>(k) - 1].size(), here.size());
    if (k > 0) {
      Simplex face;
      for (std::size_t j = 0; j < here.size(); ++j) {
        std::vector<exactalg::SparseIntegerMatrix::Entry> col;
        for (std::size_t drop = 0; drop < here[j].size(); ++drop) {
          face.assign(here[j].begin(), here[j].end());
          face.erase(face.begin() + static_cast<std::ptrdiff_t>(drop));
          const std::ptrdiff_t i = c.index_of(face);
          if (i >= 0) col.emplace_back(static_cast<std::size_t>(i), drop % 2 == 0 ? 1 : -1);
        }
        d.set_column(j, std::move(col));
      }
    }
    c.boundary.push_back(std::move(d));
  }
  return c;
}

AbelianGroup HomologyProfile::group(int k) const {
  if (k < 0 || k >= static_cast<int>(groups.size())) return AbelianGroup::zero();
  return groups[static_cast<std::size_t>(k)];
}

std::vector<std::size_t> HomologyProfile::betti_numbers() const {
  std::vector<std::size_t> out;
  for (const AbelianGroup& g : groups) out.push_back(g.free_rank());
  return out;
}

std::string HomologyProfile::to_string() const {
  std::string out = "[";
  for (std::size_t k = 0; k < groups.size(); ++k) {
    if (k) out += ", ";
    if (ring.is_field()) {
      const std::size_t r = groups[k].free_rank();
      out += r == 0 ? "0" : r == 1 ? ring.to_string() : "(" + ring.to_string() + ")^" + std::to_string(r);
    } else {
      out += groups[k].to_string();
    }
  }
  return out + "] over " + ring.to_string();
}

HomologyCalculator::HomologyCalculator(ChainComplex chains, Coefficients ring)
    : chains_(std::move(chains)), ring_(ring), ranks_(static_cast<std::size_t>(chains_.top_degree() + 2)) {}

HomologyCalculator::HomologyCalculator(const SimplicialComplex& x, Coefficients ring)
    : HomologyCalculator(simplicial_chains(x), ring) {}

const HomologyCalculator::Rank& HomologyCalculator::boundary_rank(int k) {
  static const Rank kZero{true, 0, {}};
  if (k <= 0 || k > top_degree()) return kZero;
  Rank& r = ranks_[static_cast<std::size_t>(k)];
  if (r.known) return r;
  const auto& d = chains_.boundary[static_cast<std::size_t>(k)];
  if (ring_.kind() == Coefficients::Kind::kPrime) {
    r.rank = exactalg::sparse_rank_mod_p(d, ring_.characteristic());
  } else {
    exactalg::SmithSummary s = exactalg::sparse_smith_summary(d);
    r.rank = s.rank;
    if (ring_.kind() == Coefficients::Kind::kIntegers) r.torsion = std::move(s.torsion);
  }
  r.known = true;
  return r;
}

AbelianGroup HomologyCalculator::group(int k) {
  if (k < 0 || k > top_degree()) return AbelianGroup::zero();
  const std::size_t below = boundary_rank(k).rank;
  const Rank& above = boundary_rank(k + 1);
  return AbelianGroup::from_cyclic_orders(chains_.rank(k) - below - above.rank, above.torsion);
}

HomologyProfile HomologyCalculator::profile() {
  HomologyProfile p;
  p.ring = ring_;
  for (int k = 0; k <= top_degree(); ++k) p.groups.push_back(group(k));
  return p;
}

HomologyProfile homology(const ChainComplex& c, const Coefficients& ring) {
  return HomologyCalculator(c, ring).profile();
}

HomologyProfile homology(const SimplicialComplex& x, const Coefficients& ring) {
  return homology(simplicial_chains(x), ring);
}

HomologyProfile reduced_homology(const SimplicialComplex& x, const Coefficients& ring) {
  HomologyProfile p = homology(x, ring);
  if (!p.groups.empty()) {
    const AbelianGroup& h0 = p.groups[0];
    p.groups[0] = AbelianGroup::from_cyclic_orders(h0.free_rank() - 1, h0.torsion());
  }
  return p;
}

HomologyProfile relative_homology(const SimplicialPair& pair, const Coefficients& ring) {
  return homology(relative_chains(pair), ring);
}

HomologyProfile local_homology(const SimplicialComplex& x, complexes::Vertex v, const Coefficients& ring) {
  const SimplicialComplex st = complexes::star(x, v);
  SimplicialComplex rest = complexes::puncture(st, v);
  return relative_homology(SimplicialPair{st, std::move(rest)}, ring);
}

FieldMatrix FieldMatrix::identity(std::size_t n) {
  FieldMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

FieldMatrix FieldMatrix::transposed() const {
  FieldMatrix t(cols, rows);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
  return t;
}

std::size_t rank(const FieldMatrix& m, const Coefficients& field) {
  return detail::with_field(field, [&](const auto& f) {
    return linalg::rank(f, detail::from_field_matrix(f, m));
  });
}

FieldMatrix multiply(const FieldMatrix& a, const FieldMatrix& b, const Coefficients& field) {
  if (a.cols != b.rows) throw DimensionMismatch("multiply: inner dimensions differ");
  return detail::with_field(field, [&](const auto& f) {
    const auto c = linalg::multiply(f, detail::from_field_matrix(f, a), detail::from_field_matrix(f, b));
    FieldMatrix out(c.rows(), c.cols());
    for (std::size_t i = 0; i < c.rows(); ++i)
      for (std::size_t j = 0; j < c.cols(); ++j) out(i, j) = f.to_rational(c(i, j));
    return out;
  });
}

InducedMap induced_map(const SimplicialPair& pair, int k, const Coefficients& field) {
  if (k < 0) throw DegreeOutOfRange("induced_map: negative degree");
  if (!complexes::is_subcomplex(pair.sub, pair.total))
    throw NotASubcomplex("induced_map: sub is not contained in total");
  const ChainComplex a = simplicial_chains(pair.sub);
  const ChainComplex x = simplicial_chains(pair.total);
  return detail::with_field(field, [&](const auto& f) {
    const detail::DegreeBasis basis_a(f, a, k);
    const detail::DegreeBasis basis_x(f, x, k);
    InducedMap out;
    out.degree = k;
    out.field = field;
    std::vector<linalg::Vec<std::decay_t<decltype(f)>>> columns;
    for (const auto& z : basis_a.representatives()) {
      columns.push_back(basis_x.coordinates(detail::transfer(f, a, x, k, z)));
      std::vector<Rational> witness;
      for (const auto& v : z) witness.push_back(f.to_rational(v));
      out.basis_witnesses.push_back(std::move(witness));
    }
    out.matrix = detail::to_field_matrix(f, columns, basis_x.dimension());
    return out;
  });
}

std::size_t connected_components(const SimplicialComplex& x) {
  std::vector<std::size_t> parent(x.vertex_count());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::size_t components = x.count(0);
  for (const Simplex& e : x.simplices(1)) {
    const std::size_t a = find(static_cast<std::size_t>(e[0]));
    const std::size_t b = find(static_cast<std::size_t>(e[1]));
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components;
}

bool is_connected(const SimplicialComplex& x) { return connected_components(x) == 1; }

AbelianGroup pi1_abelianized(const SimplicialComplex& x) {
  if (!is_connected(x))
    throw NotConnected("pi1_abelianized: '" + x.name() + "' is not connected");
  return homology(complexes::skeleton(x, 2)).group(1);
}

}  // namespace fibrestab::homology
