#include "fibrestab/sequences.hpp"

#include <algorithm>

#include "fibrestab/errors.hpp"
#include "homology_basis.hpp"

namespace fibrestab::sequences {

namespace {

bool is_zero_matrix(const FieldMatrix& m) {
  return std::all_of(m.entries.begin(), m.entries.end(), [](const exactalg::Rational& x) { return sgn(x) == 0; });
}

std::string degree_label(const char* what, int k) { return "H" + std::to_string(k) + "(" + what + ")"; }

void check_range(int lo, int hi) {
  if (lo < 0 || hi < lo)
    throw DegreeOutOfRange("degree range [" + std::to_string(lo) + ", " + std::to_string(hi) + "] is invalid");
}

}  // namespace

ExactnessReport check_exactness(const std::vector<SequenceNode>& sequence, const Coefficients& field) {
  if (!field.is_field()) throw std::invalid_argument("exactness is checked over a field");
  ExactnessReport report;
  report.field = field;
  const std::size_t n = sequence.size();
  for (std::size_t i = 0; i < n; ++i) {
    const SequenceNode& node = sequence[i];
    report.labels.push_back(node.label);
    report.dimensions.push_back(node.dimension);
    if (i + 1 == n) {
      if (node.map_out) throw DimensionMismatch("the last node of a sequence has no outgoing map");
      break;
    }
    if (!node.map_out) throw DimensionMismatch("node '" + node.label + "' lacks its outgoing map");
    const FieldMatrix& m = *node.map_out;
    if (m.cols != node.dimension || m.rows != sequence[i + 1].dimension)
      throw DimensionMismatch("map out of '" + node.label + "' is " + std::to_string(m.rows) + "x" +
                              std::to_string(m.cols) + ", expected " +
                              std::to_string(sequence[i + 1].dimension) + "x" + std::to_string(node.dimension));
    report.map_ranks.push_back(homology::rank(m, field));
  }

  report.verdict = true;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const std::size_t image = report.map_ranks[i - 1];
    const std::size_t kernel = sequence[i].dimension - report.map_ranks[i];
    const bool zero = is_zero_matrix(homology::multiply(*sequence[i].map_out, *sequence[i - 1].map_out, field));
    const bool exact = zero && image == kernel;
    report.interior_nodes.push_back(i);
    report.exact_at.push_back(exact);
    report.rank_data.emplace_back(image, kernel);
    report.composition_zero.push_back(zero);
    report.verdict = report.verdict && exact;
  }
  for (std::size_t i = 0; i + 3 < n; ++i) {
    if (sequence[i].dimension != 0 || sequence[i + 3].dimension != 0) continue;
    const std::size_t r = report.map_ranks[i + 1];
    const bool iso = r == sequence[i + 1].dimension && r == sequence[i + 2].dimension;
    report.isomorphisms.push_back({i + 1, iso});
    report.verdict = report.verdict && iso;
  }
  return report;
}

bool is_cover(const SimplicialComplex& x, const SimplicialComplex& a, const SimplicialComplex& b) {
  if (!complexes::is_subcomplex(a, x) || !complexes::is_subcomplex(b, x)) return false;
  return std::all_of(x.facets().begin(), x.facets().end(),
                     [&](const complexes::Simplex& s) { return a.contains(s) || b.contains(s); });
}

ExactnessReport mayer_vietoris(const SimplicialComplex& x, const SimplicialComplex& a, const SimplicialComplex& b,
                               const Coefficients& field, int lo, int hi) {
  check_range(lo, hi);
  if (!is_cover(x, a, b))
    throw NotACover("A and B must be subcomplexes of X whose union contains every simplex of X");
  const SimplicialComplex ab = complexes::intersection_of(a, b);
  const homology::ChainComplex cx = homology::simplicial_chains(x);
  const homology::ChainComplex ca = homology::simplicial_chains(a);
  const homology::ChainComplex cb = homology::simplicial_chains(b);
  const homology::ChainComplex ci = homology::simplicial_chains(ab);

  const std::vector<SequenceNode> nodes = homology::detail::with_field(field, [&](const auto& f) {
    using F = std::decay_t<decltype(f)>;
    using Basis = homology::detail::DegreeBasis<F>;
    using homology::detail::to_field_matrix;
    using homology::detail::transfer;

    // δ: H_k(X) -> H_{k-1}(A∩B) via the part of a cycle carried by A.
    auto connecting = [&](const Basis& from, int k, const Basis& to) {
      std::vector<linalg::Vec<F>> cols;
      for (const auto& z : from.representatives()) {
        const auto in_a = transfer(f, cx, ca, k, z);
        const auto boundary = homology::detail::apply_boundary(f, ca, k, in_a);
        cols.push_back(to.coordinates(transfer(f, ca, ci, k - 1, boundary)));
      }
      return to_field_matrix(f, cols, to.dimension());
    };

    std::vector<SequenceNode> out;
    Basis top(f, cx, hi + 1);
    Basis below(f, ci, hi);
    out.push_back({degree_label("X", hi + 1), top.dimension(), connecting(top, hi + 1, below)});
    for (int k = hi; k >= lo; --k) {
      Basis hi_i(f, ci, k);
      Basis ha(f, ca, k);
      Basis hb(f, cb, k);
      Basis hx(f, cx, k);
      std::vector<linalg::Vec<F>> alpha;
      for (const auto& z : hi_i.representatives()) {
        auto col = ha.coordinates(transfer(f, ci, ca, k, z));
        const auto part_b = hb.coordinates(transfer(f, ci, cb, k, z));
        col.insert(col.end(), part_b.begin(), part_b.end());
        alpha.push_back(std::move(col));
      }
      std::vector<linalg::Vec<F>> beta;
      for (const auto& z : ha.representatives()) beta.push_back(hx.coordinates(transfer(f, ca, cx, k, z)));
      for (const auto& z : hb.representatives()) {
        auto col = hx.coordinates(transfer(f, cb, cx, k, z));
        for (auto& v : col) v = f.neg(v);
        beta.push_back(std::move(col));
      }
      const std::size_t sum_dim = ha.dimension() + hb.dimension();
      out.push_back({degree_label("A∩B", k), hi_i.dimension(), to_field_matrix(f, alpha, sum_dim)});
      out.push_back({degree_label("A", k) + "+" + degree_label("B", k), sum_dim,
                     to_field_matrix(f, beta, hx.dimension())});
      if (k > 0) {
        Basis next(f, ci, k - 1);
        out.push_back({degree_label("X", k), hx.dimension(), connecting(hx, k, next)});
      } else {
        out.push_back({degree_label("X", k), hx.dimension(), FieldMatrix(0, hx.dimension())});
      }
    }
    if (lo == 0) {
      out.push_back({"0", 0, std::nullopt});
    } else {
      Basis last(f, ci, lo - 1);
      out.push_back({degree_label("A∩B", lo - 1), last.dimension(), std::nullopt});
    }
    return out;
  });
  return check_exactness(nodes, field);
}

ExactnessReport pair_les_check(const SimplicialPair& pair, const Coefficients& field, int lo, int hi) {
  check_range(lo, hi);
  const homology::ChainComplex cx = homology::simplicial_chains(pair.total);
  const homology::ChainComplex ca = homology::simplicial_chains(pair.sub);
  const homology::ChainComplex cr = homology::relative_chains(pair);

  const std::vector<SequenceNode> nodes = homology::detail::with_field(field, [&](const auto& f) {
    using F = std::decay_t<decltype(f)>;
    using Basis = homology::detail::DegreeBasis<F>;
    using homology::detail::to_field_matrix;
    using homology::detail::transfer;

    // δ: H_k(X,A) -> H_{k-1}(A): lift, take the boundary, read it in A.
    auto connecting = [&](const Basis& from, int k, const Basis& to) {
      std::vector<linalg::Vec<F>> cols;
      for (const auto& z : from.representatives()) {
        const auto lifted = transfer(f, cr, cx, k, z);
        const auto boundary = homology::detail::apply_boundary(f, cx, k, lifted);
        cols.push_back(to.coordinates(transfer(f, cx, ca, k - 1, boundary)));
      }
      return to_field_matrix(f, cols, to.dimension());
    };

    std::vector<SequenceNode> out;
    Basis top(f, cr, hi + 1);
    Basis below(f, ca, hi);
    out.push_back({degree_label("X,A", hi + 1), top.dimension(), connecting(top, hi + 1, below)});
    for (int k = hi; k >= lo; --k) {
      Basis ha(f, ca, k);
      Basis hx(f, cx, k);
      Basis hr(f, cr, k);
      std::vector<linalg::Vec<F>> inclusion;
      for (const auto& z : ha.representatives()) inclusion.push_back(hx.coordinates(transfer(f, ca, cx, k, z)));
      std::vector<linalg::Vec<F>> projection;
      for (const auto& z : hx.representatives()) projection.push_back(hr.coordinates(transfer(f, cx, cr, k, z)));
      out.push_back({degree_label("A", k), ha.dimension(), to_field_matrix(f, inclusion, hx.dimension())});
      out.push_back({degree_label("X", k), hx.dimension(), to_field_matrix(f, projection, hr.dimension())});
      if (k > 0) {
        Basis next(f, ca, k - 1);
        out.push_back({degree_label("X,A", k), hr.dimension(), connecting(hr, k, next)});
      } else {
        out.push_back({degree_label("X,A", k), hr.dimension(), FieldMatrix(0, hr.dimension())});
      }
    }
    if (lo == 0) {
      out.push_back({"0", 0, std::nullopt});
    } else {
      Basis last(f, ca, lo - 1);
      out.push_back({degree_label("A", lo - 1), last.dimension(), std::nullopt});
    }
    return out;
  });
  return check_exactness(nodes, field);
}

KunnethReport kunneth_report(const homology::HomologyProfile& hx, const homology::HomologyProfile& hy,
                             const homology::HomologyProfile& product, int k) {
  KunnethReport r;
  r.degree = k;
  r.ring = product.ring;
  for (int i = 0; i <= k; ++i) {
    const AbelianGroup gx = hx.group(i);
    const AbelianGroup gy = hy.group(k - i);
    if (r.ring.is_field()) {
      r.lhs = r.lhs + AbelianGroup::free(gx.free_rank() * gy.free_rank());
    } else {
      r.lhs = r.lhs + exactalg::tensor_product(gx, gy);
    }
  }
  if (!r.ring.is_field()) {
    for (int i = 0; i <= k - 1; ++i)
      r.tor_term = r.tor_term + exactalg::tor_product(hx.group(i), hy.group(k - 1 - i));
  }
  r.product_hom = product.group(k);
  r.consistent = r.product_hom == r.lhs + r.tor_term;
  return r;
}

std::vector<KunnethReport> kunneth_check(const SimplicialComplex& x, const SimplicialComplex& y,
                                         const Coefficients& ring, int lo, int hi) {
  check_range(lo, hi);
  const homology::HomologyProfile hx = homology::homology(x, ring);
  const homology::HomologyProfile hy = homology::homology(y, ring);
  homology::HomologyCalculator prod(complexes::product(x, y), ring);
  homology::HomologyProfile hp;
  hp.ring = ring;
  for (int k = 0; k <= std::min(hi, prod.top_degree()); ++k) hp.groups.push_back(prod.group(k));
  std::vector<KunnethReport> out;
  for (int k = lo; k <= hi; ++k) out.push_back(kunneth_report(hx, hy, hp, k));
  return out;
}

KunnethReport kunneth_check(const SimplicialComplex& x, const SimplicialComplex& y, const Coefficients& ring,
                            int k) {
  return kunneth_check(x, y, ring, k, k).front();
}

}  // namespace fibrestab::sequences
