#include "fibrestab/obstruction.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "fibrestab/errors.hpp"
#include "fibrestab/homology.hpp"

namespace fibrestab::obstruction {

using homology::ChainComplex;
using homology::HomologyCalculator;

std::string to_string(Status s) {
  return s == Status::kObstructed ? "OBSTRUCTED" : "NOT_OBSTRUCTED_BY_THESE_TESTS";
}

std::string to_string(Mode m) { return m == Mode::kStrong ? "strong" : "weak"; }

Mode parse_mode(const std::string& text) {
  if (text == "strong") return Mode::kStrong;
  if (text == "weak") return Mode::kWeak;
  throw ParseError("mode must be 'strong' or 'weak', got '" + text + "'");
}

namespace {

void require_connected(const SimplicialComplex& x, const char* role) {
  if (!homology::is_connected(x))
    throw NotConnected(std::string(role) + " ('" + x.name() + "') must be connected");
}

void require_closed(const SimplicialComplex& m) {
  if (!complexes::is_closed_pseudomanifold(m))
    throw NotClosed("'" + m.name() + "' is not a closed pseudomanifold");
}

// E minus an interior point of one top facet deformation retracts onto E with
// that open facet removed, so only the facet's own chain disappears.
ChainComplex remove_open_facet(const ChainComplex& e, std::size_t facet) {
  ChainComplex out = e;
  const auto top = static_cast<std::size_t>(e.top_degree());
  out.cells[top].erase(out.cells[top].begin() + static_cast<std::ptrdiff_t>(facet));
  const auto& d = e.boundary[top];
  exactalg::SparseIntegerMatrix reduced(d.rows(), d.cols() - 1);
  for (std::size_t j = 0, k = 0; j < d.cols(); ++j) {
    if (j == facet) continue;
    reduced.set_column(k++, d.column(j));
  }
  out.boundary[top] = std::move(reduced);
  return out;
}

std::vector<std::size_t> sample_facets(std::size_t count, const PunctureSampling& sampling) {
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(sampling.seed);
  const std::size_t wanted = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(sampling.samples, 1)));
  // Partial Fisher-Yates with explicit modular draws keeps the choice
  // independent of the standard library's distribution implementations.
  for (std::size_t i = 0; i < wanted; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (count - i));
    std::swap(order[i], order[j]);
  }
  order.resize(wanted);
  return order;
}

std::string describe_mode_target(Mode mode) {
  return mode == Mode::kStrong ? "a point" : "a fibre";
}

// Evidence from the punctured total space, one entry per sampled puncture.
// Returns true when every sample produced a witness.
bool puncture_tests(const SimplicialComplex& e, HomologyCalculator& he, HomologyCalculator& hu, Mode mode,
                    const PunctureSampling& sampling, std::vector<Evidence>& out) {
  const int m = e.dimension();
  const std::vector<std::size_t> picks = sample_facets(he.chains().rank(m), sampling);
  bool all = !picks.empty();
  for (std::size_t pick : picks) {
    HomologyCalculator h1(remove_open_facet(he.chains(), pick), he.ring());
    Evidence ev;
    ev.detail = "puncture at the barycentre of top facet #" + std::to_string(pick);
    ev.degree = -1;
    for (int k = mode == Mode::kStrong ? 1 : 0; k <= m; ++k) {
      const AbelianGroup g1 = h1.group(k);
      const AbelianGroup gu = hu.group(k);
      const bool differs = mode == Mode::kStrong ? !g1.is_zero() : g1 != gu;
      if (!differs) continue;
      ev.degree = k;
      ev.group_E1 = g1;
      ev.group_U = gu;
      ev.group_E = he.group(k);
      ev.witness = true;
      ev.lemma = k <= m - 2 ? "puncture_preserves_low_homology" : "punctured_total_space";
      break;
    }
    if (!ev.witness) {
      ev.lemma = "punctured_total_space";
      ev.detail += mode == Mode::kStrong ? "; all reduced homology vanishes"
                                         : "; homology agrees with the fibre in every degree";
      all = false;
    }
    out.push_back(std::move(ev));
  }
  return all;
}

// H_d(E) against H_d(U) in the degree d where the base carries its
// fundamental class (d = n when orientable, else n - 1). In a product this
// degree differs from the fibre; when d <= m - 2 the difference survives the
// puncture and settles the question without looking at E - {z}.
Evidence top_homology_test(const SimplicialComplex& m_cx, HomologyCalculator& he, HomologyCalculator& hu,
                           Mode mode, int m, bool product_bundle) {
  HomologyCalculator hm(m_cx);
  const int n = m_cx.dimension();
  const bool orientable = hm.group(n) == AbelianGroup::free(1);
  Evidence ev;
  ev.lemma = "top_homology_of_product";
  ev.degree = orientable ? n : n - 1;
  ev.group_M = hm.group(ev.degree);
  ev.group_E = he.group(ev.degree);
  ev.group_U = hu.group(ev.degree);
  const bool holds = mode == Mode::kStrong ? !ev.group_E->is_zero() : *ev.group_E != *ev.group_U;
  if (!product_bundle) {
    ev.detail = "informational: the degree argument only applies to product bundles";
  } else if (ev.degree > m - 2) {
    ev.detail = "degree lies above dim E - 2, where puncturing may change homology";
  } else {
    ev.witness = holds;
    ev.detail = "H_d(E - {z}) = H_d(E) for d <= dim E - 2";
  }
  return ev;
}

Verdict one_point(const SimplicialComplex& m_cx, const SimplicialComplex& u, const SimplicialComplex& e,
                  Mode mode, bool product_bundle, const PunctureSampling& sampling) {
  HomologyCalculator he(e);
  HomologyCalculator hu(u);
  const int m = e.dimension();
  Verdict v;
  v.evidence.push_back(top_homology_test(m_cx, he, hu, mode, m, product_bundle));
  const bool punctured = puncture_tests(e, he, hu, mode, sampling, v.evidence);
  const bool any = std::any_of(v.evidence.begin(), v.evidence.end(), [](const Evidence& x) { return x.witness; });
  v.status = any ? Status::kObstructed : Status::kNotObstructedByTheseTests;

  const std::string target = describe_mode_target(mode);
  if (any) {
    const Evidence* w = nullptr;
    for (const Evidence& x : v.evidence)
      if (x.witness && x.group_E1) {
        w = &x;
        break;
      }
    std::string why;
    if (w) {
      why = "Removing a point z leaves H_" + std::to_string(w->degree) + "(E - {z}) = " + w->group_E1->to_string() +
            (mode == Mode::kStrong ? ", which is nonzero" : " while the fibre has " + w->group_U->to_string()) +
            ", so E - {z} cannot deformation retract onto " + target + ".";
    } else {
      why = "The product degree test already separates E - {z} from " + target + ".";
    }
    if (product_bundle) {
      v.narrative = "E = M x U is a product bundle. " + why +
                    " One-point " + to_string(mode) + " stabilization by dynamic feedback is impossible on it.";
    } else {
      v.narrative = "E was supplied explicitly. " + why +
                    " The twisting-based theorem is a necessary condition only; it does not promise that every "
                    "twisted bundle admits one-point stabilization, and this total space fails the puncture test.";
    }
    if (!punctured)
      v.narrative += " Not every sampled puncture produced a witness; the samples disagree.";
  } else {
    v.narrative = "No computed invariant of E - {z} rules out a deformation retraction onto " + target +
                  ". These tests are necessary conditions only and do not establish stabilizability.";
  }
  return v;
}

}  // namespace

std::optional<Certificate> non_contractibility_certificate(const SimplicialComplex& m) {
  require_connected(m, "M");
  HomologyCalculator h(m);
  for (int k = 1; k <= m.dimension(); ++k) {
    AbelianGroup g = h.group(k);
    if (g.is_zero()) continue;
    return Certificate{k, std::move(g), k == 1 ? "abelianized_fundamental_group" : "homology"};
  }
  return std::nullopt;
}

bool is_orientable_closed(const SimplicialComplex& m, int n) {
  if (m.dimension() != n)
    throw NotAManifoldDim("'" + m.name() + "' has dimension " + std::to_string(m.dimension()) + ", not " +
                          std::to_string(n));
  require_closed(m);
  return HomologyCalculator(m).group(n) == AbelianGroup::free(1);
}

bool is_integral_homology_sphere(const SimplicialComplex& m) {
  require_closed(m);
  const int n = m.dimension();
  HomologyCalculator h(m);
  if (n == 0) return h.group(0) == AbelianGroup::free(2);
  if (h.group(0) != AbelianGroup::free(1)) return false;
  for (int i = 1; i < n; ++i)
    if (!h.group(i).is_zero()) return false;
  return h.group(n) == AbelianGroup::free(1);
}

Verdict trivial_bundle_one_point_obstruction(const SimplicialComplex& m, const SimplicialComplex& u, Mode mode,
                                             const PunctureSampling& sampling) {
  require_closed(m);
  require_connected(m, "M");
  require_connected(u, "U");
  return one_point(m, u, complexes::product(m, u), mode, /*product_bundle=*/true, sampling);
}

Verdict evaluate(const StabilizationQuery& q) {
  require_connected(q.M, "M");
  require_connected(q.U, "U");
  if (q.E) {
    if (q.E->dimension() != q.M.dimension() + q.U.dimension())
      throw DimensionMismatch("dim E = " + std::to_string(q.E->dimension()) + " but dim M + dim U = " +
                              std::to_string(q.M.dimension() + q.U.dimension()));
    require_connected(*q.E, "E");
  }

  if (!q.one_point) {
    Verdict v;
    const std::optional<Certificate> cert = non_contractibility_certificate(q.M);
    Evidence ev;
    ev.lemma = "non_contractible_base";
    if (cert) {
      ev.degree = cert->degree;
      ev.group_M = cert->group;
      ev.witness = true;
      ev.detail = cert->degree == 1 ? "H_1(M) is the abelianized fundamental group; nonzero means not simply connected"
                                    : "nonzero homology in positive degree";
      v.status = Status::kObstructed;
      v.narrative = "H_" + std::to_string(cert->degree) + "(M) = " + cert->group.to_string() +
                    " is nonzero, so M is not contractible. Global " + to_string(q.mode) +
                    " stabilization by dynamic feedback requires a contractible state space, whatever the "
                    "controller space and bundle.";
    } else {
      ev.degree = q.M.dimension();
      ev.group_M = AbelianGroup::zero();
      ev.detail = "all homology in positive degrees vanishes; contractibility is not decided";
      v.narrative = "M has the homology of a point. The test cannot certify non-contractibility, so no "
                    "obstruction is reported; this is not a proof of stabilizability.";
    }
    v.evidence.push_back(std::move(ev));
    return v;
  }

  require_closed(q.M);
  if (q.E) return one_point(q.M, q.U, *q.E, q.mode, /*product_bundle=*/false, q.sampling);
  return one_point(q.M, q.U, complexes::product(q.M, q.U), q.mode, /*product_bundle=*/true, q.sampling);
}

}  // namespace fibrestab::obstruction
