// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fibrestab/bundlesim.hpp"
#include "fibrestab/catalog.hpp"
#include "fibrestab/experiment.hpp"
#include "fibrestab/homology.hpp"
#include "fibrestab/json_io.hpp"
#include "fibrestab/obstruction.hpp"
#include "fibrestab/sequences.hpp"
#include "test_support.hpp"

namespace {

using namespace fibrestab;
using complexes::catalog;
using complexes::SimplicialComplex;
using exactalg::AbelianGroup;
using exactalg::Coefficients;
namespace ref = fibrestab::testing;
namespace bs = fibrestab::bundlesim;
constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

AbelianGroup z(std::size_t r) { return AbelianGroup::free(r); }
AbelianGroup z_plus_torsion(std::size_t r, long t) { return AbelianGroup::from_cyclic_orders(r, {t}); }

std::vector<std::vector<int>> int_facets(const SimplicialComplex& x) {
  std::vector<std::vector<int>> out;
  for (const auto& f : x.facets()) out.emplace_back(f.begin(), f.end());
  return out;
}

std::size_t two_torsion(const AbelianGroup& g) {
  std::size_t n = 0;
  for (const auto& t : g.torsion())
    if (t % 2 == 0) ++n;
  return n;
}

Outcome homology_fixtures() {
  const std::vector<std::pair<std::string, std::vector<AbelianGroup>>> table{
      {"s1", {z(1), z(1)}},
      {"s2", {z(1), z(0), z(1)}},
      {"torus", {z(1), z(2), z(1)}},
      {"klein", {z(1), z_plus_torsion(1, 2), z(0)}},
      {"rp2", {z(1), z_plus_torsion(0, 2), z(0)}},
      {"mobius", {z(1), z(1), z(0)}},
      {"t3", {z(1), z(3), z(3), z(1)}},
  };
  std::ostringstream bad;
  for (const auto& [name, expected] : table) {
    const auto x = catalog(name);
    const auto h = homology::homology(x);
    const auto q = ref::reference_betti(int_facets(x), 0);
    const auto f2 = ref::reference_betti(int_facets(x), 2);
    bool ok = h.groups == expected;
    for (std::size_t k = 0; k < expected.size(); ++k) {
      const auto& g = expected[k];
      ok = ok && q[k] == g.free_rank();
      const std::size_t uct = g.free_rank() + two_torsion(g) + (k > 0 ? two_torsion(expected[k - 1]) : 0);
      ok = ok && f2[k] == uct;
    }
    if (!ok) bad << " " << name << "=" << h.to_string();
  }
  return {bad.str().empty(), bad.str().empty() ? "7 spaces match, rank oracles over Q and Z/2 agree" : "mismatch:" + bad.str()};
}

Outcome orientability() {
  bool ok = true;
  for (const auto& n : {"s1", "s2", "torus", "t3"}) ok = ok && obstruction::is_orientable_closed(catalog(n), catalog(n).dimension());
  for (const auto& n : {"klein", "rp2"}) ok = ok && !obstruction::is_orientable_closed(catalog(n), catalog(n).dimension());
  return {ok, "true for s1, s2, torus, t3; false for klein, rp2"};
}

Outcome kunneth() {
  std::vector<std::pair<std::string, std::string>> pairs{{"s1", "s1"}, {"s2", "s1"}, {"klein", "s1"}};
  for (const auto& x : complexes::catalog_names()) pairs.emplace_back("point", x);
  std::size_t checked = 0;
  std::ostringstream bad;
  for (const auto& [a, b] : pairs) {
    const auto x = catalog(a), y = catalog(b);
    for (const auto& r : sequences::kunneth_check(x, y, Coefficients::integers(), 0, x.dimension() + y.dimension() + 1)) {
      ++checked;
      if (!r.consistent) bad << " " << a << "x" << b << "@" << r.degree;
    }
  }
  const auto t = sequences::kunneth_check(catalog("s1"), catalog("s1"), Coefficients::integers(), 1);
  if (t.product_hom != z(2)) bad << " H1(s1xs1)=" << t.product_hom.to_string();

  // H_n(M x U) carries a Z summand that H_n(U) lacks for closed orientable M.
  for (const auto& m : {"s1", "s2", "torus"})
    for (const auto& u : {"point", "interval", "disk", "s1", "mobius"}) {
      const auto mm = catalog(m);
      const int n = mm.dimension();
      const auto hp = homology::homology(complexes::product(mm, catalog(u))).group(n);
      const auto hu = homology::homology(catalog(u)).group(n);
      if (hp.free_rank() < hu.free_rank() + 1 || hp == hu) bad << " top(" << m << "x" << u << ")";
    }
  return {bad.str().empty(), std::to_string(checked) + " degree checks" + (bad.str().empty() ? "" : ", failed:" + bad.str())};
}

Outcome puncture() {
  const auto t3 = catalog("t3");
  const auto h1_t3p = homology::homology(complexes::puncture(t3, 0)).group(1);
  const auto h1_t3 = homology::homology(t3).group(1);
  const auto h1_tp = homology::homology(complexes::puncture(catalog("torus"), 0)).group(1);
  const auto h1_s1 = homology::homology(catalog("s1")).group(1);
  const bool ok = h1_t3p == h1_t3 && h1_t3p == z(3) && h1_tp == z(2) && h1_tp != h1_s1 && !h1_tp.is_zero();
  return {ok, "H1(t3 - star) = " + h1_t3p.to_string() + ", H1(torus - star) = " + h1_tp.to_string()};
}

Outcome exact_sequences() {
  const auto q = Coefficients::rationals();
  bool ok = true;
  for (const auto& file : {"covers/torus_cylinders.json", "covers/sphere_disks.json"}) {
    const auto c = io::cover_from_json(io::read_file(ref::data_path(file)));
    ok = ok && sequences::mayer_vietoris(c.total, c.a, c.b, q, 0, 2).verdict;
  }
  const auto disk = catalog("disk");
  ok = ok && sequences::pair_les_check({disk, complexes::pseudomanifold_boundary(disk)}, q, 0, 2).verdict;
  const auto t3 = catalog("t3");
  ok = ok && sequences::pair_les_check({t3, complexes::puncture(t3, 0)}, q, 0, 3).verdict;
  return {ok, "Mayer-Vietoris on two covers, pair sequences for (disk, rim) and (t3, punctured t3)"};
}

Outcome obstruction_table() {
  const auto rows = io::read_file(ref::fixture_path("obstruction_expected.json"));
  std::size_t agree = 0;
  std::ostringstream bad;
  for (const auto& row : rows) {
    obstruction::StabilizationQuery qy;
    qy.M = catalog(row.at("M").get<std::string>());
    qy.U = row.contains("U") ? catalog(row.at("U").get<std::string>()) : catalog("point");
    qy.mode = obstruction::parse_mode(row.at("mode").get<std::string>());
    qy.one_point = row.at("one_point").get<bool>();
    if (obstruction::to_string(obstruction::evaluate(qy).status) == row.at("expected").get<std::string>())
      ++agree;
    else
      bad << " " << row.dump();
  }
  return {agree == rows.size(), std::to_string(agree) + "/" + std::to_string(rows.size()) + " rows agree" + bad.str()};
}

Outcome compatibility() {
  const auto good = bs::check_compatibility(bs::mobius_system(), 5000, 1e-9);
  const auto bad = bs::check_compatibility(bs::incompatible_system(), 5000, 1e-9);
  const double good_res = std::max(good.max_residual_f, good.max_residual_g);
  const double bad_res = std::max(bad.max_residual_f, bad.max_residual_g);
  char buf[160];
  std::snprintf(buf, sizeof buf, "mobius residual %.3g over %zu samples; incompatible residual %.3g", good_res,
                good.samples, bad_res);
  return {good.pass && good.samples >= 10000 && good_res < 1e-9 && !bad.pass && bad_res > 0.1, buf};
}

Outcome dynamics() {
  const auto e = bs::experiment_from_json(io::read_file(ref::data_path("experiments/trivial_pendulum.json")));
  bs::FeedbackSystem sys = e.system;
  bs::certify(sys);
  const bs::GridSpec grid = *e.grid;
  const auto start = std::chrono::steady_clock::now();
  const auto r = bs::basin(sys, grid, e.basin);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto again = bs::basin(sys, grid, e.basin);

  // Grid column whose angle is the antipode of x*.
  std::size_t column = grid.angle_cells;
  for (std::size_t i = 0; i < grid.angle_cells; ++i)
    if (bs::angular_distance(grid.angle_centre(i), sys.target + kPi) < 1e-12) column = i;
  std::size_t stuck = 0;
  for (const auto& c : r.nonconvergent)
    if (c.angle_index == column) ++stuck;
  bool same = again.converged_cells == r.converged_cells && again.nonconvergent.size() == r.nonconvergent.size();
  for (std::size_t i = 0; same && i < r.nonconvergent.size(); ++i)
    same = again.nonconvergent[i].angle_index == r.nonconvergent[i].angle_index &&
           again.nonconvergent[i].fibre_index == r.nonconvergent[i].fibre_index;

  const bool ok = grid.angle_cells == 100 && grid.fibre_cells == 50 && e.basin.mode == bs::TargetMode::kWeak &&
                  e.basin.criteria.eps == 1e-3 && e.basin.duration == 50.0 && r.converged_fraction >= 0.95 &&
                  column < grid.angle_cells && stuck == grid.fibre_cells && same && seconds < 60.0;
  char buf[200];
  std::snprintf(buf, sizeof buf, "converged %.4f, antipodal column %zu/%zu stuck, deterministic %s, %.1f s",
                r.converged_fraction, stuck, grid.fibre_cells, same ? "yes" : "no", seconds);
  return {ok, buf};
}

Outcome retraction() {
  bs::FeedbackSystem sys = bs::gated_pendulum_system();
  bs::certify(sys);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(-2.8, 2.8), fibre(-2.0, 2.0);
  std::vector<bs::BundlePoint> samples;
  for (int i = 0; i < 200; ++i) samples.push_back(bs::point_at(sys.atlas, angle(rng), fibre(rng)));
  const std::vector<double> s{0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 1.0};
  try {
    const auto r = bs::flow_retraction(sys, samples, s);
    char buf[200];
    std::snprintf(buf, sizeof buf, "%zu samples: identity %.3g, fixed %.3g, endpoint %.3g", r.samples,
                  r.identity_defect, r.fixed_defect, r.endpoint_defect);
    return {r.samples == 200 && r.identity_defect == 0.0 && r.fixed_defect < 1e-9 && r.endpoint_defect < 1e-3, buf};
  } catch (const std::exception& ex) {
    return {false, std::string("threw: ") + ex.what()};
  }
}

Outcome properties() {
  std::size_t failures = 0;
  std::mt19937_64 rng(20240601);

  for (int trial = 0; trial < 100; ++trial) {
    const int v = 3 + static_cast<int>(rng() % 6);
    std::vector<complexes::Simplex> gens;
    for (const auto& f : ref::random_facets(rng, v, 1 + static_cast<int>(rng() % 8), 5)) gens.emplace_back(f.begin(), f.end());
    const auto x = SimplicialComplex::from_simplices(static_cast<std::size_t>(v), gens);
    for (int k = 2; k <= x.dimension(); ++k)
      if (!(complexes::boundary_matrix(x, k - 1) * complexes::boundary_matrix(x, k)).is_zero()) ++failures;
  }

  std::uniform_int_distribution<long> entry(-9, 9), dim(1, 12);
  for (int trial = 0; trial < 500; ++trial) {
    const auto rows = static_cast<std::size_t>(dim(rng)), cols = static_cast<std::size_t>(dim(rng));
    ref::DenseMatrix dense(rows, std::vector<long>(cols));
    for (auto& row : dense)
      for (auto& x : row) x = entry(rng);
    const auto a = exactalg::IntegerMatrix::from_rows(dense);
    const auto s = exactalg::smith_normal_form(a);
    bool ok = s.left * a * s.right == s.diagonal(rows, cols) && s.rank == ref::rank_rational(dense);
    for (std::size_t i = 0; i + 1 < s.invariant_factors.size(); ++i)
      ok = ok && s.invariant_factors[i + 1] % s.invariant_factors[i] == 0;
    if (!ok) ++failures;
  }

  for (const auto& name : complexes::catalog_names()) {
    const auto x = catalog(name);
    const auto h = homology::homology(x).groups;
    if (homology::homology(complexes::stellar_subdivision(x, x.facets().front()).complex).groups != h) ++failures;
    if (x.total_simplices() <= 200 && homology::homology(complexes::barycentric_subdivision(x)).groups != h) ++failures;
  }

  bs::FeedbackSystem sys = bs::gated_pendulum_system();
  bs::certify(sys);
  std::uniform_real_distribution<double> angle(0.3, 2 * kPi - 0.3), fibre(-1.5, 1.5);
  bs::IntegrationSettings settings;
  settings.record_stride = 1000;
  int switched = 0;
  for (int i = 0; i < 50; ++i) {
    double th = angle(rng);
    while (std::abs(th - kPi) < 0.3) th = angle(rng);
    const bs::BundlePoint pa{bs::ChartId::kA, th, fibre(rng)};
    const auto pb = *bs::to_chart(sys.atlas, pa, bs::ChartId::kB);
    const auto ra = bs::integrate(sys, pa, 10.0, 1e-3, settings);
    const auto rb = bs::integrate(sys, pb, 10.0, 1e-3, settings);
    if (ra.chart_switches + rb.chart_switches > 0) ++switched;
    if (!(bs::bundle_distance(sys.atlas, ra.samples.back().point(), rb.samples.back().point()) < 1e-6)) ++failures;
  }
  return {failures == 0, std::to_string(failures) + " failures; " + std::to_string(switched) +
                             "/50 chart-switch runs crossed a chart boundary"};
}

}  // namespace

int main() {
  struct Criterion {
    std::string title;
    std::function<Outcome()> run;
    /// Wall-clock limit in seconds, 0 for none.
    double limit = 0.0;
  };
  const std::vector<Criterion> criteria{
      {"homology fixtures", homology_fixtures, 5.0},
      {"orientability from top homology", orientability},
      {"Kunneth consistency", kunneth},
      {"puncture keeps low homology", puncture, 10.0},
      {"exact sequences", exact_sequences},
      {"obstruction verdict table", obstruction_table},
      {"simulator compatibility", compatibility},
      {"simulator dynamics", dynamics},
      {"flow retraction", retraction},
      {"property suites", properties},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& ex) {
      o = {false, std::string("threw: ") + ex.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (criteria[i].limit > 0 && seconds > criteria[i].limit) {
      o.pass = false;
      o.detail += "; over the time limit";
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %2zu %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].title.c_str(), seconds,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
