#include <catch_amalgamated.hpp>

#include "fibrestab/catalog.hpp"
#include "fibrestab/errors.hpp"
#include "fibrestab/json_io.hpp"
#include "fibrestab/sequences.hpp"
#include "test_support.hpp"

using namespace fibrestab::sequences;
using fibrestab::complexes::catalog;
namespace ref = fibrestab::testing;

namespace {

FieldMatrix matrix(std::size_t rows, std::size_t cols, std::vector<long> values) {
  FieldMatrix m(rows, cols);
  for (std::size_t i = 0; i < values.size(); ++i) m.entries[i] = values[i];
  return m;
}

SequenceNode node(std::string label, std::size_t dim, std::optional<FieldMatrix> out = std::nullopt) {
  return {std::move(label), dim, std::move(out)};
}

}  // namespace

TEST_CASE("Exactness of hand-made sequences") {
  const auto q = Coefficients::rationals();

  SECTION("0 -> Q -> Q^2 -> Q -> 0 split") {
    const auto r = check_exactness({node("0", 0, FieldMatrix(1, 0)), node("A", 1, matrix(2, 1, {1, 0})),
                                    node("B", 2, matrix(1, 2, {0, 1})), node("C", 1, FieldMatrix(0, 1)),
                                    node("0", 0)},
                                   q);
    CHECK(r.verdict);
    CHECK(r.interior_nodes == std::vector<std::size_t>{1, 2, 3});
    CHECK(r.map_ranks == std::vector<std::size_t>{0, 1, 1, 0});
  }

  SECTION("a nonzero composite fails") {
    const auto r = check_exactness({node("A", 1, matrix(1, 1, {1})), node("B", 1, matrix(1, 1, {1})), node("C", 1)}, q);
    CHECK_FALSE(r.verdict);
    CHECK_FALSE(r.composition_zero[0]);
  }

  SECTION("rank equality without containment is not exact") {
    // im(Q -> Q^2) = span(e1), ker(Q^2 -> Q) = span(e2): equal dimensions, not equal subspaces.
    const auto r = check_exactness({node("A", 1, matrix(2, 1, {1, 0})), node("B", 2, matrix(1, 2, {1, 0})), node("C", 1)}, q);
    CHECK(r.rank_data[0] == std::pair<std::size_t, std::size_t>{1, 1});
    CHECK_FALSE(r.exact_at[0]);
    CHECK_FALSE(r.verdict);
  }

  SECTION("characteristic matters") {
    const std::vector<SequenceNode> seq{node("0", 0, FieldMatrix(1, 0)), node("Z", 1, matrix(1, 1, {2})),
                                        node("Z", 1, FieldMatrix(0, 1)), node("0", 0)};
    CHECK(check_exactness(seq, q).verdict);
    CHECK_FALSE(check_exactness(seq, Coefficients::modulo(2)).verdict);
    const auto r = check_exactness(seq, q);
    REQUIRE(r.isomorphisms.size() == 1);
    CHECK(r.isomorphisms[0].isomorphism);
  }

  SECTION("shape mismatches are rejected") {
    CHECK_THROWS_AS(check_exactness({node("A", 1, matrix(2, 2, {1, 0, 0, 1})), node("B", 2)}, q),
                    fibrestab::DimensionMismatch);
  }
}

TEST_CASE("Mayer-Vietoris for the shipped covers") {
  for (const auto& file : {"covers/torus_cylinders.json", "covers/sphere_disks.json"}) {
    const auto cover = fibrestab::io::cover_from_json(fibrestab::io::read_file(ref::data_path(file)));
    INFO(file);
    CHECK(is_cover(cover.total, cover.a, cover.b));
    for (const auto& f : {Coefficients::rationals(), Coefficients::modulo(2), Coefficients::modulo(3)}) {
      const auto r = mayer_vietoris(cover.total, cover.a, cover.b, f, 0, 2);
      CHECK(r.verdict);
      for (bool e : r.exact_at) CHECK(e);
    }
  }
}

TEST_CASE("Mayer-Vietoris rejects non-covers") {
  const auto t = catalog("torus");
  const auto s1 = catalog("s1");
  CHECK_FALSE(is_cover(t, s1, s1));
  CHECK_THROWS_AS(mayer_vietoris(t, s1, s1, Coefficients::rationals(), 0, 2), fibrestab::NotACover);
}

TEST_CASE("Long exact sequence of a pair") {
  const auto disk = catalog("disk");
  CHECK(pair_les_check({disk, fibrestab::complexes::skeleton(disk, 1)}, Coefficients::rationals(), 0, 2).verdict);

  const auto t3 = catalog("t3");
  const auto r = pair_les_check({t3, fibrestab::complexes::puncture(t3, 0)}, Coefficients::rationals(), 0, 3);
  CHECK(r.verdict);

  const auto mob = catalog("mobius");
  const auto rim = fibrestab::complexes::pseudomanifold_boundary(mob);
  CHECK(pair_les_check({mob, rim}, Coefficients::modulo(2), 0, 2).verdict);
  CHECK(pair_les_check({mob, rim}, Coefficients::rationals(), 0, 2).verdict);
}

TEST_CASE("Kunneth over the integers") {
  const auto s1 = catalog("s1");
  for (const auto& [a, b] : std::vector<std::pair<std::string, std::string>>{
           {"s1", "s1"}, {"s2", "s1"}, {"klein", "s1"}, {"point", "torus"}, {"rp2", "rp2"}}) {
    INFO(a << " x " << b);
    for (const auto& r : kunneth_check(catalog(a), catalog(b), Coefficients::integers(), 0, 4)) CHECK(r.consistent);
  }
  const auto r = kunneth_check(s1, s1, Coefficients::integers(), 1);
  CHECK(r.product_hom == AbelianGroup::free(2));
  CHECK(r.tor_term.is_zero());

  // Tor(Z/2, Z/2) lands in degree 3 of RP2 x RP2.
  const auto rr = kunneth_check(catalog("rp2"), catalog("rp2"), Coefficients::integers(), 3);
  CHECK(rr.tor_term == AbelianGroup::cyclic(2));
  CHECK(rr.product_hom == AbelianGroup::cyclic(2));
}

TEST_CASE("Kunneth over a field compares dimensions") {
  const auto r = kunneth_check(catalog("rp2"), catalog("s1"), Coefficients::modulo(2), 0, 3);
  for (const auto& k : r) CHECK(k.consistent);
  CHECK(r[1].product_hom.free_rank() == 2);
}
