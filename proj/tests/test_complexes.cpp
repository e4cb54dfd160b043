#include <random>

#include <catch_amalgamated.hpp>

#include "fibrestab/catalog.hpp"
#include "fibrestab/complexes.hpp"
#include "fibrestab/errors.hpp"
#include "test_support.hpp"

using namespace fibrestab::complexes;
using fibrestab::exactalg::IntegerMatrix;
namespace ref = fibrestab::testing;

namespace {

SimplicialComplex from_facets(std::size_t n, const std::vector<std::vector<int>>& facets) {
  std::vector<Simplex> s;
  for (const auto& f : facets) s.emplace_back(f.begin(), f.end());
  return SimplicialComplex::from_simplices(n, s);
}

std::vector<std::vector<int>> as_int_facets(const SimplicialComplex& x) {
  std::vector<std::vector<int>> out;
  for (const auto& f : x.facets()) out.emplace_back(f.begin(), f.end());
  return out;
}

}  // namespace

TEST_CASE("Face tables of the boundary of a tetrahedron") {
  const auto s2 = catalog("s2");
  CHECK(s2.dimension() == 2);
  CHECK(s2.count(0) == 4);
  CHECK(s2.count(1) == 6);
  CHECK(s2.count(2) == 4);
  CHECK(s2.euler_characteristic() == 2);
  CHECK(s2.simplices(1).front() == Simplex{0, 1});
  CHECK(s2.contains({1, 3}));
  CHECK_FALSE(s2.contains({0, 1, 2, 3}));
  CHECK(is_closed_pseudomanifold(s2));
}

TEST_CASE("Boundary matrix of a triangle") {
  const auto disk = catalog("disk");
  CHECK(boundary_matrix(disk, 2) == IntegerMatrix::from_rows({{1}, {-1}, {1}}));
  CHECK(boundary_matrix(disk, 1) == IntegerMatrix::from_rows({{-1, -1, 0}, {1, 0, -1}, {0, 1, 1}}));
  CHECK(boundary_matrix(disk, 0).rows() == 0);
  CHECK_THROWS_AS(boundary_matrix(disk, 3), fibrestab::DegreeOutOfRange);
  CHECK_THROWS_AS(boundary_matrix(disk, -1), fibrestab::DegreeOutOfRange);
}

TEST_CASE("Boundary matrices agree with an independent assembly") {
  for (const auto& name : catalog_names()) {
    const auto x = catalog(name);
    const auto cells = ref::closure(as_int_facets(x));
    for (int k = 1; k <= x.dimension(); ++k) {
      INFO(name << " degree " << k);
      REQUIRE(boundary_matrix(x, k) == IntegerMatrix::from_rows(ref::reference_boundary(cells, static_cast<std::size_t>(k))));
    }
  }
}

TEST_CASE("Boundary of a boundary vanishes on random complexes") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int vertices = 3 + static_cast<int>(rng() % 6);
    const auto x = from_facets(static_cast<std::size_t>(vertices), ref::random_facets(rng, vertices, 1 + static_cast<int>(rng() % 8), 5));
    for (int k = 2; k <= x.dimension(); ++k) {
      INFO("trial " << trial << " degree " << k);
      REQUIRE((boundary_matrix(x, k - 1) * boundary_matrix(x, k)).is_zero());
    }
    for (int k = 1; k < x.dimension(); ++k) {
      const auto a = sparse_boundary(x, k);
      const auto b = sparse_boundary(x, k + 1);
      REQUIRE(a.cols() == b.rows());
    }
  }
}

TEST_CASE("Product of two circles") {
  const auto t = product(catalog("s1"), catalog("s1"));
  CHECK(t.count(0) == 9);
  CHECK(t.count(1) == 27);
  CHECK(t.count(2) == 18);
  CHECK(t.euler_characteristic() == 0);
  CHECK(is_closed_pseudomanifold(t));
  CHECK(t == catalog("torus"));
}

TEST_CASE("Products multiply Euler characteristics") {
  for (const auto& a : {"s1", "disk", "s2", "mobius"})
    for (const auto& b : {"interval", "s1", "rp2"}) {
      const auto x = catalog(a), y = catalog(b);
      INFO(a << " x " << b);
      CHECK(product(x, y).euler_characteristic() == x.euler_characteristic() * y.euler_characteristic());
      CHECK(product(x, y).dimension() == x.dimension() + y.dimension());
    }
}

TEST_CASE("Puncture deletes the open star") {
  const auto s2 = catalog("s2");
  const auto p = puncture(s2, 0);
  CHECK(p.facets() == std::vector<Simplex>{{1, 2, 3}});
  CHECK_FALSE(p.has_vertex(0));
  CHECK(link(s2, 0).facets() == std::vector<Simplex>{{1, 2}, {1, 3}, {2, 3}});
  CHECK(star(s2, 0).count(2) == 3);
  CHECK_THROWS_AS(puncture(s2, 7), fibrestab::UnknownVertex);

  const auto t = catalog("torus");
  const auto tp = puncture(t, 0);
  CHECK(tp.count(0) == 8);
  CHECK(tp.count(2) == 10);
  CHECK(tp.euler_characteristic() == -1);
  CHECK(pseudomanifold_boundary(tp).count(1) == 8);
}

TEST_CASE("Cones, subdivisions and skeleta") {
  const auto s1 = catalog("s1");
  const auto c = cone(s1);
  CHECK(c.vertex_count() == 4);
  CHECK(c.count(2) == 3);
  CHECK(c.euler_characteristic() == 1);

  const auto sd = barycentric_subdivision(catalog("disk"));
  CHECK(sd.count(0) == 7);
  CHECK(sd.count(2) == 6);
  CHECK(sd.euler_characteristic() == 1);

  const auto st = stellar_subdivision(catalog("s2"), {0, 1, 2});
  CHECK(st.centre == 4);
  CHECK(st.complex.count(2) == 6);
  CHECK_THROWS_AS(stellar_subdivision(catalog("s2"), {0, 1}), fibrestab::InvalidComplex);

  CHECK(skeleton(catalog("s2"), 1).dimension() == 1);
  CHECK(skeleton(catalog("s2"), 1).count(1) == 6);
}

TEST_CASE("Unions, intersections and subcomplexes") {
  const auto a = from_facets(4, {{0, 1, 2}});
  const auto b = from_facets(4, {{1, 2, 3}});
  const auto u = union_of(a, b);
  CHECK(u.count(2) == 2);
  CHECK(intersection_of(a, b).facets() == std::vector<Simplex>{{1, 2}});
  CHECK(is_subcomplex(a, u));
  CHECK_FALSE(is_subcomplex(u, a));
  CHECK_THROWS_AS(make_pair(a, b), fibrestab::NotASubcomplex);
  CHECK(induced_subcomplex(u, {0, 1, 3}).facets() == std::vector<Simplex>{{0, 1}, {1, 3}});
}

TEST_CASE("Invalid facet lists are rejected") {
  CHECK_THROWS_AS(SimplicialComplex(3, {{0, 3}}), fibrestab::InvalidComplex);
  CHECK_THROWS_AS(SimplicialComplex(3, {{0, 0}}), fibrestab::InvalidComplex);
  CHECK_THROWS_AS(SimplicialComplex(3, {{0, 1}, {0, 1}}), fibrestab::InvalidComplex);
  CHECK_THROWS_AS(SimplicialComplex(3, {{0, 1}, {0, 1, 2}}), fibrestab::InvalidComplex);
  CHECK_THROWS_AS(SimplicialComplex(3, {{}}), fibrestab::InvalidComplex);
  CHECK_NOTHROW(SimplicialComplex::from_simplices(3, {{0, 1}, {0, 1, 2}}));
  CHECK(SimplicialComplex().empty());
  CHECK(SimplicialComplex().dimension() == -1);
}

TEST_CASE("Catalog metadata matches the triangulations") {
  for (const auto& e : catalog_entries()) {
    INFO(e.name);
    CHECK(e.complex.dimension() == e.dimension);
    CHECK(is_closed_pseudomanifold(e.complex) == e.closed);
  }
  CHECK_THROWS_AS(catalog("nope"), fibrestab::UnknownName);
}
