#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "mqcsim/error.hpp"
#include "mqcsim/geometry.hpp"

using namespace mqcsim;

namespace {

double distance(const Vec3& a, const Vec3& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
}

std::map<long, int> shells(const SiteSet& sites) {
  std::map<long, int> counts;
  for (std::size_t k = 1; k < sites.size(); ++k) ++counts[std::lround(distance(sites.positions[k], {0, 0, 0}) * 1000.0)];
  return counts;
}

}  // namespace

TEST_CASE("fcc fragment: central site plus twelve neighbours at 6.6") {
  const SiteSet sites = build_fcc(9.334, 13, 19);
  REQUIRE(sites.size() == 13);
  CHECK(distance(sites.positions[0], {0, 0, 0}) == 0.0);
  for (std::size_t k = 1; k < 13; ++k) CHECK(distance(sites.positions[k], {0, 0, 0}) == doctest::Approx(6.600).epsilon(0.0002));
}

TEST_CASE("fcc fragment: second shell of six at the lattice constant") {
  const auto counts = shells(build_fcc(9.334, 19, 19));
  REQUIRE(counts.size() == 2);
  CHECK(counts.at(6600) == 12);
  CHECK(counts.at(9334) == 6);
}

TEST_CASE("fcc fragment: third shell holds 24 sites") {
  const auto counts = shells(build_fcc(1.0, 43, 64));
  CHECK(counts.size() == 3);
  CHECK(counts.at(std::lround(std::sqrt(1.5) * 1000.0)) == 24);
}

TEST_CASE("fcc fragment: budget of one is a lone site") {
  const SiteSet sites = build_fcc(9.334, 1, 19);
  REQUIRE(sites.size() == 1);
  CHECK(couplings(sites, {}, 1.0).entries.empty());
}

TEST_CASE("site budget above the cap is refused") {
  try {
    (void)build_fcc(1.0, 20, 19);
    FAIL("expected a resource cap error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::resource_cap);
  }
}

TEST_CASE("chains") {
  const SiteSet two = build_chain(1.0, 2, {1, 0, 0}, 19);
  CHECK(distance(two.positions[0], two.positions[1]) == doctest::Approx(1.0));
  const SiteSet three = build_chain(1.0, 3, {0, 0, 1}, 19);
  CHECK(distance(three.positions[0], three.positions[2]) == doctest::Approx(2.0));
  const SiteSet five = build_chain(2.0, 5, {0, 1, 0}, 19);
  int nearest = 0;
  for (const auto& c : couplings(five, {}, 1.0).entries) nearest += std::abs(c.distance - 2.0) < 1e-12 ? 1 : 0;
  CHECK(nearest == 4);
}

TEST_CASE("coupling angular factor") {
  SUBCASE("along the field") {
    const SiteSet s = build_chain(1.0, 2, {0, 0, 1}, 2);
    CHECK(couplings(s, {}, 1.0).entries[0].d == doctest::Approx(-2.0));
  }
  SUBCASE("magic angle") {
    const double c = 1.0 / std::sqrt(3.0);
    const SiteSet s = build_chain(1.7, 2, {std::sqrt(1.0 - c * c), 0, c}, 2);
    CHECK(std::abs(couplings(s, {}, 1.0).entries[0].d) < 1e-15);
  }
  SUBCASE("perpendicular") {
    const SiteSet s = build_chain(2.0, 2, {1, 0, 0}, 2);
    CHECK(couplings(s, {}, 1.0).entries[0].d == doctest::Approx(0.125));
  }
}

TEST_CASE("coupling table layout and lookup") {
  const SiteSet sites = build_fcc(1.0, 13, 19);
  const CouplingTable t = couplings(sites, {0.3, 0.2, 0.1}, 1.0);
  CHECK(t.entries.size() == 78);
  for (const auto& e : t.entries) {
    CHECK(e.i < e.j);
    CHECK(t.at(e.j, e.i) == e.d);
  }
  CHECK(t.max_abs() > 0.0);
}

TEST_CASE("cutoff keeps every pair and zeroes distant ones") {
  const SiteSet sites = build_chain(1.0, 4, {1, 0, 0}, 19);
  const CouplingTable t = couplings(sites, {}, 1.0, 1.5);
  REQUIRE(t.entries.size() == 6);
  for (const auto& e : t.entries) CHECK((e.distance > 1.5) == (e.d == 0.0));
}

TEST_CASE("nearest-neighbour prefactor hits the target coupling") {
  const SiteSet sites = build_fcc(9.334, 13, 19);
  const double pre = prefactor_for_nearest_neighbor(sites, 2.5);
  CHECK(pre == doctest::Approx(2.5 * std::pow(9.334 / std::sqrt(2.0), 3)));
}

TEST_CASE("rotating the crystal equals inverse-rotating the sites") {
  const SiteSet sites = build_fcc(1.0, 9, 19);
  const EulerAngles angles{0.7, 1.3, -0.4};
  const Mat3 r = rotation_matrix(angles);
  SiteSet moved = sites;
  for (auto& p : moved.positions) p = rotate(r, p);
  const CouplingTable a = couplings(sites, angles, 1.0);
  const CouplingTable b = couplings(moved, {}, 1.0);
  REQUIRE(a.entries.size() == b.entries.size());
  for (std::size_t k = 0; k < a.entries.size(); ++k) CHECK(std::abs(a.entries[k].d - b.entries[k].d) < 1e-14);
}

TEST_CASE("rotation matrices are orthogonal") {
  const Mat3 r = rotation_matrix({0.2, 2.1, 4.0});
  const Mat3 rt = transpose(r);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += r[i][k] * rt[k][j];
      CHECK(std::abs(s - (i == j ? 1.0 : 0.0)) < 1e-15);
    }
}

TEST_CASE("powder orientations are seeded and deterministic") {
  const auto one = powder_orientations(1, 42);
  CHECK(one.size() == 1);
  CHECK(powder_orientations(1, 42) == one);
  CHECK(powder_orientations(2, 1) != powder_orientations(2, 2));
  // Extending the ensemble leaves earlier orientations untouched.
  const auto five = powder_orientations(5, 9);
  const auto eight = powder_orientations(8, 9);
  for (std::size_t k = 0; k < 5; ++k) CHECK(five[k] == eight[k]);
}

TEST_CASE("powder average of the angular factor vanishes") {
  constexpr std::size_t count = 10000;
  const SiteSet pair = build_chain(1.0, 2, {1, 0, 0}, 2);
  double sum = 0.0;
  for (const auto& o : powder_orientations(count, 5)) sum += couplings(pair, o, 1.0).entries[0].d;
  CHECK(std::abs(sum / count) < 3.0 / std::sqrt(static_cast<double>(count)));
}

TEST_CASE("random cluster respects radius and spacing") {
  const SiteSet s = build_random_cluster(10, 2.0, 0.6, 17, 19);
  REQUIRE(s.size() == 10);
  for (std::size_t a = 0; a < s.size(); ++a) {
    CHECK(distance(s.positions[a], {0, 0, 0}) <= 2.0);
    for (std::size_t b = a + 1; b < s.size(); ++b) CHECK(distance(s.positions[a], s.positions[b]) >= 0.6);
  }
  const SiteSet again = build_random_cluster(10, 2.0, 0.6, 17, 19);
  CHECK(again.positions == s.positions);
}

TEST_CASE("site and coupling tables round-trip exactly") {
  const SiteSet sites = build_fcc(9.334, 7, 19);
  const CouplingTable table = couplings(sites, {0.1, 0.2, 0.3}, 3.0, 8.0);
  std::stringstream a, b;
  write_sites(a, sites);
  write_couplings(b, table);
  const SiteSet s2 = read_sites(a);
  const CouplingTable t2 = read_couplings(b);
  CHECK(s2.positions == sites.positions);
  CHECK(s2.kind == sites.kind);
  REQUIRE(t2.entries.size() == table.entries.size());
  for (std::size_t k = 0; k < table.entries.size(); ++k) CHECK(t2.entries[k].d == table.entries[k].d);
  CHECK(t2.prefactor == table.prefactor);
  CHECK(t2.orientation == table.orientation);
}

TEST_CASE("geometry kind names") {
  for (GeometryKind k : {GeometryKind::fcc, GeometryKind::chain, GeometryKind::random_cluster})
    CHECK(parse_geometry_kind(to_string(k)) == k);
  CHECK_THROWS_AS((void)parse_geometry_kind("hcp"), Error);
}
