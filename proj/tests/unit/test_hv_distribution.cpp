#include <doctest.h>

#include <cmath>
#include <type_traits>

#include <nlohmann/json.hpp>

#include "singlet/hv_distribution.hpp"

using namespace singlet;

namespace {

template <class X, class Y>
concept tv_comparable = requires(const X& x, const Y& y) { tv_distance(x, y); };

const UnitVec3 ex = UnitVec3::ex();
const UnitVec3 ey = UnitVec3::ey();
const UnitVec3 ez = UnitVec3::ez();

}  // namespace

static_assert(tv_comparable<PairDistribution, PairDistribution>);
static_assert(tv_comparable<DirectionDistribution, DirectionDistribution>);
static_assert(!tv_comparable<PairDistribution, DirectionDistribution>, "space mismatch must not compile");

TEST_CASE("build_distribution atom structure") {
  SUBCASE("orthogonal settings: four atoms of 1/4") {
    const auto d = build_distribution({ex, ey});
    REQUIRE(d.size() == 4);
    for (const auto& atom : d.atoms()) CHECK(atom.weight == 0.25);
    CHECK(d.weight_at({ex, -ex}) == 0.25);
    CHECK(d.weight_at({-ey, ey}) == 0.25);
  }
  SUBCASE("a = b merges to two atoms of 1/2") {
    const auto d = build_distribution({ex, ex});
    REQUIRE(d.size() == 2);
    CHECK(d.weight_at({ex, -ex}) == 0.5);
    CHECK(d.weight_at({-ex, ex}) == 0.5);
  }
  SUBCASE("a = -b merges to two atoms of 1/2") {
    const auto d = build_distribution({ex, -ex});
    REQUIRE(d.size() == 2);
    CHECK(d.weight_at({ex, -ex}) == 0.5);
  }
}

TEST_CASE("distribution invariants on random settings") {
  Stream st(3);
  for (int i = 0; i < 500; ++i) {
    const Settings s{random_direction(st), random_direction(st)};
    const auto d = build_distribution(s);
    REQUIRE(d.size() >= 2);
    REQUIRE(d.size() <= 4);
    REQUIRE(std::abs(d.total_weight() - 1.0) <= 1e-12);
    for (const auto& atom : d.atoms()) REQUIRE(atom.point.u == -atom.point.v);
  }
}

TEST_CASE("from_atoms validation and merging") {
  using A = Atom<UnitVec3>;
  CHECK_THROWS_AS(DirectionDistribution::from_atoms({}), std::invalid_argument);
  CHECK_THROWS_AS(DirectionDistribution::from_atoms({A{0.0, ex}, A{1.0, ey}}), std::invalid_argument);
  CHECK_THROWS_AS(DirectionDistribution::from_atoms({A{-0.5, ex}, A{1.5, ey}}), std::invalid_argument);
  CHECK_THROWS_AS(DirectionDistribution::from_atoms({A{0.5, ex}}), std::invalid_argument);
  CHECK_NOTHROW(DirectionDistribution::from_atoms({A{0.5, ex}}, Normalization::unchecked));

  // Points 1e-10 apart merge; points 1e-6 apart do not.
  const UnitVec3 near = UnitVec3::normalized(1.0, 1e-10, 0.0);
  const UnitVec3 far = UnitVec3::normalized(1.0, 1e-6, 0.0);
  CHECK(DirectionDistribution::from_atoms({A{0.5, ex}, A{0.5, near}}).size() == 1);
  CHECK(DirectionDistribution::from_atoms({A{0.5, ex}, A{0.5, far}}).size() == 2);
}

TEST_CASE("marginal_u") {
  const auto generic = marginal_u(build_distribution({ex, ey}));
  REQUIRE(generic.size() == 4);
  for (const UnitVec3& p : {ex, -ex, ey, -ey}) CHECK(generic.weight_at(p) == 0.25);
  CHECK(generic.total_weight() == 1.0);

  const auto same = marginal_u(build_distribution({ex, ex}));
  REQUIRE(same.size() == 2);
  CHECK(same.weight_at(ex) == 0.5);
  CHECK(same.weight_at(-ex) == 0.5);

  // The u-marginal seen at A moves when only B's setting changes.
  const auto moved = marginal_u(build_distribution({ex, ez}));
  CHECK(tv_distance(generic, moved) == doctest::Approx(0.5));
}

TEST_CASE("tv_distance") {
  const auto d1 = build_distribution({ex, ey});
  CHECK(tv_distance(d1, d1) == 0.0);
  // Disjoint supports.
  CHECK(tv_distance(d1, build_distribution({ez, planar_direction_deg(45.0)})) == doctest::Approx(1.0));
  // a -> a' with a, b, a' distinct axes: the +-a atoms (mass 1/2) move.
  CHECK(tv_distance(d1, build_distribution({ez, ey})) == doctest::Approx(0.5));
  // Symmetric.
  const auto d2 = build_distribution({ex, ex});
  CHECK(tv_distance(d1, d2) == doctest::Approx(tv_distance(d2, d1)));
  // d2 = {+-a: 1/2}; overlap with d1 is 1/4 at each of +-a.
  CHECK(tv_distance(d1, d2) == doctest::Approx(0.5));
}

TEST_CASE("measurement_dependence") {
  const Settings s{ex, ey};
  CHECK(measurement_dependence(s, s) == 0.0);
  CHECK(measurement_dependence(s, {ey, ex}) == 0.0);
  CHECK(measurement_dependence(s, {-ex, ey}) == 0.0);
  CHECK(measurement_dependence(s, {ez, planar_direction_deg(45.0)}) == doctest::Approx(1.0));
  CHECK(measurement_dependence(s, {ex, ez}) == doctest::Approx(0.5));

  Stream st(8);
  for (int i = 0; i < 200; ++i) {
    const Settings s1{random_direction(st), random_direction(st)};
    const Settings s2{random_direction(st), random_direction(st)};
    REQUIRE(measurement_dependence(s1, s2) > 0.0);
  }
}

TEST_CASE("JSON layout") {
  const nlohmann::json j = build_distribution({ex, ey});
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 4);
  CHECK(j[0]["w"] == 0.25);
  CHECK(j[0]["u"] == nlohmann::json::array({1.0, 0.0, 0.0}));
  CHECK(j[0]["v"] == nlohmann::json::array({-1.0, -0.0, -0.0}));

  const nlohmann::json m = marginal_u(build_distribution({ex, ey}));
  CHECK(m[0].contains("u"));
  CHECK_FALSE(m[0].contains("v"));
}
