#include <doctest.h>

#include <cmath>

#include "singlet/singlet_model.hpp"

using namespace singlet;

namespace {

constexpr double kTol = 1e-12;

const Outcome kUpUp{Spin::up, Spin::up};

// Direction in the x-y plane with the given cosine to e_x.
UnitVec3 with_cos(double c) { return UnitVec3::normalized(c, std::sqrt(1.0 - c * c), 0.0); }

struct RandomCase {
  HiddenPair hv;
  Settings s;
};

RandomCase random_case(Stream& st) {
  return {{random_direction(st), random_direction(st)}, {random_direction(st), random_direction(st)}};
}

}  // namespace

TEST_CASE("spin helpers") {
  CHECK(spin_from_int(1) == Spin::up);
  CHECK(spin_from_int(-1) == Spin::down);
  CHECK_THROWS_AS(spin_from_int(0), std::invalid_argument);
  CHECK(flip(Spin::up) == Spin::down);
}

TEST_CASE("p_joint_given_hv examples") {
  const Settings s{UnitVec3::ex(), UnitVec3::ey()};
  CHECK(p_joint_given_hv(kUpUp, {s.a, s.b}, s) == 1.0);

  const HiddenPair unbiased{UnitVec3::ez(), UnitVec3::ez()};
  for (Spin x : kSpins) {
    for (Spin y : kSpins) CHECK(p_joint_given_hv({x, y}, unbiased, s) == 0.25);
  }

  // u.a = 0.5, v.b = -0.5: (1/4)(1.5)(0.5)
  const Settings sx{UnitVec3::ex(), UnitVec3::ex()};
  const HiddenPair hv{with_cos(0.5), with_cos(-0.5)};
  CHECK(p_joint_given_hv(kUpUp, hv, sx) == doctest::Approx(0.1875).epsilon(kTol));
}

TEST_CASE("p_marginal_a examples") {
  const Settings s{UnitVec3::ex(), UnitVec3::ey()};
  CHECK(p_marginal_a(Spin::up, {s.a, UnitVec3::ez()}, s) == 1.0);
  CHECK(p_marginal_a(Spin::up, {UnitVec3::ez(), UnitVec3::ez()}, s) == 0.5);
  CHECK(p_marginal_a(Spin::down, {with_cos(0.6), UnitVec3::ez()}, s) == doctest::Approx(0.2).epsilon(kTol));
}

TEST_CASE("p_cond_b_given_a examples and degeneracy") {
  const Settings s{UnitVec3::ex(), UnitVec3::ey()};
  for (Spin sigma : kSpins) {
    CHECK(p_cond_b_given_a(Spin::up, sigma, {UnitVec3::ez(), s.b}, s).value == 1.0);
    CHECK(p_cond_b_given_a(Spin::down, sigma, {UnitVec3::ez(), UnitVec3::ez()}, s).value == 0.5);
  }
  const Settings sx{UnitVec3::ex(), UnitVec3::ex()};
  const HiddenPair hv{UnitVec3::ez(), with_cos(-0.5)};
  const auto up = p_cond_b_given_a(Spin::up, Spin::up, hv, sx);
  const auto down = p_cond_b_given_a(Spin::up, Spin::down, hv, sx);
  CHECK(up.value == doctest::Approx(0.25).epsilon(kTol));
  CHECK(up.value == down.value);

  // u = -a with sigma = +1 has P_A = 0: flagged, closed form still returned.
  const HiddenPair aligned{-s.a, s.b};
  const auto degenerate = p_cond_b_given_a(Spin::up, Spin::up, aligned, s);
  CHECK(degenerate.degenerate);
  CHECK(degenerate.value == 1.0);
  CHECK_FALSE(p_cond_b_given_a(Spin::up, Spin::down, aligned, s).degenerate);
}

TEST_CASE("normalization, factorization and setting independence on random inputs") {
  Stream st(11);
  for (int i = 0; i < 1000; ++i) {
    const auto [hv, s] = random_case(st);
    double total = 0.0;
    for (Spin x : kSpins) {
      for (Spin y : kSpins) {
        const double joint = p_joint_given_hv({x, y}, hv, s);
        total += joint;
        REQUIRE(joint >= 0.0);
        REQUIRE(joint <= 1.0);
        const double factored = p_marginal_a(x, hv, s) * p_cond_b_given_a(y, x, hv, s).value;
        REQUIRE(std::abs(joint - factored) <= kTol);
        // Conditional equals joint / marginal wherever the marginal is nonzero.
        const double ma = p_marginal_a(x, hv, s);
        if (ma > 1e-6) REQUIRE(std::abs(p_cond_b_given_a(y, x, hv, s).value - joint / ma) <= 1e-10);
      }
    }
    REQUIRE(std::abs(total - 1.0) <= kTol);

    const Settings moved{s.a, random_direction(st)};
    for (Spin x : kSpins) REQUIRE(p_marginal_a(x, hv, s) == p_marginal_a(x, hv, moved));
  }
}

TEST_CASE("p_joint_averaged reproduces the singlet") {
  const Settings same{UnitVec3::ex(), UnitVec3::ex()};
  CHECK(p_joint_averaged(kUpUp, same) == doctest::Approx(0.0).epsilon(kTol));
  CHECK(p_joint_averaged({Spin::down, Spin::down}, same) == doctest::Approx(0.0).epsilon(kTol));
  CHECK(p_joint_averaged({Spin::up, Spin::down}, same) == doctest::Approx(0.5).epsilon(kTol));

  const Settings orth{UnitVec3::ex(), UnitVec3::ey()};
  for (Spin x : kSpins) {
    for (Spin y : kSpins) CHECK(std::abs(p_joint_averaged({x, y}, orth) - 0.25) <= kTol);
  }

  const Settings sixty{UnitVec3::ex(), planar_direction_deg(60.0)};
  CHECK(std::abs(p_joint_averaged(kUpUp, sixty) - 0.125) <= kTol);
  CHECK(std::abs(p_joint_averaged({Spin::down, Spin::down}, sixty) - 0.125) <= kTol);

  // 10x10 grid of coplanar settings against the independent QM evaluator.
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const Settings s{planar_direction_deg(36.0 * i), planar_direction_deg(17.0 + 36.0 * j)};
      worst = std::max(worst, averaged_table(s).max_abs_difference(qm_singlet_table(s)));
    }
  }
  CHECK(worst <= kTol);
}

TEST_CASE("qm_singlet_joint") {
  const Settings anti{UnitVec3::ex(), -UnitVec3::ex()};
  CHECK(qm_singlet_joint(kUpUp, anti) == doctest::Approx(0.5).epsilon(kTol));
  Stream st(5);
  for (int i = 0; i < 100; ++i) {
    const Settings s{random_direction(st), random_direction(st)};
    REQUIRE(std::abs(qm_singlet_table(s).sum() - 1.0) <= kTol);
    REQUIRE(averaged_table(s).max_abs_difference(qm_singlet_table(s)) <= kTol);
  }
}

TEST_CASE("correlator") {
  CHECK(correlator({UnitVec3::ex(), UnitVec3::ex()}) == doctest::Approx(-1.0).epsilon(kTol));
  CHECK(std::abs(correlator({UnitVec3::ex(), UnitVec3::ey()})) <= kTol);

  Stream st(9);
  for (int i = 0; i < 200; ++i) {
    const Settings s{random_direction(st), random_direction(st)};
    const double e = correlator(s);
    REQUIRE(std::abs(e) <= 1.0 + kTol);
    REQUIRE(std::abs(e + dot(s.a, s.b)) <= kTol);
    // Rescaling the distribution to total weight 1/4 scales the correlator by 1/4.
    REQUIRE(std::abs(correlator(s, build_unnormalized_distribution(s, 0.25)) + dot(s.a, s.b) / 4) <= kTol);
  }
}
