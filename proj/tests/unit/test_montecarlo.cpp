#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "singlet/montecarlo.hpp"
#include "singlet/singlet_model.hpp"

using namespace singlet;

namespace {

const UnitVec3 ex = UnitVec3::ex();
const UnitVec3 ey = UnitVec3::ey();

}  // namespace

TEST_CASE("sample_hidden") {
  SUBCASE("single atom") {
    const auto d = PairDistribution::from_atoms({{1.0, HiddenPair{ex, -ex}}});
    Stream st(1);
    for (int i = 0; i < 100; ++i) REQUIRE(sample_hidden(d, st) == HiddenPair{ex, -ex});
  }
  SUBCASE("four atoms of 1/4") {
    const auto d = build_distribution({ex, ey});
    constexpr int n = 100000;
    std::vector<int> hits(4, 0);
    Stream st(2);
    for (int i = 0; i < n; ++i) {
      const HiddenPair hv = sample_hidden(d, st);
      for (std::size_t k = 0; k < 4; ++k) {
        if (hv == d.atoms()[k].point) ++hits[k];
      }
    }
    const double tol = 4 * std::sqrt(0.25 * 0.75 / n);
    for (int h : hits) CHECK(std::abs(h / double(n) - 0.25) <= tol);
  }
  SUBCASE("a = b: two atoms of 1/2") {
    const auto d = build_distribution({ex, ex});
    constexpr int n = 100000;
    int first = 0;
    Stream st(3);
    for (int i = 0; i < n; ++i) first += sample_hidden(d, st) == d.atoms()[0].point;
    CHECK(std::abs(first / double(n) - 0.5) <= 4 * std::sqrt(0.25 / n));
  }
}

TEST_CASE("sample_outcomes") {
  const Settings s{ex, ey};
  Stream st(4);
  for (int i = 0; i < 1000; ++i) {
    REQUIRE(sample_outcomes({s.a, s.b}, s, st) == Outcome{Spin::up, Spin::up});
    REQUIRE(sample_outcomes({s.a, -s.b}, s, st) == Outcome{Spin::up, Spin::down});
  }
  constexpr int n = 100000;
  int up = 0;
  for (int i = 0; i < n; ++i) up += sample_outcomes({UnitVec3::ez(), s.b}, s, st).sigma == Spin::up;
  CHECK(std::abs(up / double(n) - 0.5) <= 4 * std::sqrt(0.25 / n));
}

TEST_CASE("run_experiment") {
  SUBCASE("equal settings are perfectly anticorrelated") {
    const Tally t = run_experiment({ex, ex}, 20000, 5);
    CHECK(t.count(Spin::up, Spin::up) == 0);
    CHECK(t.count(Spin::down, Spin::down) == 0);
    CHECK(t.n_trials == 20000);
  }
  SUBCASE("orthogonal settings give 1/4 per cell") {
    constexpr std::uint64_t n = 1000000;
    const Tally t = run_experiment({ex, ey}, n, 6);
    const double tol = 4 * std::sqrt(3.0 / 16.0 / n);
    for (auto c : t.counts) CHECK(std::abs(c / double(n) - 0.25) <= tol);
  }
  SUBCASE("deterministic and thread independent") {
    const Settings s{ex, planar_direction_deg(30.0)};
    const Tally t1 = run_experiment(s, 50000, 77);
    const Tally t2 = run_experiment(s, 50000, 77);
    const Tally t4 = run_experiment(s, 50000, 77, {4, {}});
    CHECK(t1 == t2);
    CHECK(t1 == t4);
    CHECK_FALSE(t1 == run_experiment(s, 50000, 78));
  }
  SUBCASE("n = 0 rejected") { CHECK_THROWS_AS(run_experiment({ex, ey}, 0, 1), std::invalid_argument); }
}

TEST_CASE("tally merge is order independent") {
  const Settings s{ex, ey};
  const Tally a = run_experiment(s, 1000, 1);
  const Tally b = run_experiment(s, 2000, 2);
  const Tally c = run_experiment(s, 3000, 3);
  Tally left{s}, right{s};
  left.merge(a);
  left.merge(b);
  left.merge(c);
  right.merge(c);
  right.merge(a);
  right.merge(b);
  CHECK(left.counts == right.counts);
  CHECK(left.n_trials == 6000);
}

TEST_CASE("tally_to_joint") {
  Tally t{{ex, ey}};
  t.counts = {250, 250, 250, 250};
  t.n_trials = 1000;
  const JointTable j = tally_to_joint(t);
  for (double p : j.p) CHECK(p == 0.25);
  // sqrt(0.25 * 0.75 / 1000)
  for (double e : *j.std_error) CHECK(e == doctest::Approx(0.0136930639376291).epsilon(1e-12));
  CHECK(j.sum() == 1.0);

  t.counts = {1000, 0, 0, 0};
  const JointTable k = tally_to_joint(t);
  CHECK(k.p == std::array<double, 4>{1.0, 0.0, 0.0, 0.0});

  CHECK_THROWS_AS(tally_to_joint(Tally{{ex, ey}}), std::invalid_argument);
}

TEST_CASE("empirical correlator agrees with -a.b") {
  constexpr std::uint64_t n = 200000;
  for (double angle : {0.0, 30.0, 45.0, 90.0, 135.0, 180.0}) {
    const Settings s{ex, planar_direction_deg(angle)};
    const CorrelatorEstimate e = empirical_correlator(run_experiment(s, n, 100 + angle));
    const double ab = dot(s.a, s.b);
    CHECK(std::abs(e.value + ab) <= 4 * std::sqrt((1 - ab * ab) / n) + 1e-12);
  }
}

TEST_CASE("oracle convergence over seeds at n = 1e6") {
  // >= 99 of 100 seeded runs must have every cell within 4 stderr.
  constexpr std::uint64_t n = 1000000;
  int good = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Stream st(derive_seed(seed, 0, 99));
    const Settings s{random_direction(st), random_direction(st)};
    const JointTable emp = tally_to_joint(run_experiment(s, n, seed));
    bool ok = true;
    for (Spin x : kSpins) {
      for (Spin y : kSpins) {
        const std::size_t i = JointTable::index(x, y);
        const double exact = p_joint_averaged({x, y}, s);
        const double se = std::sqrt(exact * (1 - exact) / n);
        ok = ok && std::abs(emp.p[i] - exact) < 4 * se;
      }
    }
    good += ok;
  }
  CHECK(good >= 99);
}

TEST_CASE("event stream is reproducible") {
  const Settings s{ex, planar_direction_deg(60.0)};
  auto record = [&](std::uint64_t seed) {
    std::ostringstream os;
    write_event_csv_header(os);
    run_experiment(s, 500, seed, {1, [&](const EventRecord& e) { write_event_csv_row(os, e); }});
    return os.str();
  };
  const std::string first = record(9);
  CHECK(first == record(9));
  CHECK(first != record(10));
  CHECK(first.rfind("trial,u_x,u_y,u_z,v_x,v_y,v_z,sigma,tau\n", 0) == 0);

  // Every sampled hidden pair is one of the distribution's atoms exactly.
  const auto d = build_distribution(s);
  run_experiment(s, 500, 9, {1, [&](const EventRecord& e) {
                   bool found = false;
                   for (const auto& atom : d.atoms()) found = found || atom.point == e.hidden;
                   REQUIRE(found);
                 }});
}

TEST_CASE("sweep") {
  std::vector<double> angles;
  for (int a = 0; a <= 180; a += 5) angles.push_back(a);
  constexpr std::uint64_t n = 100000;
  const auto points = sweep(angles, n, 12);
  REQUIRE(points.size() == angles.size());
  for (const auto& p : points) {
    CHECK(p.exact == doctest::Approx(-std::cos(p.angle_deg * M_PI / 180)).epsilon(1e-12));
    const double band = 4 * std::sqrt((1 - p.exact * p.exact) / n);
    CHECK(std::abs(p.empirical - p.exact) <= band + 1e-12);
  }
  CHECK_THROWS_AS(sweep({}, 10, 1), std::invalid_argument);
}

TEST_CASE("tally JSON") {
  const Tally t = run_experiment({ex, ey}, 100, 3);
  const nlohmann::json j = t;
  for (const char* key : {"settings", "n", "counts", "freqs", "stderr", "seed"}) CHECK(j.contains(key));
  CHECK(j["seed"] == 3);
  CHECK(j["n"] == 100);
}
