#include "singlet/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "singlet/montecarlo.hpp"
#include "singlet/singlet_model.hpp"

namespace singlet {

namespace {

double marginal_a(const JointModel& model, Spin sigma, const HiddenPair& hv, const Settings& s) {
  return model({sigma, Spin::up}, hv, s) + model({sigma, Spin::down}, hv, s);
}

double marginal_b(const JointModel& model, Spin tau, const HiddenPair& hv, const Settings& s) {
  return model({Spin::up, tau}, hv, s) + model({Spin::down, tau}, hv, s);
}

GridPoint random_point(Stream& stream, std::size_t k) {
  const Settings s{random_direction(stream), random_direction(stream)};
  if (k % 4 == 3) return {sample_hidden(build_distribution(s), stream), s};
  const UnitVec3 u = random_direction(stream);
  const UnitVec3 v = random_direction(stream);
  return {HiddenPair{u, v}, s};
}

void require_nonempty(std::size_t n, const char* what) {
  if (n == 0) throw std::invalid_argument(std::string(what) + ": empty grid");
}

}  // namespace

const char* to_string(Verdict v) noexcept { return v == Verdict::satisfied ? "satisfied" : "violated"; }

HypothesisReport make_report(std::string name, double max_deviation, std::size_t n_grid, std::size_t skipped) {
  HypothesisReport r;
  r.name = std::move(name);
  r.max_deviation = max_deviation;
  r.n_grid = n_grid;
  r.skipped = skipped;
  r.verdict = max_deviation <= r.threshold ? Verdict::satisfied : Verdict::violated;
  return r;
}

JointModel singlet_joint_model() {
  return [](const Outcome& o, const HiddenPair& hv, const Settings& s) { return p_joint_given_hv(o, hv, s); };
}

std::vector<GridPoint> hypothesis_grid(std::size_t n, std::uint64_t seed) {
  std::vector<GridPoint> grid;
  grid.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Stream stream = Stream::for_counter(seed, k, 3);
    grid.push_back(random_point(stream, k));
  }
  return grid;
}

std::vector<RemoteVariation> remote_variation_grid(std::size_t n, std::uint64_t seed) {
  std::vector<RemoteVariation> grid;
  grid.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Stream stream = Stream::for_counter(seed, k, 4);
    const GridPoint p = random_point(stream, k);
    grid.push_back({p.hidden, p.settings, random_direction(stream)});
  }
  return grid;
}

HypothesisReport check_setting_independence(std::span<const RemoteVariation> grid, const JointModel& model) {
  require_nonempty(grid.size(), "check_setting_independence");
  double worst = 0.0;
  for (const auto& point : grid) {
    const Settings moved{point.settings.a, point.b_alt};
    for (Spin sigma : kSpins) {
      worst = std::max(worst, std::abs(marginal_a(model, sigma, point.hidden, point.settings) -
                                       marginal_a(model, sigma, point.hidden, moved)));
    }
  }
  return make_report("setting_independence", worst, grid.size());
}

HypothesisReport check_outcome_independence(std::span<const GridPoint> grid, const JointModel& model) {
  require_nonempty(grid.size(), "check_outcome_independence");
  double worst = 0.0;
  std::size_t skipped = 0;
  for (const auto& point : grid) {
    for (Spin sigma : kSpins) {
      const double denominator = marginal_a(model, sigma, point.hidden, point.settings);
      if (denominator == 0.0) {
        ++skipped;
        continue;
      }
      for (Spin tau : kSpins) {
        const double conditional = model({sigma, tau}, point.hidden, point.settings) / denominator;
        const double marginal = marginal_b(model, tau, point.hidden, point.settings);
        worst = std::max(worst, std::abs(conditional - marginal));
      }
    }
  }
  return make_report("outcome_independence", worst, grid.size(), skipped);
}

HypothesisReport check_malus(std::span<const GridPoint> grid, const JointModel& model) {
  require_nonempty(grid.size(), "check_malus");
  double worst = 0.0;
  for (const auto& point : grid) {
    const double ua = dot(point.hidden.u, point.settings.a);
    const double vb = dot(point.hidden.v, point.settings.b);
    for (Spin e : kSpins) {
      const double malus_a = 0.5 * (1.0 + value(e) * ua);
      const double malus_b = 0.5 * (1.0 + value(e) * vb);
      worst = std::max(worst, std::abs(marginal_a(model, e, point.hidden, point.settings) - malus_a));
      worst = std::max(worst, std::abs(marginal_b(model, e, point.hidden, point.settings) - malus_b));
    }
  }
  return make_report("malus_law", worst, grid.size());
}

HypothesisReport check_measurement_independence(const Settings& s1, const Settings& s2) {
  return make_report("measurement_independence", measurement_dependence(s1, s2), 1);
}

HypothesisReport check_measurement_independence(std::span<const std::pair<Settings, Settings>> pairs) {
  require_nonempty(pairs.size(), "check_measurement_independence");
  double worst = 0.0;
  for (const auto& [s1, s2] : pairs) worst = std::max(worst, measurement_dependence(s1, s2));
  return make_report("measurement_independence", worst, pairs.size());
}

std::vector<HypothesisReport> hypothesis_profile(std::size_t n_grid, std::uint64_t seed) {
  const auto grid = hypothesis_grid(n_grid, seed);
  const auto remote = remote_variation_grid(n_grid, seed);
  std::vector<std::pair<Settings, Settings>> pairs;
  pairs.reserve(n_grid);
  for (std::size_t k = 0; k < n_grid; ++k) {
    Stream stream = Stream::for_counter(seed, k, 5);
    const Settings s1{random_direction(stream), random_direction(stream)};
    const Settings s2{random_direction(stream), random_direction(stream)};
    pairs.emplace_back(s1, s2);
  }
  return {check_setting_independence(remote), check_outcome_independence(grid), check_malus(grid),
          check_measurement_independence(pairs)};
}

double check_reproduction(std::span<const Settings> grid,
                          const std::function<PairDistribution(const Settings&)>& dist_for) {
  if (grid.empty()) throw std::invalid_argument("check_reproduction: empty grid");
  double worst = 0.0;
  for (const Settings& s : grid) {
    const JointTable hv = averaged_table(s, dist_for(s));
    worst = std::max(worst, hv.max_abs_difference(qm_singlet_table(s)));
  }
  return worst;
}

double check_reproduction(std::span<const Settings> grid) {
  return check_reproduction(grid, [](const Settings& s) { return build_distribution(s); });
}

Correlator model_correlator() {
  return [](const UnitVec3& a, const UnitVec3& b) { return correlator(Settings{a, b}); };
}

Correlator underweighted_correlator() {
  return [](const UnitVec3& a, const UnitVec3& b) {
    const Settings s{a, b};
    return correlator(s, build_unnormalized_distribution(s, 0.25));
  };
}

ChshSettings optimal_chsh_settings() {
  return {planar_direction_deg(0.0), planar_direction_deg(90.0), planar_direction_deg(45.0),
          planar_direction_deg(135.0)};
}

double chsh_value(const ChshSettings& s, const Correlator& e) {
  return std::abs(e(s.a, s.b) - e(s.a, s.b2)) + std::abs(e(s.a2, s.b) + e(s.a2, s.b2));
}

std::vector<DeterministicStrategy> enumerate_deterministic_strategies() {
  // Four distinct labels; the correlator looks up which setting it was handed.
  const ChshSettings labels{UnitVec3::ex(), UnitVec3::ey(), UnitVec3::ez(), -UnitVec3::ez()};
  std::vector<DeterministicStrategy> out;
  out.reserve(16);
  for (int mask = 0; mask < 16; ++mask) {
    DeterministicStrategy st{mask & 1 ? -1 : 1, mask & 2 ? -1 : 1, mask & 4 ? -1 : 1, mask & 8 ? -1 : 1, 0.0};
    const Correlator product = [&](const UnitVec3& x, const UnitVec3& y) {
      const int f = x == labels.a ? st.f_a : st.f_a2;
      const int g = y == labels.b ? st.g_b : st.g_b2;
      return static_cast<double>(f * g);
    };
    st.s = chsh_value(labels, product);
    out.push_back(st);
  }
  return out;
}

double classical_bound_oracle() {
  double best = 0.0;
  for (const auto& st : enumerate_deterministic_strategies()) best = std::max(best, st.s);
  return best;
}

ChshResult make_chsh_result(const ChshSettings& settings, double s) {
  const double bound = classical_bound_oracle();
  return {settings, s, bound, s > bound + ChshResult::kMargin};
}

ChshResult chsh_optimize(const Correlator& e, std::size_t resolution) {
  if (resolution < 8) throw std::invalid_argument("chsh_optimize: resolution must be at least 8");
  std::vector<UnitVec3> dirs;
  dirs.reserve(resolution);
  for (std::size_t i = 0; i < resolution; ++i) dirs.push_back(planar_direction_deg(360.0 * i / resolution));

  // table[i * R + j] = E(dir_i, dir_j), A's setting first.
  const std::size_t r = resolution;
  std::vector<double> table(r * r);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) table[i * r + j] = e(dirs[i], dirs[j]);
  }

  // For fixed (b, b') the two terms of S decouple: the first depends on a only,
  // the second on a' only.
  double best = -1.0;
  std::size_t best_a = 0, best_a2 = 0, best_b = 0, best_b2 = 0;
  for (std::size_t j = 0; j < r; ++j) {
    for (std::size_t k = 0; k < r; ++k) {
      double diff = -1.0, sum = -1.0;
      std::size_t arg_diff = 0, arg_sum = 0;
      for (std::size_t i = 0; i < r; ++i) {
        const double ej = table[i * r + j];
        const double ek = table[i * r + k];
        if (const double d = std::abs(ej - ek); d > diff) diff = d, arg_diff = i;
        if (const double s = std::abs(ej + ek); s > sum) sum = s, arg_sum = i;
      }
      if (diff + sum > best) {
        best = diff + sum;
        best_a = arg_diff, best_a2 = arg_sum, best_b = j, best_b2 = k;
      }
    }
  }
  const ChshSettings found{dirs[best_a], dirs[best_a2], dirs[best_b], dirs[best_b2]};
  return make_chsh_result(found, chsh_value(found, e));
}

EmpiricalChsh empirical_chsh(const ChshSettings& settings, std::uint64_t n, std::uint64_t seed, unsigned threads) {
  const std::array<Settings, 4> runs{Settings{settings.a, settings.b}, Settings{settings.a, settings.b2},
                                     Settings{settings.a2, settings.b}, Settings{settings.a2, settings.b2}};
  std::array<CorrelatorEstimate, 4> e{};
  for (std::size_t k = 0; k < runs.size(); ++k) {
    e[k] = empirical_correlator(run_experiment(runs[k], n, derive_seed(seed, k, 2), ExperimentOptions{threads, {}}));
  }
  const double s = std::abs(e[0].value - e[1].value) + std::abs(e[2].value + e[3].value);
  double var = 0.0;
  for (const auto& x : e) var += x.std_error * x.std_error;
  return {s, std::sqrt(var)};
}

void to_json(nlohmann::json& j, const HypothesisReport& r) {
  j = nlohmann::json{{"name", r.name},         {"max_deviation", r.max_deviation},  {"n_grid", r.n_grid},
                     {"skipped", r.skipped},   {"threshold", r.threshold},          {"verdict", to_string(r.verdict)}};
}

void to_json(nlohmann::json& j, const ChshSettings& s) {
  j = nlohmann::json{{"a", s.a}, {"a2", s.a2}, {"b", s.b}, {"b2", s.b2}};
}

void to_json(nlohmann::json& j, const ChshResult& r) {
  j = nlohmann::json{{"settings", r.settings}, {"S", r.s}, {"bound", r.classical_bound}, {"violated", r.violated}};
}

}  // namespace singlet
