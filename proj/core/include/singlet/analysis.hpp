#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "singlet/hv_distribution.hpp"
#include "singlet/model_types.hpp"

namespace singlet {

enum class Verdict { satisfied, violated };

const char* to_string(Verdict v) noexcept;

/// Outcome of one hypothesis check. verdict is satisfied iff max_deviation <= threshold.
struct HypothesisReport {
  static constexpr double kThreshold = 1e-10;

  std::string name;
  double max_deviation = 0.0;
  std::size_t n_grid = 0;
  /// Grid points left out because a conditional probability was undefined.
  std::size_t skipped = 0;
  double threshold = kThreshold;
  Verdict verdict = Verdict::satisfied;
};

HypothesisReport make_report(std::string name, double max_deviation, std::size_t n_grid, std::size_t skipped = 0);

/// P(sigma, tau | u, v, Sigma) of some hidden-variable model. Checkers derive
/// marginals and conditionals from the joint by summation, so any model (the
/// singlet model or a counter-model) can be audited the same way.
using JointModel = std::function<double(const Outcome&, const HiddenPair&, const Settings&)>;

/// The singlet model, p_joint_given_hv.
JointModel singlet_joint_model();

struct GridPoint {
  HiddenPair hidden;
  Settings settings;
};

struct RemoteVariation {
  HiddenPair hidden;
  Settings settings;
  UnitVec3 b_alt;
};

/// Seeded grid of random settings and hidden pairs. Every fourth point carries
/// a hidden pair drawn from the model distribution's atoms, which exercises the
/// aligned (degenerate) cases.
std::vector<GridPoint> hypothesis_grid(std::size_t n, std::uint64_t seed);

/// hypothesis_grid plus an independent alternative setting for station B.
std::vector<RemoteVariation> remote_variation_grid(std::size_t n, std::uint64_t seed);

/// max |P_A(sigma | hv, {a, b}) - P_A(sigma | hv, {a, b'})|.
HypothesisReport check_setting_independence(std::span<const RemoteVariation> grid,
                                            const JointModel& model = singlet_joint_model());

/// max |Q_B(tau | sigma, hv, Sigma) - P_B(tau | hv, Sigma)|, both computed from
/// the joint. Points where sum_tau' P(sigma, tau') = 0 are skipped and counted.
HypothesisReport check_outcome_independence(std::span<const GridPoint> grid,
                                            const JointModel& model = singlet_joint_model());

/// Max deviation of both stations' marginals from (1 + e u_j.n_j) / 2.
HypothesisReport check_malus(std::span<const GridPoint> grid, const JointModel& model = singlet_joint_model());

/// measurement_dependence over setting pairs; satisfied only if every pair gives 0.
HypothesisReport check_measurement_independence(const Settings& s1, const Settings& s2);
HypothesisReport check_measurement_independence(std::span<const std::pair<Settings, Settings>> pairs);

/// The four reports for the singlet model on seeded grids of size n_grid.
/// Measurement independence is probed on n_grid pairs of random settings.
std::vector<HypothesisReport> hypothesis_profile(std::size_t n_grid, std::uint64_t seed);

/// max over grid and (sigma, tau) of |P^HV - P^QM| for the distribution built by
/// `dist_for` (the model distribution by default).
double check_reproduction(std::span<const Settings> grid);
double check_reproduction(std::span<const Settings> grid,
                          const std::function<PairDistribution(const Settings&)>& dist_for);

// --- CHSH -----------------------------------------------------------------

/// E(a, b), the expected product of outcomes.
using Correlator = std::function<double(const UnitVec3&, const UnitVec3&)>;

/// -a.b evaluated through the hidden-variable distribution.
Correlator model_correlator();

/// Correlator of the model with its distribution rescaled to total weight 1/4.
Correlator underweighted_correlator();

struct ChshSettings {
  UnitVec3 a;
  UnitVec3 a2;
  UnitVec3 b;
  UnitVec3 b2;
};

/// Coplanar a = 0, a' = 90, b = 45, b' = 135 degrees.
ChshSettings optimal_chsh_settings();

/// S = |E(a,b) - E(a,b')| + |E(a',b) + E(a',b')|
double chsh_value(const ChshSettings& s, const Correlator& e);

/// sigma = f(setting of A), tau = g(setting of B).
struct DeterministicStrategy {
  int f_a;
  int f_a2;
  int g_b;
  int g_b2;
  double s;
};

/// All 16 deterministic local strategies with their S values.
std::vector<DeterministicStrategy> enumerate_deterministic_strategies();

/// max S over enumerate_deterministic_strategies().
double classical_bound_oracle();

struct ChshResult {
  static constexpr double kMargin = 1e-12;

  ChshSettings settings;
  double s;
  double classical_bound;
  bool violated;
};

ChshResult make_chsh_result(const ChshSettings& settings, double s);

/// Exhaustive search of coplanar settings on a grid of `resolution` angles per
/// full turn. Throws std::invalid_argument for resolution < 8.
ChshResult chsh_optimize(const Correlator& e, std::size_t resolution);

struct EmpiricalChsh {
  double s;
  double std_error;
};

/// S from four Monte Carlo runs of n trials each. Run k uses derive_seed(seed, k, 2).
EmpiricalChsh empirical_chsh(const ChshSettings& settings, std::uint64_t n, std::uint64_t seed, unsigned threads = 1);

void to_json(nlohmann::json& j, const HypothesisReport& r);
void to_json(nlohmann::json& j, const ChshSettings& s);
void to_json(nlohmann::json& j, const ChshResult& r);

}  // namespace singlet
