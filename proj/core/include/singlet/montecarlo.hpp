#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "singlet/hv_distribution.hpp"
#include "singlet/model_types.hpp"
#include "singlet/random.hpp"

namespace singlet {

/// Outcome counts of a fixed-settings run. Cells use JointTable::index order.
struct Tally {
  Settings settings;
  std::uint64_t seed = 0;
  std::uint64_t n_trials = 0;
  std::array<std::uint64_t, 4> counts{};

  std::uint64_t count(Spin sigma, Spin tau) const noexcept { return counts[JointTable::index(sigma, tau)]; }
  void record(const Outcome& o) noexcept {
    ++counts[JointTable::index(o.sigma, o.tau)];
    ++n_trials;
  }
  /// Adds the counts of `other`. Associative and order independent.
  void merge(const Tally& other) noexcept;

  friend bool operator==(const Tally&, const Tally&) = default;
};

struct EventRecord {
  std::uint64_t trial;
  HiddenPair hidden;
  Outcome outcome;
  Settings settings;
};

/// Returns atom i with probability w_i / W, using one uniform from `stream`.
HiddenPair sample_hidden(const PairDistribution& d, Stream& stream);

/// sigma from P_A(sigma | u, a), then tau from P(tau | sigma, v, b); one uniform each.
Outcome sample_outcomes(const HiddenPair& hv, const Settings& s, Stream& stream);

struct ExperimentOptions {
  /// Worker threads. Tallies are identical for any thread count.
  unsigned threads = 1;
  /// Called for every trial in index order. Forces a single thread.
  std::function<void(const EventRecord&)> on_event;
};

/// n independent trials of sample_hidden then sample_outcomes. Trial i draws
/// from the substream Stream::for_counter(seed, i), so the result depends only
/// on (settings, n, seed). Throws std::invalid_argument for n = 0.
Tally run_experiment(const Settings& s, std::uint64_t n, std::uint64_t seed, const ExperimentOptions& options = {});

/// Frequencies with binomial standard errors sqrt(p(1-p)/n).
/// Throws std::invalid_argument for an empty tally.
JointTable tally_to_joint(const Tally& t);

struct CorrelatorEstimate {
  double value;
  double std_error;
};

/// Mean of sigma*tau with standard error sqrt((1 - E^2) / n).
CorrelatorEstimate empirical_correlator(const Tally& t);

struct SweepPoint {
  double angle_deg;
  double exact;
  double empirical;
  double std_error;
};

/// Correlation curve: a = e_x, b at each angle in the x-y plane, n trials per
/// point with seed derive_seed(seed, point index, 1).
std::vector<SweepPoint> sweep(std::span<const double> angles_deg, std::uint64_t n, std::uint64_t seed,
                              unsigned threads = 1);

/// trial,u_x,u_y,u_z,v_x,v_y,v_z,sigma,tau
void write_event_csv_header(std::ostream& os);
void write_event_csv_row(std::ostream& os, const EventRecord& e);

/// angle,E_exact,E_emp,stderr
void write_sweep_csv(std::ostream& os, std::span<const SweepPoint> points);

/// {settings, n, counts, freqs, stderr, seed}
void to_json(nlohmann::json& j, const Tally& t);

}  // namespace singlet
