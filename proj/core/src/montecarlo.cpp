#include "singlet/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "singlet/singlet_model.hpp"

namespace singlet {

namespace {

constexpr std::array<const char*, 4> kCellNames{"++", "+-", "-+", "--"};

void run_range(const PairDistribution& dist, const Settings& s, std::uint64_t seed, std::uint64_t begin,
               std::uint64_t end, Tally& tally, const std::function<void(const EventRecord&)>& on_event) {
  for (std::uint64_t i = begin; i < end; ++i) {
    Stream stream = Stream::for_counter(seed, i);
    const HiddenPair hv = sample_hidden(dist, stream);
    const Outcome out = sample_outcomes(hv, s, stream);
    tally.record(out);
    if (on_event) on_event(EventRecord{i, hv, out, s});
  }
}

}  // namespace

void Tally::merge(const Tally& other) noexcept {
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  n_trials += other.n_trials;
}

HiddenPair sample_hidden(const PairDistribution& d, Stream& stream) {
  const auto atoms = d.atoms();
  const double target = stream.uniform() * d.total_weight();
  double cumulative = 0.0;
  for (const auto& atom : atoms) {
    cumulative += atom.weight;
    if (target < cumulative) return atom.point;
  }
  return atoms.back().point;
}

Outcome sample_outcomes(const HiddenPair& hv, const Settings& s, Stream& stream) {
  const Spin sigma = stream.uniform() < p_marginal_a(Spin::up, hv, s) ? Spin::up : Spin::down;
  const Spin tau = stream.uniform() < p_cond_b_given_a(Spin::up, sigma, hv, s).value ? Spin::up : Spin::down;
  return {sigma, tau};
}

Tally run_experiment(const Settings& s, std::uint64_t n, std::uint64_t seed, const ExperimentOptions& options) {
  if (n == 0) throw std::invalid_argument("run_experiment: n must be at least 1");
  const PairDistribution dist = build_distribution(s);
  Tally total{s, seed};

  const unsigned threads = options.on_event ? 1u : std::max(1u, options.threads);
  if (threads == 1 || n < 2 * threads) {
    run_range(dist, s, seed, 0, n, total, options.on_event);
    return total;
  }

  std::vector<Tally> partial(threads, Tally{s, seed});
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  const std::uint64_t chunk = n / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const std::uint64_t begin = w * chunk;
    const std::uint64_t end = w + 1 == threads ? n : begin + chunk;
    workers.emplace_back([&, w, begin, end] { run_range(dist, s, seed, begin, end, partial[w], {}); });
  }
  workers.clear();
  for (const auto& p : partial) total.merge(p);
  return total;
}

JointTable tally_to_joint(const Tally& t) {
  if (t.n_trials == 0) throw std::invalid_argument("tally_to_joint: empty tally");
  JointTable table;
  std::array<double, 4> err{};
  const double n = static_cast<double>(t.n_trials);
  for (std::size_t i = 0; i < 4; ++i) {
    const double p = static_cast<double>(t.counts[i]) / n;
    table.p[i] = p;
    err[i] = std::sqrt(p * (1.0 - p) / n);
  }
  table.std_error = err;
  return table;
}

CorrelatorEstimate empirical_correlator(const Tally& t) {
  if (t.n_trials == 0) throw std::invalid_argument("empirical_correlator: empty tally");
  const double n = static_cast<double>(t.n_trials);
  const double same = static_cast<double>(t.counts[0] + t.counts[3]);
  const double e = (2.0 * same - n) / n;
  return {e, std::sqrt(std::max(0.0, 1.0 - e * e) / n)};
}

std::vector<SweepPoint> sweep(std::span<const double> angles_deg, std::uint64_t n, std::uint64_t seed,
                              unsigned threads) {
  if (angles_deg.empty()) throw std::invalid_argument("sweep: empty angle grid");
  std::vector<SweepPoint> points;
  points.reserve(angles_deg.size());
  for (std::size_t k = 0; k < angles_deg.size(); ++k) {
    const Settings s{UnitVec3::ex(), planar_direction_deg(angles_deg[k])};
    const Tally t = run_experiment(s, n, derive_seed(seed, k, 1), ExperimentOptions{threads, {}});
    const CorrelatorEstimate e = empirical_correlator(t);
    points.push_back({angles_deg[k], correlator(s), e.value, e.std_error});
  }
  return points;
}

void write_event_csv_header(std::ostream& os) { os << "trial,u_x,u_y,u_z,v_x,v_y,v_z,sigma,tau\n"; }

void write_event_csv_row(std::ostream& os, const EventRecord& e) {
  const auto flags = os.flags();
  os << std::setprecision(17) << e.trial << ',' << e.hidden.u.x() << ',' << e.hidden.u.y() << ','
     << e.hidden.u.z() << ',' << e.hidden.v.x() << ',' << e.hidden.v.y() << ',' << e.hidden.v.z() << ','
     << value(e.outcome.sigma) << ',' << value(e.outcome.tau) << '\n';
  os.flags(flags);
}

void write_sweep_csv(std::ostream& os, std::span<const SweepPoint> points) {
  const auto flags = os.flags();
  os << "angle,E_exact,E_emp,stderr\n" << std::setprecision(17);
  for (const auto& p : points) os << p.angle_deg << ',' << p.exact << ',' << p.empirical << ',' << p.std_error << '\n';
  os.flags(flags);
}

void to_json(nlohmann::json& j, const Tally& t) {
  nlohmann::json counts = nlohmann::json::object();
  nlohmann::json freqs = nlohmann::json::object();
  nlohmann::json err = nlohmann::json::object();
  const JointTable table = t.n_trials > 0 ? tally_to_joint(t) : JointTable{};
  for (std::size_t i = 0; i < 4; ++i) {
    counts[kCellNames[i]] = t.counts[i];
    freqs[kCellNames[i]] = table.p[i];
    err[kCellNames[i]] = table.std_error ? (*table.std_error)[i] : 0.0;
  }
  j = nlohmann::json{{"settings", t.settings}, {"n", t.n_trials}, {"counts", counts},
                     {"freqs", freqs},         {"stderr", err},    {"seed", t.seed}};
}

}  // namespace singlet
