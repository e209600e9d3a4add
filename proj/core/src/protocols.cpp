#include "singlet/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "singlet/hv_distribution.hpp"
#include "singlet/montecarlo.hpp"
#include "singlet/singlet_model.hpp"

namespace singlet {

namespace {

constexpr double kReadTolerance = 1e-9;

int message_bit(const std::vector<int>& bits, std::uint64_t seed, std::uint64_t i, std::uint64_t lane) {
  if (bits.empty()) return static_cast<int>(Stream::for_counter(seed, i, lane).below(2));
  return bits[i % bits.size()];
}

std::size_t bin_index(double ab, std::size_t bins) {
  const auto k = static_cast<std::size_t>(std::floor((ab + 1.0) * 0.5 * static_cast<double>(bins)));
  return std::min(k, bins - 1);
}

void write_vec(std::ostream& os, const UnitVec3& v) { os << v.x() << ' ' << v.y() << ' ' << v.z(); }

AuditReport make_audit(std::string realization, std::uint64_t n, double baseline, std::vector<double> shifts) {
  AuditReport r;
  r.realization = std::move(realization);
  r.n = n;
  r.baseline_p_up = baseline;
  r.max_shift = shifts.empty() ? 0.0 : *std::max_element(shifts.begin(), shifts.end());
  r.shifts = std::move(shifts);
  r.std_error = std::sqrt(0.25 / static_cast<double>(n));
  r.threshold = 4.0 * r.std_error;
  r.local = r.max_shift < r.threshold;
  return r;
}

}  // namespace

const char* to_string(Station s) noexcept { return s == Station::A ? "A" : "B"; }

AnchoredPair AnchoredPair::make(int alpha, int beta) {
  if ((alpha != 1 && alpha != -1) || (beta != 1 && beta != -1)) {
    throw std::invalid_argument("AnchoredPair: alpha and beta must be +1 or -1");
  }
  return {alpha, beta};
}

AnchoredPair AnchoredPair::from_index(std::size_t k) {
  return {(k & 1) != 0 ? 1 : -1, (k & 2) != 0 ? -1 : 1};
}

HiddenPair hidden_pair(const AnchoredPair& state, const Settings& anchors) noexcept {
  if (state.alpha == -1) {
    const UnitVec3 u = state.beta == 1 ? anchors.a : -anchors.a;
    return {u, -u};
  }
  const UnitVec3 v = state.beta == 1 ? anchors.b : -anchors.b;
  return {-v, v};
}

RotationResult hv_update_on_rotation(const AnchoredPair& state, Station station, const UnitVec3& new_setting,
                                     const Settings& s) {
  if (station != state.anchor()) {
    throw ProtocolViolation(std::string("station ") + to_string(station) +
                            " may not rotate: the hidden pair is anchored to the other station");
  }
  const Settings rotated = station == Station::A ? Settings{new_setting, s.b} : Settings{s.a, new_setting};
  return {hidden_pair(state, rotated), rotated};
}

Transmission transmit_bit(int bit, const AnchoredPair& state, const Settings& agreed, Stream& stream) {
  if (bit != 0 && bit != 1) throw std::invalid_argument("transmit_bit: bit must be 0 or 1");
  if (collinear(agreed.a, agreed.b)) {
    throw std::invalid_argument("transmit_bit: agreed settings are collinear, the anchor cannot be identified");
  }
  // Sub-step order: read hidden vectors, rotate, update, detect.
  const HiddenPair observed = hidden_pair(state, agreed);
  const int push = bit == 0 ? 1 : -1;

  Transmission t{Station::A, bit, 0, Spin::up, {Spin::up, Spin::up}, observed, {observed, agreed}};
  if (collinear(observed.u, agreed.a)) {
    const int seen = distance(observed.u, agreed.a) <= kReadTolerance ? 1 : -1;
    t.sender = Station::A;
    t.after = hv_update_on_rotation(state, Station::A, (push * seen) * agreed.b, agreed);
  } else {
    const int seen = distance(observed.v, agreed.b) <= kReadTolerance ? 1 : -1;
    t.sender = Station::B;
    t.after = hv_update_on_rotation(state, Station::B, (push * seen) * agreed.a, agreed);
  }
  t.outcome = sample_outcomes(t.after.hidden, t.after.settings, stream);
  t.receiver_outcome = t.sender == Station::A ? t.outcome.tau : t.outcome.sigma;
  t.decoded_bit = t.receiver_outcome == Spin::down ? 0 : 1;
  return t;
}

double SignalingSession::success_rate() const noexcept {
  return records.empty() ? 0.0 : static_cast<double>(successes) / static_cast<double>(records.size());
}

double SignalingSession::sender_a_fraction() const noexcept {
  return records.empty() ? 0.0 : static_cast<double>(sender_a) / static_cast<double>(records.size());
}

double SignalingSession::p_a_up() const noexcept {
  if (records.empty()) return 0.0;
  const auto up = std::count_if(records.begin(), records.end(),
                                [](const SignalRecord& r) { return r.transmission.outcome.sigma == Spin::up; });
  return static_cast<double>(up) / static_cast<double>(records.size());
}

SignalingSession run_signaling(const SignalingConfig& cfg) {
  if (cfg.pairs == 0) throw std::invalid_argument("run_signaling: pairs must be at least 1");
  SignalingSession session{cfg.agreed, {}, 0, 0};
  session.records.reserve(cfg.pairs);
  for (std::uint64_t i = 0; i < cfg.pairs; ++i) {
    const AnchoredPair state = AnchoredPair::from_index(Stream::for_counter(cfg.seed, i, 6).below(4));
    const int bit = state.anchor() == Station::A ? message_bit(cfg.bits_a, cfg.seed, i, 8)
                                                 : message_bit(cfg.bits_b, cfg.seed, i, 9);
    Stream noise = Stream::for_counter(cfg.seed, i, 7);
    const Transmission t = transmit_bit(bit, state, cfg.agreed, noise);
    if (t.decoded_bit == t.sent_bit) ++session.successes;
    if (t.sender == Station::A) ++session.sender_a;
    session.records.push_back({i, state, t});
  }
  return session;
}

double BinStat::frequency(std::size_t cell) const noexcept {
  return n == 0 ? 0.0 : static_cast<double>(counts[cell]) / static_cast<double>(n);
}

double BinStat::max_abs_z() const noexcept {
  double worst = 0.0;
  if (n == 0) return worst;
  for (std::size_t c = 0; c < 4; ++c) {
    const double diff = std::abs(frequency(c) - expected[c]);
    if (std_error[c] > 0.0) {
      worst = std::max(worst, diff / std_error[c]);
    } else if (diff > 0.0) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return worst;
}

double ConspiracyRun::max_abs_z() const noexcept {
  double worst = 0.0;
  for (const auto& b : bins) worst = std::max(worst, b.max_abs_z());
  return worst;
}

double ConspiracyRun::p_a_up() const noexcept {
  return config.events == 0 ? 0.0 : static_cast<double>(up_a) / static_cast<double>(config.events);
}

ConspiracyRun run_conspiracy(const ConspiracyConfig& cfg, const std::function<void(const ConspiracyEvent&)>& on_event) {
  if (cfg.bins == 0) throw std::invalid_argument("run_conspiracy: bins must be at least 1");

  struct InFlight {
    std::uint64_t tick;
    UnitVec3 m;
    UnitVec3 n;
    AnchoredPair state;
    HiddenPair hidden;
  };

  // Entangler C.
  Stream c_m(cfg.seed_m);
  Stream c_n(cfg.seed_n);
  Stream c_anchor(cfg.seed_entangler);
  // Station A holds a copy of M and local noise; B likewise with N.
  Stream a_m(cfg.seed_m);
  Stream b_n(cfg.seed_n);
  Stream a_noise(derive_seed(cfg.seed_m, 0, 10));
  Stream b_noise(derive_seed(cfg.seed_n, 0, 11));
  Stream a_free(derive_seed(cfg.seed_m, 0, 12));
  Stream b_free(derive_seed(cfg.seed_n, 0, 13));
  for (std::uint64_t k = 0; k < cfg.desync; ++k) {
    random_direction(a_m);
    random_direction(b_n);
  }

  ConspiracyRun run;
  run.config = cfg;
  run.bins.resize(cfg.bins);
  for (std::size_t k = 0; k < cfg.bins; ++k) {
    run.bins[k].lo = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(cfg.bins);
    run.bins[k].hi = -1.0 + 2.0 * static_cast<double>(k + 1) / static_cast<double>(cfg.bins);
  }

  std::deque<InFlight> in_flight;
  const std::uint64_t last_tick = cfg.events == 0 ? 0 : cfg.events - 1 + cfg.delay;
  for (std::uint64_t tick = 0; cfg.events > 0 && tick <= last_tick; ++tick) {
    if (tick < cfg.events) {
      const UnitVec3 m = random_direction(c_m);
      const UnitVec3 n = random_direction(c_n);
      const AnchoredPair state = AnchoredPair::from_index(c_anchor.below(4));
      in_flight.push_back({tick, m, n, state, hidden_pair(state, Settings{m, n})});
    }
    while (!in_flight.empty() && in_flight.front().tick + cfg.delay == tick) {
      const InFlight particle = in_flight.front();
      in_flight.pop_front();

      const UnitVec3 a = cfg.free_choice ? random_direction(a_free) : random_direction(a_m);
      const UnitVec3 b = cfg.free_choice ? random_direction(b_free) : random_direction(b_n);
      const Settings s{a, b};
      // B's conditional law does not involve sigma, so each station samples locally.
      const Spin sigma = a_noise.uniform() < p_marginal_a(Spin::up, particle.hidden, s) ? Spin::up : Spin::down;
      const Spin tau = b_noise.uniform() < p_marginal_b(Spin::up, particle.hidden, s) ? Spin::up : Spin::down;

      const std::size_t cell = JointTable::index(sigma, tau);
      ++run.counts[cell];
      if (sigma == Spin::up) ++run.up_a;
      const auto uv = particle.hidden.u.components();
      const auto vv = particle.hidden.v.components();
      run.max_antiparallel_error =
          std::max(run.max_antiparallel_error, std::hypot(uv[0] + vv[0], uv[1] + vv[1], uv[2] + vv[2]));

      const double ab = dot(a, b);
      BinStat& bin = run.bins[bin_index(ab, cfg.bins)];
      ++bin.n;
      ++bin.counts[cell];
      for (Spin x : kSpins) {
        for (Spin y : kSpins) bin.expected[JointTable::index(x, y)] += qm_singlet_joint({x, y}, s);
      }

      if (on_event) {
        on_event(ConspiracyEvent{particle.tick, particle.m, particle.n, particle.state, particle.hidden, s,
                                 {sigma, tau}});
      }
    }
  }

  for (auto& bin : run.bins) {
    if (bin.n == 0) continue;
    const double n = static_cast<double>(bin.n);
    for (std::size_t c = 0; c < 4; ++c) {
      bin.expected[c] /= n;
      bin.std_error[c] = std::sqrt(bin.expected[c] * (1.0 - bin.expected[c]) / n);
    }
  }
  return run;
}

void write_conspiracy_csv_header(std::ostream& os) { os << "tick,m,n,alpha,beta,u,v,a,b,sigma,tau\n"; }

void write_conspiracy_csv_row(std::ostream& os, const ConspiracyEvent& e) {
  const auto flags = os.flags();
  const auto precision = os.precision(17);
  os << e.tick << ',';
  write_vec(os, e.m);
  os << ',';
  write_vec(os, e.n);
  os << ',' << e.state.alpha << ',' << e.state.beta << ',';
  write_vec(os, e.hidden.u);
  os << ',';
  write_vec(os, e.hidden.v);
  os << ',';
  write_vec(os, e.settings.a);
  os << ',';
  write_vec(os, e.settings.b);
  os << ',' << value(e.outcome.sigma) << ',' << value(e.outcome.tau) << '\n';
  os.precision(precision);
  os.flags(flags);
}

AuditReport locality_audit(const ConspiracyConfig& cfg, std::span<const std::uint64_t> remote_seeds) {
  if (cfg.events == 0) throw std::invalid_argument("locality_audit: events must be at least 1");
  const double baseline = run_conspiracy(cfg).p_a_up();
  std::vector<double> shifts;
  shifts.reserve(remote_seeds.size());
  for (std::uint64_t seed : remote_seeds) {
    ConspiracyConfig varied = cfg;
    varied.seed_n = seed;
    shifts.push_back(std::abs(run_conspiracy(varied).p_a_up() - baseline));
  }
  return make_audit("conspiracy", cfg.events, baseline, std::move(shifts));
}

AuditReport locality_audit(const SignalingConfig& cfg, std::span<const std::vector<int>> remote_messages) {
  const double baseline = run_signaling(cfg).p_a_up();
  std::vector<double> shifts;
  shifts.reserve(remote_messages.size());
  for (const auto& message : remote_messages) {
    SignalingConfig varied = cfg;
    varied.bits_b = message;
    shifts.push_back(std::abs(run_signaling(varied).p_a_up() - baseline));
  }
  return make_audit("signaling", cfg.pairs, baseline, std::move(shifts));
}

void to_json(nlohmann::json& j, const AnchoredPair& s) { j = nlohmann::json{{"alpha", s.alpha}, {"beta", s.beta}}; }

void to_json(nlohmann::json& j, const BinStat& b) {
  j = nlohmann::json{{"lo", b.lo},         {"hi", b.hi},           {"n", b.n},
                     {"counts", b.counts}, {"expected", b.expected}, {"stderr", b.std_error},
                     {"max_abs_z", b.n == 0 ? 0.0 : b.max_abs_z()}};
}

void to_json(nlohmann::json& j, const ConspiracyRun& r) {
  j = nlohmann::json{
      {"realization", "conspiracy"},
      {"n", r.n()},
      {"seeds", {{"m", r.config.seed_m}, {"n", r.config.seed_n}, {"entangler", r.config.seed_entangler}}},
      {"delay", r.config.delay},
      {"desync", r.config.desync},
      {"free_choice", r.config.free_choice},
      {"counts", r.counts},
      {"p_a_up", r.p_a_up()},
      {"max_antiparallel_error", r.max_antiparallel_error},
      {"max_abs_z", r.max_abs_z()},
      {"reproduces_singlet", r.reproduces_singlet()},
      {"bins", r.bins},
  };
}

void to_json(nlohmann::json& j, const SignalingSession& s) {
  j = nlohmann::json{{"realization", "signaling"},
                     {"n", s.records.size()},
                     {"agreed", s.agreed},
                     {"success_rate", s.success_rate()},
                     {"sender_a_fraction", s.sender_a_fraction()},
                     {"p_a_up", s.p_a_up()}};
}

void to_json(nlohmann::json& j, const AuditReport& r) {
  j = nlohmann::json{{"realization", r.realization}, {"n", r.n},
                     {"baseline_p_a_up", r.baseline_p_up}, {"shifts", r.shifts},
                     {"audit_max_shift", r.max_shift},   {"stderr", r.std_error},
                     {"threshold", r.threshold},         {"local", r.local}};
}

}  // namespace singlet
