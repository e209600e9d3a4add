#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "singlet/model_types.hpp"
#include "singlet/random.hpp"

namespace singlet {

enum class Station { A, B };

const char* to_string(Station s) noexcept;

/// Which setting the hidden pair is aligned with and with which sign.
///   alpha = -1: u = beta a, v = -beta a   (anchored to A)
///   alpha = +1: v = beta b, u = -beta b   (anchored to B)
struct AnchoredPair {
  int alpha;
  int beta;

  /// Throws std::invalid_argument unless both are +1 or -1.
  static AnchoredPair make(int alpha, int beta);
  /// One of the four combinations, chosen by index 0..3.
  static AnchoredPair from_index(std::size_t k);

  Station anchor() const noexcept { return alpha == -1 ? Station::A : Station::B; }

  friend bool operator==(const AnchoredPair&, const AnchoredPair&) = default;
};

/// Hidden vectors for `state` anchored to `anchors` (a, b or m, n).
HiddenPair hidden_pair(const AnchoredPair& state, const Settings& anchors) noexcept;

/// Thrown when a station acts outside the protocol.
class ProtocolViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct RotationResult {
  HiddenPair hidden;
  Settings settings;
};

/// The anchor station turns its detector to `new_setting`; the pair follows
/// rigidly with its sign, so the anchored vector becomes beta * new_setting and
/// the remote partner -beta * new_setting. Throws ProtocolViolation when
/// `station` is not the anchor.
RotationResult hv_update_on_rotation(const AnchoredPair& state, Station station, const UnitVec3& new_setting,
                                     const Settings& s);

struct Transmission {
  Station sender;
  int sent_bit;
  int decoded_bit;
  Spin receiver_outcome;
  Outcome outcome;
  HiddenPair observed;  ///< hidden pair read before the rotation
  RotationResult after;
};

/// One use of the superluminal protocol. Each station reads its own hidden
/// vector; the one that finds it along its own agreed setting is the sender and
/// turns to +-(sign) times the other station's setting so that the receiver
/// gets -1 for a 0-bit and +1 for a 1-bit. Outcomes are then drawn from the
/// model with two uniforms of `stream`.
///
/// Throws std::invalid_argument for bit not in {0, 1} or collinear agreed settings.
Transmission transmit_bit(int bit, const AnchoredPair& state, const Settings& agreed, Stream& stream);

struct SignalingConfig {
  Settings agreed;
  std::uint64_t pairs = 0;
  std::uint64_t seed = 0;
  /// Bits each station sends when it is the sender, cycled. Empty means
  /// random bits from the station's own stream.
  std::vector<int> bits_a;
  std::vector<int> bits_b;
};

struct SignalRecord {
  std::uint64_t index;
  AnchoredPair state;
  Transmission transmission;
};

struct SignalingSession {
  Settings agreed;
  std::vector<SignalRecord> records;
  std::uint64_t successes = 0;
  std::uint64_t sender_a = 0;

  double success_rate() const noexcept;
  double sender_a_fraction() const noexcept;
  /// Fraction of pairs with sigma = +1.
  double p_a_up() const noexcept;
};

/// Pair i takes its anchor from Stream::for_counter(seed, i, 6) and its outcome
/// noise from Stream::for_counter(seed, i, 7).
SignalingSession run_signaling(const SignalingConfig& cfg);

struct ConspiracyConfig {
  std::uint64_t seed_m = 1;          ///< generator shared by C and A
  std::uint64_t seed_n = 2;          ///< generator shared by C and B
  std::uint64_t seed_entangler = 3;  ///< C's private choice of (alpha, beta)
  std::uint64_t events = 0;
  std::uint64_t delay = 1;   ///< time of flight in ticks
  std::uint64_t desync = 0;  ///< stations read this many ticks ahead of C
  bool free_choice = false;  ///< stations ignore their generators
  std::size_t bins = 20;
};

struct ConspiracyEvent {
  std::uint64_t tick;  ///< emission tick; detection happens at tick + delay
  UnitVec3 m;
  UnitVec3 n;
  AnchoredPair state;
  HiddenPair hidden;
  Settings settings;
  Outcome outcome;
};

/// Outcomes with a.b in [lo, hi), compared against (1/4)(1 - sigma tau a.b)
/// averaged over the bin's own events.
struct BinStat {
  double lo;
  double hi;
  std::uint64_t n = 0;
  std::array<std::uint64_t, 4> counts{};
  std::array<double, 4> expected{};
  std::array<double, 4> std_error{};

  double frequency(std::size_t cell) const noexcept;
  /// Largest |freq - expected| / std_error over the cells (0 for an empty bin).
  double max_abs_z() const noexcept;
};

struct ConspiracyRun {
  ConspiracyConfig config;
  std::array<std::uint64_t, 4> counts{};
  std::uint64_t up_a = 0;
  double max_antiparallel_error = 0.0;  ///< max |u + v| over events
  std::vector<BinStat> bins;

  std::uint64_t n() const noexcept { return config.events; }
  double max_abs_z() const noexcept;
  bool reproduces_singlet(double z = 4.0) const noexcept { return max_abs_z() < z; }
  double p_a_up() const noexcept;
};

/// Discrete-event simulation of the local realization.
///
/// Tick t: C draws m_t, n_t from its copies of generators M and N and (alpha,
/// beta) from its private stream, then attaches the anchored pair. Tick t+delay:
/// A and B draw from their own copies of M and N (which lag by `delay`), set
/// a = m_t, b = n_t, and draw their outcomes from local noise. Nothing crosses
/// between A, B and C after the seeds are shared.
///
/// `on_event`, when set, receives every event in tick order.
ConspiracyRun run_conspiracy(const ConspiracyConfig& cfg,
                             const std::function<void(const ConspiracyEvent&)>& on_event = {});

/// tick,m,n,alpha,beta,u,v,a,b,sigma,tau; vectors as "x y z" within one field.
void write_conspiracy_csv_header(std::ostream& os);
void write_conspiracy_csv_row(std::ostream& os, const ConspiracyEvent& e);

struct AuditReport {
  std::string realization;
  std::uint64_t n = 0;
  double baseline_p_up = 0.0;
  std::vector<double> shifts;
  double max_shift = 0.0;
  double std_error = 0.0;  ///< sqrt(0.25 / n)
  double threshold = 0.0;  ///< 4 * std_error
  bool local = true;       ///< max_shift < threshold
};

/// Re-runs the conspiracy with B's generator seed replaced by each of
/// `remote_seeds`, everything on A's side and at C held fixed, and reports the
/// shift of A's frequency of sigma = +1.
AuditReport locality_audit(const ConspiracyConfig& cfg, std::span<const std::uint64_t> remote_seeds);

/// Same audit for the signaling realization: B's message is replaced by each of
/// `remote_messages`.
AuditReport locality_audit(const SignalingConfig& cfg, std::span<const std::vector<int>> remote_messages);

void to_json(nlohmann::json& j, const AnchoredPair& s);
void to_json(nlohmann::json& j, const BinStat& b);
void to_json(nlohmann::json& j, const ConspiracyRun& r);
void to_json(nlohmann::json& j, const SignalingSession& s);
void to_json(nlohmann::json& j, const AuditReport& r);

}  // namespace singlet
