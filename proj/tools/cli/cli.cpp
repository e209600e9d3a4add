#include "cli/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "singlet/analysis.hpp"
#include "singlet/hv_distribution.hpp"
#include "singlet/montecarlo.hpp"
#include "singlet/protocols.hpp"
#include "singlet/singlet_model.hpp"

namespace singlet::cli {

namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::array<const char*, 4> kCells{"++", "+-", "-+", "--"};

json table_json(const JointTable& t) {
  json j = json::object();
  for (std::size_t i = 0; i < 4; ++i) j[kCells[i]] = t.p[i];
  return j;
}

struct VectorArg {
  std::string vec;
  std::optional<double> angle;
};

struct SettingsArgs {
  VectorArg a, b, a2, b2;
  std::optional<double> angle_ab;
};

void add_vector_option(CLI::App* app, VectorArg& arg, const std::string& name, const std::string& label) {
  auto* vec = app->add_option("--" + name, arg.vec, label + " as x,y,z (normalized on input)");
  auto* angle = app->add_option("--angle-" + name, arg.angle, label + " as an angle in degrees in the x-y plane");
  vec->excludes(angle);
}

void add_settings_options(CLI::App* app, SettingsArgs& args, bool four) {
  add_vector_option(app, args.a, "a", "setting of station A");
  add_vector_option(app, args.b, "b", "setting of station B");
  if (four) {
    add_vector_option(app, args.a2, "a2", "second setting of station A");
    add_vector_option(app, args.b2, "b2", "second setting of station B");
  } else {
    app->add_option("--angle-ab", args.angle_ab, "angle between a and b in degrees (a along x)");
  }
}

UnitVec3 parse_vector(const std::string& text, std::ostream& err) {
  std::array<double, 3> c{};
  std::stringstream ss(text);
  std::string item;
  std::size_t k = 0;
  while (std::getline(ss, item, ',')) {
    if (k == 3) throw UsageError("vector '" + text + "' has more than three components");
    try {
      std::size_t used = 0;
      c[k] = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("cannot parse vector component '" + item + "'");
    }
    ++k;
  }
  if (k != 3) throw UsageError("vector '" + text + "' needs three components");
  const double norm = std::hypot(c[0], c[1], c[2]);
  if (!std::isfinite(norm) || norm == 0.0) throw UsageError("vector '" + text + "' has no direction");
  if (std::abs(norm - 1.0) > 1e-6) err << "warning: vector " << text << " has norm " << norm << ", normalizing\n";
  return UnitVec3::normalized(c);
}

UnitVec3 resolve(const VectorArg& arg, double default_deg, std::ostream& err) {
  if (!arg.vec.empty()) return parse_vector(arg.vec, err);
  return planar_direction_deg(arg.angle.value_or(default_deg));
}

Settings resolve_pair(const SettingsArgs& args, double default_b_deg, std::ostream& err) {
  if (args.angle_ab && (args.b.angle || !args.b.vec.empty())) {
    throw UsageError("--angle-ab cannot be combined with --b or --angle-b");
  }
  const UnitVec3 a = resolve(args.a, 0.0, err);
  if (args.angle_ab) return {a, planar_direction_deg(*args.angle_ab)};
  return {a, resolve(args.b, default_b_deg, err)};
}

std::uint64_t fresh_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

class Emitter {
 public:
  Emitter(std::ostream& out, std::string path) : out_(out), path_(std::move(path)) {}

  void write(const std::string& text) const {
    if (path_.empty()) {
      out_ << text;
      return;
    }
    std::ofstream file(path_, std::ios::binary);
    if (!file) throw UsageError("cannot open output file " + path_);
    file << text;
  }

  void write(const json& doc) const { write(doc.dump(2) + "\n"); }

 private:
  std::ostream& out_;
  std::string path_;
};

json envelope(const std::string& command, std::uint64_t seed, json config, json result) {
  return json{{"command", command}, {"version", SINGLETLAB_VERSION}, {"seed", seed},
              {"config", std::move(config)}, {"result", std::move(result)}};
}

// CSV reports carry the same provenance as JSON ones in a leading comment line.
std::string csv_provenance(const std::string& command, std::uint64_t seed, const json& config) {
  return "# singletlab " SINGLETLAB_VERSION " " + command + " seed=" + std::to_string(seed) + " config=" +
         config.dump() + "\n";
}

std::ofstream open_log(const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot open log file " + path);
  return file;
}

struct Common {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "json";

  std::uint64_t resolved_seed() const { return seed ? *seed : fresh_seed(); }
};

void add_common(CLI::App* app, Common& c, bool with_format, const std::string& default_format = "json") {
  c.format = default_format;
  app->add_option("--seed", c.seed, "random seed (generated and recorded when absent)");
  app->add_option("--out", c.out, "write the report to this file instead of stdout");
  if (with_format) app->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "csv"}));
}

// --- subcommands ------------------------------------------------------------

int cmd_exact(const SettingsArgs& sa, const Common& c, std::ostream& out, std::ostream& err) {
  const Settings s = resolve_pair(sa, 90.0, err);
  const std::uint64_t seed = c.resolved_seed();
  const JointTable hv = averaged_table(s);
  const JointTable qm = qm_singlet_table(s);
  const double deviation = hv.max_abs_difference(qm);
  const json result{{"table", table_json(hv)},
                    {"qm_table", table_json(qm)},
                    {"correlator", hv.correlator()},
                    {"a_dot_b", dot(s.a, s.b)},
                    {"max_deviation", deviation},
                    {"distribution", build_distribution(s)}};
  Emitter(out, c.out).write(envelope("exact", seed, json{{"settings", s}}, result));
  return deviation > 1e-10 ? kExitVerdictMismatch : kExitOk;
}

int cmd_sample(const SettingsArgs& sa, const Common& c, std::uint64_t n, unsigned threads, const std::string& events,
               std::ostream& out, std::ostream& err) {
  const Settings s = resolve_pair(sa, 90.0, err);
  const std::uint64_t seed = c.resolved_seed();
  ExperimentOptions options{threads, {}};
  std::ofstream log;
  if (!events.empty()) {
    log = open_log(events);
    write_event_csv_header(log);
    options.on_event = [&log](const EventRecord& e) { write_event_csv_row(log, e); };
  }
  const Tally tally = run_experiment(s, n, seed, options);
  const JointTable emp = tally_to_joint(tally);
  const JointTable exact = qm_singlet_table(s);
  double max_z = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double se = std::sqrt(exact.p[i] * (1.0 - exact.p[i]) / static_cast<double>(n));
    const double diff = std::abs(emp.p[i] - exact.p[i]);
    if (se > 0.0) max_z = std::max(max_z, diff / se);
    else if (diff > 0.0) max_z = std::numeric_limits<double>::infinity();
  }
  const CorrelatorEstimate e = empirical_correlator(tally);

  if (c.format == "csv") {
    std::ostringstream os;
    os << csv_provenance("sample", seed, json{{"settings", s}, {"n", n}});
    os << "cell,count,freq,stderr,exact\n" << std::setprecision(17);
    for (std::size_t i = 0; i < 4; ++i) {
      os << kCells[i] << ',' << tally.counts[i] << ',' << emp.p[i] << ',' << (*emp.std_error)[i] << ','
         << exact.p[i] << '\n';
    }
    Emitter(out, c.out).write(os.str());
    return kExitOk;
  }
  json result = tally;
  result["exact"] = table_json(exact);
  result["correlator"] = {{"empirical", e.value}, {"stderr", e.std_error}, {"exact", -dot(s.a, s.b)}};
  result["max_abs_z"] = max_z;
  Emitter(out, c.out).write(envelope("sample", seed, json{{"settings", s}, {"n", n}}, result));
  return kExitOk;
}

int cmd_sweep(const Common& c, double from, double to, double step, std::uint64_t n, unsigned threads,
              std::ostream& out) {
  if (!(step > 0.0) || !std::isfinite(from) || !std::isfinite(to) || to < from) {
    throw UsageError("sweep: empty angle grid (need --from <= --to and --step > 0)");
  }
  std::vector<double> angles;
  for (std::size_t k = 0;; ++k) {
    const double angle = from + static_cast<double>(k) * step;
    if (angle > to + 1e-9 * step) break;
    angles.push_back(angle);
  }
  const std::uint64_t seed = c.resolved_seed();
  const auto points = sweep(angles, n, seed, threads);
  const json config{{"from", from}, {"to", to}, {"step", step}, {"n", n}};
  if (c.format == "csv") {
    std::ostringstream os;
    os << csv_provenance("sweep", seed, config);
    write_sweep_csv(os, points);
    Emitter(out, c.out).write(os.str());
    return kExitOk;
  }
  json rows = json::array();
  for (const auto& p : points) {
    rows.push_back({{"angle", p.angle_deg}, {"E_exact", p.exact}, {"E_emp", p.empirical}, {"stderr", p.std_error}});
  }
  Emitter(out, c.out).write(envelope("sweep", seed, config, json{{"points", rows}}));
  return kExitOk;
}

int cmd_hypotheses(const Common& c, std::size_t grid, std::ostream& out) {
  if (grid == 0) throw UsageError("hypotheses: --grid must be positive");
  const std::uint64_t seed = c.resolved_seed();
  const auto reports = hypothesis_profile(grid, seed);
  bool expected = true;
  for (const auto& r : reports) {
    const Verdict want = r.name == "measurement_independence" ? Verdict::violated : Verdict::satisfied;
    expected = expected && r.verdict == want;
  }
  const json result{{"reports", reports}, {"profile_matches_model", expected}};
  Emitter(out, c.out).write(envelope("hypotheses", seed, json{{"grid", grid}}, result));
  return expected ? kExitOk : kExitVerdictMismatch;
}

int cmd_chsh(const SettingsArgs& sa, const Common& c, bool optimal, std::size_t search, bool underweighted,
             std::uint64_t n, unsigned threads, std::ostream& out, std::ostream& err) {
  const Correlator e = underweighted ? underweighted_correlator() : model_correlator();
  const std::uint64_t seed = c.resolved_seed();
  json config{{"correlator", underweighted ? "underweighted" : "model"}};
  ChshResult result = [&] {
    if (search > 0) {
      config["search_resolution"] = search;
      return chsh_optimize(e, search);
    }
    ChshSettings s = optimal_chsh_settings();
    if (!optimal) {
      s = {resolve(sa.a, 0.0, err), resolve(sa.a2, 90.0, err), resolve(sa.b, 45.0, err), resolve(sa.b2, 135.0, err)};
    }
    return make_chsh_result(s, chsh_value(s, e));
  }();
  json report = result;
  report["strategies_enumerated"] = enumerate_deterministic_strategies().size();
  if (n > 0) {
    if (underweighted) throw UsageError("chsh: --n samples the model and cannot be combined with --underweighted");
    const EmpiricalChsh emp = empirical_chsh(result.settings, n, seed, threads);
    report["empirical"] = {{"S", emp.s}, {"stderr", emp.std_error}, {"n_per_pair", n}};
    config["n"] = n;
  }
  Emitter(out, c.out).write(envelope("chsh", seed, config, report));
  const bool expected = underweighted ? !result.violated : result.violated;
  return expected ? kExitOk : kExitVerdictMismatch;
}

std::vector<int> parse_bits(const std::string& text) {
  std::vector<int> bits;
  for (char ch : text) {
    if (ch != '0' && ch != '1') throw UsageError("--bits must be a string of 0 and 1");
    bits.push_back(ch - '0');
  }
  return bits;
}

int cmd_signal(const SettingsArgs& sa, const Common& c, std::uint64_t pairs, const std::string& bits, bool audit,
               const std::string& log_path, std::ostream& out, std::ostream& err) {
  const Settings agreed = resolve_pair(sa, 90.0, err);
  if (collinear(agreed.a, agreed.b)) throw UsageError("signal: agreed settings must not be collinear");
  const std::uint64_t seed = c.resolved_seed();
  SignalingConfig cfg{agreed, pairs, seed, parse_bits(bits), parse_bits(bits)};
  const SignalingSession session = run_signaling(cfg);

  if (!log_path.empty()) {
    std::ofstream log = open_log(log_path);
    log << "pair,alpha,beta,sender,sent,receiver_outcome,decoded,sigma,tau\n";
    for (const auto& r : session.records) {
      const Transmission& t = r.transmission;
      log << r.index << ',' << r.state.alpha << ',' << r.state.beta << ',' << to_string(t.sender) << ','
          << t.sent_bit << ',' << value(t.receiver_outcome) << ',' << t.decoded_bit << ',' << value(t.outcome.sigma)
          << ',' << value(t.outcome.tau) << '\n';
    }
  }

  json result = session;
  bool expected = session.success_rate() == 1.0;
  if (audit) {
    const std::vector<std::vector<int>> messages{{0}, {1}};
    const AuditReport report = locality_audit(cfg, messages);
    result["audit"] = report;
  }
  json config{{"settings", agreed}, {"pairs", pairs}, {"bits", bits}, {"audit", audit}};
  Emitter(out, c.out).write(envelope("signal", seed, config, result));
  return expected ? kExitOk : kExitVerdictMismatch;
}

struct ConspiracyArgs {
  std::uint64_t events = 100000;
  std::optional<std::uint64_t> seed_m, seed_n, seed_entangler;
  std::uint64_t delay = 1;
  std::uint64_t desync = 0;
  bool free_choice = false;
  std::size_t bins = 20;
  std::size_t audit = 0;
  std::string log;
};

int cmd_conspiracy(const ConspiracyArgs& ca, const Common& c, std::ostream& out) {
  if (ca.bins == 0) throw UsageError("conspiracy: --bins must be positive");
  const std::uint64_t seed = c.resolved_seed();
  ConspiracyConfig cfg;
  cfg.seed_m = ca.seed_m.value_or(derive_seed(seed, 0, 20));
  cfg.seed_n = ca.seed_n.value_or(derive_seed(seed, 1, 20));
  cfg.seed_entangler = ca.seed_entangler.value_or(derive_seed(seed, 2, 20));
  cfg.events = ca.events;
  cfg.delay = ca.delay;
  cfg.desync = ca.desync;
  cfg.free_choice = ca.free_choice;
  cfg.bins = ca.bins;

  std::ofstream log;
  std::function<void(const ConspiracyEvent&)> sink;
  if (!ca.log.empty()) {
    log = open_log(ca.log);
    write_conspiracy_csv_header(log);
    sink = [&log](const ConspiracyEvent& e) { write_conspiracy_csv_row(log, e); };
  }
  const ConspiracyRun run = run_conspiracy(cfg, sink);
  json result = run;
  bool expected = run.reproduces_singlet() && run.max_antiparallel_error <= 1e-12;
  if (ca.audit > 0) {
    std::vector<std::uint64_t> remote;
    for (std::size_t k = 0; k < ca.audit; ++k) remote.push_back(derive_seed(seed, k, 21));
    const AuditReport report = locality_audit(cfg, remote);
    result["audit"] = report;
    expected = expected && report.local;
  }
  json config{{"events", ca.events}, {"delay", ca.delay}, {"desync", ca.desync},
              {"free_choice", ca.free_choice}, {"bins", ca.bins}, {"audit_variations", ca.audit}};
  Emitter(out, c.out).write(envelope("conspiracy", seed, config, result));
  return expected ? kExitOk : kExitVerdictMismatch;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"singletlab: measurement-dependent hidden-variable model of the spin singlet"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SINGLETLAB_VERSION);

  SettingsArgs settings;
  Common common;
  std::uint64_t n = 0;
  unsigned threads = 1;
  std::string events_path;

  auto* exact = app.add_subcommand("exact", "exact joint table, QM reference and their deviation");
  add_settings_options(exact, settings, false);
  add_common(exact, common, false);

  auto* sample = app.add_subcommand("sample", "Monte Carlo tally at fixed settings");
  add_settings_options(sample, settings, false);
  add_common(sample, common, true);
  sample->add_option("--n", n, "number of trials")->required()->check(CLI::PositiveNumber);
  sample->add_option("--threads", threads, "worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
  sample->add_option("--events", events_path, "write per-event CSV log to this file");

  double from = 0.0, to = 180.0, step = 5.0;
  std::uint64_t sweep_n = 100000;
  auto* sweep_cmd = app.add_subcommand("sweep", "correlation curve E(angle), exact and sampled");
  Common sweep_common;
  add_common(sweep_cmd, sweep_common, true, "csv");
  sweep_cmd->add_option("--from", from, "first angle in degrees");
  sweep_cmd->add_option("--to", to, "last angle in degrees");
  sweep_cmd->add_option("--step", step, "angle step in degrees");
  sweep_cmd->add_option("--n", sweep_n, "trials per angle")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  std::size_t grid = 1000;
  auto* hyp = app.add_subcommand("hypotheses", "check the Bell and Leggett hypotheses on the model");
  add_common(hyp, common, false);
  hyp->add_option("--grid", grid, "grid points per hypothesis");

  bool optimal = false;
  bool underweighted = false;
  std::size_t search = 0;
  std::uint64_t chsh_n = 0;
  auto* chsh = app.add_subcommand("chsh", "CHSH value against the brute-force classical bound");
  add_settings_options(chsh, settings, true);
  add_common(chsh, common, false);
  chsh->add_flag("--optimal", optimal, "use a=0, a2=90, b=45, b2=135 degrees");
  chsh->add_option("--search", search, "search coplanar settings on this many angles per turn");
  chsh->add_flag("--underweighted", underweighted, "use the distribution rescaled to total weight 1/4");
  chsh->add_option("--n", chsh_n, "also estimate S from this many Monte Carlo trials per setting pair");
  chsh->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  std::uint64_t pairs = 1000;
  std::string bits;
  bool audit_signal = false;
  std::string signal_log;
  auto* signal = app.add_subcommand("signal", "superluminal signaling protocol with observable hidden variables");
  add_settings_options(signal, settings, false);
  add_common(signal, common, false);
  signal->add_option("--pairs", pairs, "number of pairs (one bit each)")->check(CLI::PositiveNumber);
  signal->add_option("--bits", bits, "message bits, cycled (random when absent)");
  signal->add_flag("--audit", audit_signal, "run the locality audit with B's message varied");
  signal->add_option("--log", signal_log, "write per-pair CSV log to this file");

  ConspiracyArgs ca;
  auto* consp = app.add_subcommand("conspiracy", "local realization with delayed shared generators");
  add_common(consp, common, false);
  consp->add_option("--n", ca.events, "number of emission events")->check(CLI::PositiveNumber);
  consp->add_option("--seed-m", ca.seed_m, "seed of generator M shared by C and A");
  consp->add_option("--seed-n", ca.seed_n, "seed of generator N shared by C and B");
  consp->add_option("--seed-entangler", ca.seed_entangler, "seed of C's anchor choice");
  consp->add_option("--delay", ca.delay, "time of flight in ticks");
  consp->add_option("--desync", ca.desync, "stations read their generators this many ticks ahead");
  consp->add_flag("--free-choice", ca.free_choice, "stations choose settings from private generators");
  consp->add_option("--bins", ca.bins, "number of a.b bins");
  consp->add_option("--audit", ca.audit, "run the locality audit over this many remote seeds");
  consp->add_option("--log", ca.log, "write per-event CSV log to this file");

  std::vector<std::string> argv_storage{"singletlab"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << SINGLETLAB_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (exact->parsed()) return cmd_exact(settings, common, out, err);
    if (sample->parsed()) return cmd_sample(settings, common, n, threads, events_path, out, err);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_common, from, to, step, sweep_n, threads, out);
    if (hyp->parsed()) return cmd_hypotheses(common, grid, out);
    if (chsh->parsed()) return cmd_chsh(settings, common, optimal, search, underweighted, chsh_n, threads, out, err);
    if (signal->parsed()) return cmd_signal(settings, common, pairs, bits, audit_signal, signal_log, out, err);
    if (consp->parsed()) return cmd_conspiracy(ca, common, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace singlet::cli
