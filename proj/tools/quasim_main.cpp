// quasim: batch front-end over the simulation library.
//
// One JSON config per run, no prompts.  Every subcommand writes its outputs,
// a verbatim copy of the config, and a manifest with per-file checksums into
// the output directory; reruns with the same config and seed produce
// identical file checksums.
//
// Exit codes: 0 success (and, for `consistency`, no violations);
//             1 usage or config errors; 2 domain validation errors;
//             3 I/O errors; 4 consistency violations.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "quasim/born.hpp"
#include "quasim/channel.hpp"
#include "quasim/config.hpp"
#include "quasim/consistency.hpp"
#include "quasim/manifest.hpp"
#include "quasim/projection.hpp"
#include "quasim/scenarios.hpp"
#include "quasim/trajectory.hpp"

namespace {

using nlohmann::json;
using namespace quasim;

// Malformed or self-contradictory config values (unknown enum strings and
// the like) — exit code 1, distinct from library validation errors (2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunContext {
  std::string command;
  std::string config_path;
  std::string config_text;  // raw config bytes, echoed to the sidecar
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  if (is.bad()) throw std::runtime_error("cannot read " + path);
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << text;
  if (!os) throw std::runtime_error("cannot write " + path);
}

// Collects written paths so the manifest covers exactly what the run
// produced (plus any declared inputs).
class RunWriter {
 public:
  RunWriter(const RunContext& ctx)
      : ctx_(ctx), start_(std::chrono::steady_clock::now()) {
    std::filesystem::create_directories(ctx.out_dir);
    manifest_.command = ctx.command;
    manifest_.config_digest = hex64(fnv1a64(ctx.config_text));
    manifest_.seed = ctx.seed;
  }

  std::string path(const std::string& name) const {
    return ctx_.out_dir + "/" + name;
  }

  void note_input(const std::string& file_path) {
    add_file(manifest_, file_path);
  }

  void emit(const std::string& name, const std::string& text) {
    write_file(path(name), text);
    add_file(manifest_, path(name));
  }

  template <typename SaveFn>
  void emit_with(const std::string& name, SaveFn&& save) {
    save(path(name));
    add_file(manifest_, path(name));
  }

  void finish() {
    emit("config.json", ctx_.config_text);
    const auto elapsed = std::chrono::steady_clock::now() - start_;
    manifest_.duration_ms =
        std::chrono::duration<double, std::milli>(elapsed).count();
    save_manifest(manifest_, path("manifest.json"));
  }

 private:
  const RunContext& ctx_;
  RunManifest manifest_;
  std::chrono::steady_clock::time_point start_;
};

ProjectionConfig thresholds_from(const json& cfg) {
  ProjectionConfig pc;
  if (!cfg.contains("thresholds")) return pc;
  const json& t = cfg.at("thresholds");
  pc.theta = t.value("theta", pc.theta);
  pc.alpha_min = t.value("alpha_min", pc.alpha_min);
  pc.alpha_cap = t.value("alpha_cap", pc.alpha_cap);
  pc.eps_norm = t.value("eps_norm", pc.eps_norm);
  pc.kappa = t.value("kappa", pc.kappa);
  pc.brute_force_limit = t.value("brute_force_limit", pc.brute_force_limit);
  pc.quantize_digits = t.value("quantize_digits", pc.quantize_digits);
  return pc;
}

// Amplitude lists accept [re, im] pairs and plain numbers (imaginary 0).
std::vector<Complex> parse_amplitudes(const json& j) {
  std::vector<Complex> out;
  out.reserve(j.size());
  for (const auto& e : j) {
    if (e.is_array()) {
      if (e.size() != 2)
        throw ConfigError("amplitude entries are numbers or [re, im] pairs");
      out.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
    } else {
      out.emplace_back(e.get<double>(), 0.0);
    }
  }
  return out;
}

GeneratorSpec generator_from(const json& g, const std::string& kind) {
  if (kind == "constant-pure")
    return ConstantPure{g.value("k", std::size_t{0})};
  if (kind == "balanced")
    return BalancedSuperposition{g.at("signs").get<std::vector<int>>()};
  if (kind == "frozen") return Frozen{parse_amplitudes(g.at("amplitudes"))};
  if (kind == "random-fast") return RandomFast{g.at("t_c").get<double>()};
  if (kind == "piecewise") {
    Piecewise plan;
    for (const auto& seg : g.at("segments"))
      plan.segments.push_back({seg.at("steps").get<std::size_t>(),
                               parse_amplitudes(seg.at("amplitudes"))});
    return plan;
  }
  if (kind == "power-martingale")
    return PowerMartingale{g.at("initial_powers").get<std::vector<double>>()};
  throw ConfigError("generate: unknown kind '" + kind + "'");
}

SpinKind spin_kind_from(const std::string& regime) {
  if (regime == "random-fast") return SpinKind::kRandomFast;
  if (regime == "balanced") return SpinKind::kBalanced;
  if (regime == "pure") return SpinKind::kPure;
  if (regime == "near-balanced") return SpinKind::kNearBalanced;
  throw ConfigError("generate: unknown spin regime '" + regime + "'");
}

// ---------------------------------------------------------------------------

int cmd_generate(const json& cfg, const RunContext& ctx) {
  const json& g = cfg.at("generate");
  const std::string kind = g.at("kind").get<std::string>();
  RunWriter writer(ctx);

  if (kind == "spin-array") {
    SpinArraySpec spec;
    const std::size_t count = g.value("spins", std::size_t{8});
    const std::string regime = g.value("regime", std::string{"mixed"});
    if (regime == "mixed")
      spec = mixed_spin_array(g.value("pure", std::size_t{3}), count,
                              g.value("delta", 0.05));
    else
      spec = uniform_spin_array(spin_kind_from(regime), count);
    spec.steps = g.value("steps", spec.steps);
    spec.dt = g.value("dt", spec.dt);
    spec.t_c = g.value("t_c", spec.t_c);
    const std::vector<Trajectory> spins = build_spin_array(spec, ctx.seed);
    for (std::size_t i = 0; i < spins.size(); ++i)
      writer.emit_with("spin_" + std::to_string(i) + ".csv",
                       [&](const std::string& p) {
                         save_trajectory_csv(spins[i], p);
                       });
  } else {
    const auto dim = g.at("dim").get<std::size_t>();
    const auto steps = g.at("steps").get<std::size_t>();
    const auto dt = g.at("dt").get<double>();
    const Trajectory traj =
        generate(generator_from(g, kind), dim, steps, dt, ctx.seed);
    writer.emit_with("trajectory.csv", [&](const std::string& p) {
      save_trajectory_csv(traj, p);
    });
  }
  writer.finish();
  return 0;
}

int cmd_project(const json& cfg, const RunContext& ctx) {
  const json& p = cfg.at("project");
  const std::string input = p.at("input").get<std::string>();
  const auto window_len = p.at("window_len").get<std::size_t>();
  const std::string mode = p.value("mode", std::string{"maximal"});
  const std::string method = p.value("method", std::string{"brute"});
  if (mode != "maximal" && mode != "single")
    throw ConfigError("project: unknown mode '" + mode + "'");
  if (method != "brute" && method != "greedy")
    throw ConfigError("project: unknown method '" + method + "'");
  const ProjectionConfig pc = thresholds_from(cfg);

  const Trajectory traj = load_trajectory_csv(input);
  RunWriter writer(ctx);
  writer.note_input(input);

  if (!window_meets_scale(traj, window_len, pc.kappa))
    std::fprintf(stderr,
                 "warning: window duration %g is under kappa*t_c = %g; "
                 "projections may track transients\n",
                 static_cast<double>(window_len) * traj.dt(),
                 pc.kappa * traj.characteristic_time());

  std::vector<MaximalResult> results;
  if (mode == "maximal") {
    results = q_general(traj, window_len, pc,
                        method == "greedy" ? PartitionMethod::kGreedy
                                           : PartitionMethod::kBrute,
                        ctx.threads);
    std::size_t ties = 0, clamps = 0;
    for (const auto& r : results) {
      ties += r.tie_detected ? 1 : 0;
      clamps += r.alpha_clamped ? 1 : 0;
    }
    if (ties > 0)
      std::fprintf(stderr,
                   "warning: %zu window(s) had exact selection ties, resolved "
                   "to the canonical partition\n",
                   ties);
    if (clamps > 0)
      std::fprintf(stderr,
                   "warning: %zu window(s) clamped infinite dominance ratios "
                   "to alpha_cap = %g\n",
                   clamps, pc.alpha_cap);
  } else {
    for (const Window& w : windows(traj, window_len)) {
      const PowerSpectrum spectrum = power_spectrum(traj, w);
      MaximalResult r;
      r.window = w;
      r.state = q_single_from_spectrum(spectrum, pc.theta);
      if (r.state) {
        const double p_dom =
            spectrum.per_basis_power[r.state->components.front().basis_index];
        const double rest = spectrum.total_power - p_dom;
        r.alphas = {rest > 0.0 ? p_dom / rest : pc.alpha_cap};
        r.alpha_clamped = rest <= 0.0;
      }
      results.push_back(std::move(r));
    }
  }
  writer.emit_with("quasi.csv", [&](const std::string& path) {
    save_quasi_csv(results, path);
  });
  writer.finish();
  return 0;
}

int cmd_born(const json& cfg, const RunContext& ctx) {
  const json& b = cfg.at("born");
  PreparedSystem sys;
  if (b.contains("coefficients")) {
    sys.coefficients = parse_amplitudes(b.at("coefficients"));
  } else if (b.contains("powers")) {
    for (const auto& e : b.at("powers"))
      sys.coefficients.emplace_back(std::sqrt(e.get<double>()), 0.0);
  } else {
    throw ConfigError("born: need 'coefficients' or 'powers'");
  }
  if (b.contains("labels"))
    sys.labels = b.at("labels").get<std::vector<std::string>>();

  // Default pointer map: sector k reports pointer k+1, keeping pointer 0 as
  // the quiet reading that Null/unfixated trials tally to.
  std::vector<int> pointer_map;
  if (b.contains("pointer_map")) {
    pointer_map = b.at("pointer_map").get<std::vector<int>>();
  } else {
    for (std::size_t k = 0; k < sys.coefficients.size(); ++k)
      pointer_map.push_back(static_cast<int>(k) + 1);
  }

  MonteCarloOptions options;
  options.step_budget = b.value("step_budget", options.step_budget);
  options.exclude_unfixated =
      b.value("exclude_unfixated", options.exclude_unfixated);
  options.threads = ctx.threads;
  const auto trials = b.value("trials", std::size_t{100000});
  const ProjectionConfig pc = thresholds_from(cfg);

  const MonteCarloResult result =
      monte_carlo(sys, pointer_map, trials, ctx.seed, pc, options);

  json report;
  report["analytic"] = result.analytic;
  report["empirical"] = result.empirical;
  report["std_error"] = result.std_error;
  report["unfixated_rate"] = result.unfixated_rate;
  report["trials"] = result.trials;
  report["tallied"] = result.tallied;
  report["step_budget"] = result.step_budget;
  json within(json::value_t::array);
  double worst = 0.0;
  for (std::size_t i = 0; i < result.analytic.size(); ++i) {
    const double dev = std::abs(result.empirical[i] - result.analytic[i]);
    const double se = result.std_error[i];
    within.push_back(se > 0.0 ? dev <= 3.0 * se : dev == 0.0);
    if (se > 0.0) worst = std::max(worst, dev / se);
  }
  report["within_3se"] = within;
  report["max_deviation_se"] = worst;

  RunWriter writer(ctx);
  writer.emit("born.json", report.dump(2) + "\n");
  writer.finish();
  return 0;
}

int cmd_comm(const json& cfg, const RunContext& ctx) {
  const json& c = cfg.at("comm");
  const int pointer_values = c.value("pointer_values", 2);

  RunWriter writer(ctx);
  std::vector<Message> stream;
  if (c.contains("replay")) {
    const std::string replay = c.at("replay").get<std::string>();
    stream = load_transcript(replay);
    writer.note_input(replay);
  } else {
    const Agent alice = make_alice(pointer_values);
    const std::vector<Agent> noise =
        make_noise_agents(c.value("noise_sources", std::size_t{3}),
                          pointer_values);
    ChannelOptions options;
    options.interaction_prob =
        c.value("interaction_prob", options.interaction_prob);
    stream = run_channel(alice, noise, c.value("ticks", std::int64_t{10000}),
                         ctx.seed, options)
                 .stream;
  }

  const std::vector<Record> records =
      decode(stream, make_language_criterion(kAliceTag));

  writer.emit_with("transcript.jsonl", [&](const std::string& path) {
    save_transcript(stream, path);
  });
  writer.emit_with("records.csv", [&](const std::string& path) {
    save_records_csv(records, path);
  });

  const AnnotatedHistogram hist = histogram(records, pointer_values);
  std::ostringstream hist_csv;
  hist_csv << "pointer,count,arrivals\n";
  for (int v = 1; v <= pointer_values; ++v) {
    hist_csv << v << "," << hist.counts[v] << ",";
    const auto& times = hist.times[v];
    for (std::size_t i = 0; i < times.size(); ++i)
      hist_csv << (i > 0 ? ";" : "") << times[i];
    hist_csv << "\n";
  }
  writer.emit("histogram.csv", hist_csv.str());

  writer.finish();
  return 0;
}

int cmd_consistency(const json& cfg, const RunContext& ctx) {
  const json c = cfg.value("consistency", json::object());
  const ProjectionConfig pc = thresholds_from(cfg);

  MeasurementScenarioConfig mc;
  mc.window_len = c.value("window_len", mc.window_len);
  mc.dt = c.value("dt", mc.dt);
  mc.noise_sources = c.value("noise_sources", mc.noise_sources);
  mc.seed = ctx.seed != 0 ? ctx.seed : mc.seed;
  mc.quantize_digits = pc.quantize_digits;
  mc.alpha_min = pc.alpha_min;
  const MeasurementScenario scenario = build_measurement_scenario(mc);

  RunWriter writer(ctx);
  MeasurementComposite composite = scenario.composite;
  const int fault_index = c.value("fault_index", -1);
  if (fault_index >= 0) {
    const FaultInjection fault =
        inject_fault(scenario, static_cast<std::size_t>(fault_index));
    composite = fault.composite;
    json info;
    info["description"] = fault.description;
    json pairs(json::value_t::array);
    for (const auto& [a, b] : fault.affected_pairs)
      pairs.push_back(json::array({a, b}));
    info["affected_pairs"] = pairs;
    writer.emit("fault.json", info.dump(2) + "\n");
  }

  const Diagram1Report d1 =
      check_diagram1(composite.observer, mc.quantize_digits);
  const Diagram2Report d2 = check_diagram2(composite, mc.quantize_digits);
  writer.emit("diagram1.json", diagram1_report_json(d1));
  writer.emit("diagram2.json", diagram2_report_json(d2));
  writer.finish();

  if (!d1.consistent() || !d2.consistent()) {
    std::fprintf(stderr,
                 "consistency: %zu diagram-1 and %zu+%zu diagram-2 "
                 "violation(s); see %s\n",
                 d1.violations.size(), d2.record_dynamics_violations.size(),
                 d2.pointer_violations.size(),
                 (ctx.out_dir + "/diagram2.json").c_str());
    return 4;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "quasim: windowed amplifying projections, pointer statistics, and "
      "measurement-channel experiments"};
  app.set_version_flag("--version", "quasim 1.0.0");
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed_flag = 0;
  unsigned threads = 1;

  CLI::App* sub_generate = app.add_subcommand(
      "generate", "write trajectory CSV files from a generator spec");
  CLI::App* sub_project = app.add_subcommand(
      "project", "project a trajectory file onto per-window quasi-states");
  CLI::App* sub_born = app.add_subcommand(
      "born", "Monte Carlo pointer statistics for a prepared system");
  CLI::App* sub_comm = app.add_subcommand(
      "comm", "drive (or replay) the noisy channel and decode records");
  CLI::App* sub_consistency = app.add_subcommand(
      "consistency", "run the measurement scenario and check its diagrams");

  for (CLI::App* sub : {sub_generate, sub_project, sub_born, sub_comm,
                        sub_consistency}) {
    sub->add_option("--config", config_path, "JSON config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", seed_flag, "override the config's seed");
    sub->add_option("--out", out_dir, "output directory (default: out)");
    sub->add_option("--threads", threads, "worker threads (default: 1)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  RunContext ctx;
  ctx.command = sub->get_name();
  ctx.config_path = config_path;
  ctx.out_dir = out_dir;
  ctx.threads = threads;

  try {
    ctx.config_text = read_file(config_path);
    const json cfg = json::parse(ctx.config_text);
    ctx.seed = cfg.value("seed", std::uint64_t{0});
    if (sub->count("--seed") > 0) ctx.seed = seed_flag;

    if (ctx.command == "generate") return cmd_generate(cfg, ctx);
    if (ctx.command == "project") return cmd_project(cfg, ctx);
    if (ctx.command == "born") return cmd_born(cfg, ctx);
    if (ctx.command == "comm") return cmd_comm(cfg, ctx);
    if (ctx.command == "consistency") return cmd_consistency(cfg, ctx);
    std::fprintf(stderr, "unknown subcommand %s\n", ctx.command.c_str());
    return 1;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 2;
  } catch (const std::out_of_range& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 3;
  }
}
