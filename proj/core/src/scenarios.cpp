#include "quasim/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>

#include "quasim/rng.hpp"

namespace quasim {

namespace {

constexpr int kVacuous = -1;

// Valid information labels of the measurement scenario; doubles as the pool
// of wrong-but-resolvable replacements for fault injection.
const std::vector<std::string> kInfoLabels = {"status:0", "pointer:1",
                                              "pointer:2"};

std::vector<Complex> sector_state(int pointer, std::size_t dim) {
  std::vector<Complex> amps(dim, Complex(0.0, 0.0));
  if (pointer == kVacuous) {
    // Uniform over every sector, the ready one included: the dominance ratio
    // of each pointer is 1/(dim-1), below any admission threshold >= 1.
    const double a = 1.0 / std::sqrt(static_cast<double>(dim));
    for (Complex& c : amps) c = Complex(a, 0.0);
  } else {
    amps[static_cast<std::size_t>(pointer)] = Complex(1.0, 0.0);
  }
  return amps;
}

}  // namespace

// ---------------------------------------------------------------------------
// Spin arrays.

SpinArraySpec uniform_spin_array(SpinKind kind, std::size_t count) {
  SpinArraySpec spec;
  spec.spins.assign(count, kind);
  return spec;
}

SpinArraySpec mixed_spin_array(std::size_t pure_count, std::size_t count,
                               double delta) {
  if (pure_count > count)
    throw std::invalid_argument("mixed_spin_array: pure_count exceeds count");
  SpinArraySpec spec;
  spec.spins.assign(count, SpinKind::kNearBalanced);
  std::fill_n(spec.spins.begin(), pure_count, SpinKind::kPure);
  spec.delta = delta;
  return spec;
}

std::vector<Trajectory> build_spin_array(const SpinArraySpec& spec,
                                         std::uint64_t seed) {
  if (spec.spins.empty())
    throw std::invalid_argument("build_spin_array: no spins");
  if (!(spec.delta >= 0.0 && spec.delta <= 0.5))
    throw std::invalid_argument("build_spin_array: delta outside [0, 0.5]");
  std::vector<Trajectory> spins;
  spins.reserve(spec.spins.size());
  for (std::size_t i = 0; i < spec.spins.size(); ++i) {
    GeneratorSpec gen = ConstantPure{0};
    switch (spec.spins[i]) {
      case SpinKind::kPure:
        gen = ConstantPure{0};
        break;
      case SpinKind::kBalanced:
        gen = BalancedSuperposition{{1, 1}};
        break;
      case SpinKind::kRandomFast:
        gen = RandomFast{spec.t_c};
        break;
      case SpinKind::kNearBalanced:
        gen = Frozen{{Complex(std::sqrt(0.5 + spec.delta), 0.0),
                      Complex(std::sqrt(0.5 - spec.delta), 0.0)}};
        break;
    }
    spins.push_back(generate(gen, 2, spec.steps, spec.dt, derive_seed(seed, i)));
  }
  return spins;
}

std::vector<SpinWindowSummary> evaluate_spin_array(
    const std::vector<Trajectory>& spins, std::size_t window_len,
    const ProjectionConfig& cfg) {
  if (spins.empty())
    throw std::invalid_argument("evaluate_spin_array: no spins");
  std::vector<std::vector<MaximalResult>> per_spin;
  per_spin.reserve(spins.size());
  for (const Trajectory& spin : spins)
    per_spin.push_back(q_general(spin, window_len, cfg));

  std::size_t windows = per_spin.front().size();
  for (const auto& results : per_spin)
    windows = std::min(windows, results.size());

  std::vector<SpinWindowSummary> summary(windows);
  for (std::size_t w = 0; w < windows; ++w) {
    SpinWindowSummary& row = summary[w];
    row.window_index = w;
    row.per_spin_component.reserve(spins.size());
    for (const auto& results : per_spin) {
      const std::optional<QuasiState>& state = results[w].state;
      if (state.has_value()) {
        row.total_components += state->components.size();
        row.per_spin_component.push_back(
            static_cast<int>(state->components.front().basis_index));
      } else {
        row.per_spin_component.push_back(-1);
      }
    }
  }
  return summary;
}

// ---------------------------------------------------------------------------
// Sparse agreement pair.

SparseAgreementPair sparse_agreement_pair(std::size_t windows, double dt) {
  if (windows == 0)
    throw std::invalid_argument("sparse_agreement_pair: no windows");
  constexpr std::size_t kWindowLen = 4;
  const std::vector<Complex> up{Complex(1.0, 0.0), Complex(0.0, 0.0)};
  const std::vector<Complex> down{Complex(0.0, 0.0), Complex(1.0, 0.0)};
  const std::size_t steps = windows * kWindowLen;

  Trajectory a = generate(ConstantPure{0}, 2, steps, dt, 0);

  Piecewise plan;
  plan.segments.reserve(2 * windows);
  for (std::size_t w = 0; w < windows; ++w) {
    plan.segments.push_back({1, up});
    plan.segments.push_back({kWindowLen - 1, down});
  }
  Trajectory b = generate(plan, 2, steps, dt, 0);

  return {std::move(a), std::move(b), kWindowLen};
}

// ---------------------------------------------------------------------------
// Nonlinearity witness.

RebalancedTriple rebalanced_triple(std::size_t steps, double dt) {
  Trajectory plus = generate(BalancedSuperposition{{1, 1}}, 2, steps, dt, 0);
  Trajectory minus = generate(BalancedSuperposition{{1, -1}}, 2, steps, dt, 0);

  std::vector<AmplitudeVector> samples;
  samples.reserve(plus.sample_count());
  for (std::size_t m = 0; m < plus.sample_count(); ++m) {
    const auto& pa = plus.sample(m).entries;
    const auto& mi = minus.sample(m).entries;
    std::vector<Complex> sum(pa.size());
    double nsq = 0.0;
    for (std::size_t k = 0; k < pa.size(); ++k) {
      sum[k] = pa[k] + mi[k];
      nsq += std::norm(sum[k]);
    }
    if (nsq <= 0.0)
      throw std::runtime_error("rebalanced_triple: inputs cancel exactly");
    const double inv = 1.0 / std::sqrt(nsq);
    for (Complex& c : sum) c *= inv;
    samples.push_back(AmplitudeVector{std::move(sum), false});
  }
  Trajectory rebalanced(std::move(samples), plus.dt(),
                        plus.characteristic_time(), plus.basis_labels());
  return {std::move(plus), std::move(minus), std::move(rebalanced)};
}

// ---------------------------------------------------------------------------
// Measurement scenario.

MeasurementScenario build_measurement_scenario(
    const MeasurementScenarioConfig& config) {
  if (config.window_len < 1)
    throw std::invalid_argument("measurement scenario: empty windows");
  if (config.dt <= 0.0)
    throw std::invalid_argument("measurement scenario: dt must be positive");

  const std::vector<int> schedule = {0, kVacuous, 1, 2, 0, 1, 2};
  constexpr int kPointerValues = 2;
  constexpr std::size_t kDim = 3;  // ready sector + one per pointer value
  const std::size_t windows = schedule.size();
  const std::size_t steps = windows * config.window_len;

  Piecewise plan;
  plan.segments.reserve(windows);
  for (int entry : schedule)
    plan.segments.push_back({config.window_len, sector_state(entry, kDim)});

  PreparedSystem sys;
  sys.coefficients = sector_state(schedule.front(), kDim);
  sys.labels = {"ready", "s1", "s2"};
  const std::vector<int> pointer_map = {0, 1, 2};
  JointChain apparatus = build_chain(sys, pointer_map, plan, steps, config.dt,
                                     derive_seed(config.seed, 0));

  // The observer mirrors the schedule over its own three memory states.
  Trajectory observer =
      generate(plan, kDim, steps, config.dt, derive_seed(config.seed, 0));

  std::vector<std::optional<QuasiState>> apparatus_sequence;
  apparatus_sequence.reserve(windows);
  for (std::size_t w = 0; w < windows; ++w)
    apparatus_sequence.push_back(induced_quasi_state(
        apparatus, Window{w * config.window_len, config.window_len},
        config.alpha_min));

  ProjectionConfig cfg;
  cfg.alpha_min = config.alpha_min;
  cfg.quantize_digits = config.quantize_digits;
  std::vector<MaximalResult> observer_results =
      q_general(observer, config.window_len, cfg);

  // One channel tick per window: quiet on ready and vacuous windows,
  // an S interaction carrying the pointer value otherwise.
  std::vector<int> ticks;
  ticks.reserve(windows);
  for (int entry : schedule) ticks.push_back(entry <= 0 ? 0 : entry);
  const Agent alice = make_alice(kPointerValues);
  const std::vector<Agent> noise =
      make_noise_agents(config.noise_sources, kPointerValues);
  ChannelResult run =
      run_channel_scripted(alice, noise, ticks, derive_seed(config.seed, 1));
  std::vector<Record> records =
      decode(run.stream, make_language_criterion(kAliceTag));

  // Window labels from the decoded records, carried over unchanged through
  // windows without a record of their own.
  std::vector<std::string> record_labels(windows);
  {
    std::map<std::int64_t, std::string> by_time;
    for (const Record& rec : records)
      by_time[rec.time] = content_label(rec.content);
    std::string carried = "status:0";
    for (std::size_t w = 0; w < windows; ++w) {
      const auto it = by_time.find(static_cast<std::int64_t>(w));
      if (it != by_time.end()) carried = it->second;
      record_labels[w] = carried;
    }
  }

  // Interpretation from the states the observer actually reached; dynamics
  // is the label cycle the schedule walks.
  InterpretationTable interp;
  for (std::size_t w = 0; w < windows; ++w) {
    if (schedule[w] == kVacuous) continue;
    interp[quasi_state_id(observer_results[w].state, config.quantize_digits)] =
        kInfoLabels[static_cast<std::size_t>(schedule[w])];
  }
  InfoDynamics dyn;
  dyn["status:0"] = "pointer:1";
  dyn["pointer:1"] = "pointer:2";
  dyn["pointer:2"] = "status:0";

  MeasurementComposite composite{
      apparatus_sequence, record_labels,
      DiagramInstance{state_sequence(observer_results), interp, dyn}};

  return MeasurementScenario{schedule,
                             kPointerValues,
                             std::move(apparatus),
                             std::move(observer),
                             std::move(apparatus_sequence),
                             std::move(observer_results),
                             std::move(run.stream),
                             std::move(records),
                             std::move(composite),
                             config};
}

// ---------------------------------------------------------------------------
// Fault injection.

std::size_t fault_site_count(const MeasurementScenario& scenario) {
  return scenario.composite.observer.interpretation.size() +
         scenario.composite.observer.info_dynamics.size();
}

FaultInjection inject_fault(const MeasurementScenario& scenario,
                            std::size_t index) {
  const DiagramInstance& observer = scenario.composite.observer;

  // Site list: interpretation entries first, then dynamics entries, each in
  // its map's (sorted) key order.
  std::vector<std::pair<bool, std::string>> sites;  // {is_interpretation, key}
  for (const auto& [key, value] : observer.interpretation)
    sites.emplace_back(true, key);
  for (const auto& [key, value] : observer.info_dynamics)
    sites.emplace_back(false, key);
  if (sites.empty())
    throw std::logic_error("inject_fault: no corruptible entries");

  const std::size_t site = index % sites.size();
  const bool is_interp = sites[site].first;
  const std::string& key = sites[site].second;
  const std::string current = is_interp ? observer.interpretation.at(key)
                                        : observer.info_dynamics.at(key);

  // Replace with a different in-language label so every lookup still
  // resolves and the checker reports a mismatch, not an exception.
  std::vector<std::string> alternatives;
  for (const std::string& label : kInfoLabels)
    if (label != current) alternatives.push_back(label);
  const std::string& replacement =
      alternatives[(index / sites.size()) % alternatives.size()];

  FaultInjection fault{scenario.composite, {}, {}};
  if (is_interp)
    fault.composite.observer.interpretation[key] = replacement;
  else
    fault.composite.observer.info_dynamics[key] = replacement;

  char text[256];
  std::snprintf(text, sizeof text, "%s['%s'] = '%s' (was '%s')",
                is_interp ? "interpretation" : "info_dynamics", key.c_str(),
                replacement.c_str(), current.c_str());
  fault.description = text;

  // Window pairs reachable through the corrupted entry.  Checkable pairs
  // coincide on both legs here: the observer is Null exactly on the
  // apparatus's vacuous windows.
  const std::size_t windows = scenario.schedule.size();
  std::vector<std::string> ids(windows);
  for (std::size_t w = 0; w < windows; ++w)
    ids[w] = quasi_state_id(scenario.observer_results[w].state,
                            scenario.config.quantize_digits);
  const auto vacuous = [&](std::size_t w) {
    return !scenario.composite.apparatus_sequence[w].has_value();
  };

  std::set<std::pair<std::size_t, std::size_t>> affected;
  for (std::size_t w = 0; w + 1 < windows; ++w) {
    if (vacuous(w) || vacuous(w + 1)) continue;
    bool hit = false;
    if (is_interp) {
      hit = ids[w] == key || ids[w + 1] == key;
    } else {
      const auto it = observer.interpretation.find(ids[w]);
      const bool observer_hit =
          it != observer.interpretation.end() && it->second == key;
      const bool record_hit = scenario.composite.record_labels[w] == key;
      hit = observer_hit || record_hit;
    }
    if (hit) affected.insert({w, w + 1});
  }
  fault.affected_pairs.assign(affected.begin(), affected.end());
  return fault;
}

}  // namespace quasim
