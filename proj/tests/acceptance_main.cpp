// Release gate: every acceptance criterion in one binary, one verdict line
// per criterion, wall-clock budgets enforced as failures.  Run with no
// arguments for the full gate, or with a criterion number to run one.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "machine_pair.hpp"
#include "partition_oracle.hpp"
#include "quasim/born.hpp"
#include "quasim/channel.hpp"
#include "quasim/consistency.hpp"
#include "quasim/projection.hpp"
#include "quasim/rational.hpp"
#include "quasim/scenarios.hpp"
#include "quasim/trajectory.hpp"

using namespace quasim;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void run_criterion(int number, int selected, const char* description,
                   double limit_seconds, const std::function<Outcome()>& body) {
  if (selected != 0 && selected != number) return;
  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = body();
  } catch (const std::exception& e) {
    outcome.pass = false;
    outcome.detail = std::string("exception: ") + e.what();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (seconds > limit_seconds) {
    outcome.pass = false;
    std::ostringstream os;
    os << outcome.detail << "; over the " << limit_seconds << "s budget";
    outcome.detail = os.str();
  }
  if (!outcome.pass) ++g_failures;
  std::printf("%s %d %s — %s (%.2fs)\n", outcome.pass ? "PASS" : "FAIL", number,
              description, outcome.detail.c_str(), seconds);
  std::fflush(stdout);
}

std::vector<double> random_powers(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> p(dim);
  double total = 0.0;
  for (auto& v : p) {
    v = unit(rng);
    if (unit(rng) < 0.1) v = 0.0;
    total += v;
  }
  if (total == 0.0) p[0] = total = 1.0;
  for (auto& v : p) v /= total;
  return p;
}

// ---------------------------------------------------------------------------

Outcome spin_array_regimes() {
  ProjectionConfig cfg;
  cfg.theta = 2.0;
  cfg.alpha_min = 2.0;
  const std::size_t window = 1000;
  const std::size_t count = 8;

  std::size_t cells = 0;
  std::size_t nulls = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto spins =
        build_spin_array(uniform_spin_array(SpinKind::kRandomFast, count), seed);
    for (const auto& w : evaluate_spin_array(spins, window, cfg))
      for (int c : w.per_spin_component) {
        ++cells;
        nulls += c == -1 ? 1 : 0;
      }
  }
  const double null_frac = static_cast<double>(nulls) / static_cast<double>(cells);
  const bool random_ok = null_frac >= 0.99;

  bool balanced_ok = true;
  for (const auto& w : evaluate_spin_array(
           build_spin_array(uniform_spin_array(SpinKind::kBalanced, count), 0),
           window, cfg))
    for (int c : w.per_spin_component) balanced_ok = balanced_ok && c == -1;

  bool pure_ok = true;
  for (const auto& w : evaluate_spin_array(
           build_spin_array(uniform_spin_array(SpinKind::kPure, count), 0),
           window, cfg)) {
    pure_ok = pure_ok && w.total_components == count;
    for (int c : w.per_spin_component) pure_ok = pure_ok && c == 0;
  }

  bool mixed_ok = true;
  for (const auto& w : evaluate_spin_array(
           build_spin_array(mixed_spin_array(3, count), 0), window, cfg)) {
    mixed_ok = mixed_ok && w.total_components == 3;
    for (std::size_t i = 0; i < w.per_spin_component.size(); ++i)
      mixed_ok = mixed_ok && w.per_spin_component[i] == (i < 3 ? 0 : -1);
  }

  std::ostringstream os;
  os << "random-fast " << 100.0 * null_frac << "% Null over " << cells
     << " spin-windows; balanced all-Null " << (balanced_ok ? "yes" : "NO")
     << "; pure 8/8 " << (pure_ok ? "yes" : "NO") << "; mixed exactly 3 pure "
     << (mixed_ok ? "yes" : "NO");
  return Outcome{random_ok && balanced_ok && pure_ok && mixed_ok, os.str()};
}

Outcome maximal_matches_oracle() {
  ProjectionConfig cfg;
  std::mt19937_64 rng(20260819);
  std::size_t compared = 0;
  std::size_t ties = 0;
  std::size_t mismatches = 0;
  for (std::size_t dim = 4; dim <= 6; ++dim) {
    for (int trial = 0; trial < 1000; ++trial) {
      const std::vector<double> powers = random_powers(rng, dim);
      PowerSpectrum spectrum;
      spectrum.window = Window{0, 1};
      spectrum.per_basis_power = powers;
      for (double p : powers) spectrum.total_power += p;

      const MaximalResult got = maximal_from_spectrum(spectrum, cfg);
      const oracle::Selection want =
          oracle::select_maximal(powers, cfg.alpha_min, cfg.alpha_cap);

      if (got.tie_detected != want.tie) {
        ++mismatches;
        continue;
      }
      if (got.tie_detected) {
        ++ties;  // reported, not compared structurally
        continue;
      }
      ++compared;
      bool same = got.state.has_value() == want.admissible;
      if (same && want.admissible) {
        // Components sort by basis index, oracle groups by member lists.
        std::vector<std::size_t> dominants;
        for (const auto& g : want.best.groups) dominants.push_back(g.dominant);
        std::sort(dominants.begin(), dominants.end());
        same = got.state->components.size() == dominants.size();
        for (std::size_t i = 0; same && i < dominants.size(); ++i)
          same = got.state->components[i].basis_index == dominants[i];
        same = same && std::abs(got.dispersion - want.dispersion) <= 1e-12;
      }
      if (!same) ++mismatches;
    }
  }
  std::ostringstream os;
  os << compared << " non-tied spectra agree, " << mismatches << " mismatches, "
     << ties << " exact ties reported";
  return Outcome{mismatches == 0, os.str()};
}

Outcome born_frequencies() {
  const std::vector<std::vector<double>> preparations = {
      {0.5, 0.5}, {0.7, 0.3}, {0.7, 0.2, 0.1}, {0.4, 0.3, 0.2, 0.1}};
  ProjectionConfig cfg;
  MonteCarloOptions options;
  options.step_budget = 256;

  bool all_ok = true;
  double worst_se = 0.0;
  double worst_unfixated = 0.0;
  std::uint64_t seed = 404;
  for (const auto& prep : preparations) {
    PreparedSystem sys;
    std::vector<int> map;
    for (std::size_t k = 0; k < prep.size(); ++k) {
      sys.coefficients.emplace_back(std::sqrt(prep[k]), 0.0);
      map.push_back(static_cast<int>(k) + 1);
    }
    const MonteCarloResult r =
        monte_carlo(sys, map, 100000, seed++, cfg, options);
    for (std::size_t v = 0; v < r.empirical.size(); ++v) {
      const double dev = std::abs(r.empirical[v] - r.analytic[v]);
      if (r.std_error[v] > 0.0) {
        worst_se = std::max(worst_se, dev / r.std_error[v]);
        all_ok = all_ok && dev <= 3.0 * r.std_error[v];
      } else {
        all_ok = all_ok && dev == 0.0;
      }
    }
    worst_unfixated = std::max(worst_unfixated, r.unfixated_rate);
    all_ok = all_ok && r.unfixated_rate < 0.01;
  }
  std::ostringstream os;
  os << preparations.size() << " preparations x 100000 trials; max |dev| "
     << worst_se << " SE; max unfixated rate " << worst_unfixated;
  return Outcome{all_ok, os.str()};
}

Outcome swap_invariance() {
  std::mt19937_64 rng(7141);
  std::size_t passed = 0;
  const std::size_t trials = 1000;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t dim = 2 + trial % 3;
    const std::size_t steps = 48;
    const double dt = 0.125;
    const Trajectory traj =
        generate(RandomFast{3 * dt}, dim, steps, dt, rng());

    std::vector<std::vector<Complex>> traces(dim, std::vector<Complex>(steps));
    std::vector<int> map;
    for (std::size_t k = 0; k < dim; ++k) map.push_back(static_cast<int>(k) + 1);
    for (std::size_t m = 0; m < steps; ++m)
      for (std::size_t k = 0; k < dim; ++k)
        traces[k][m] = traj.sample(m).entries[k];
    const JointChain chain(std::move(traces), map, dt);

    std::uniform_int_distribution<std::size_t> len_dist(8, 24);
    const std::size_t wlen = len_dist(rng);
    std::uniform_int_distribution<std::size_t> start_dist(0, steps - wlen);
    const std::size_t wstart = start_dist(rng);
    std::uniform_int_distribution<std::size_t> seg_dist(1, wlen / 4);
    const std::size_t seg = seg_dist(rng);
    std::uniform_int_distribution<std::size_t> a_dist(wstart,
                                                      wstart + wlen - 2 * seg);
    const std::size_t a_start = a_dist(rng);
    std::uniform_int_distribution<std::size_t> b_dist(a_start + seg,
                                                      wstart + wlen - seg);
    const std::size_t b_start = b_dist(rng);

    if (swap_test(chain, Window{wstart, wlen}, SampleRange{a_start, seg},
                  SampleRange{b_start, seg}, 1.0))
      ++passed;
  }

  // Counterexample: the swapped segment straddles the window boundary.
  std::vector<std::vector<Complex>> split(2, std::vector<Complex>(8));
  for (std::size_t m = 0; m < 8; ++m) {
    split[0][m] = m < 4 ? Complex(1, 0) : Complex(0, 0);
    split[1][m] = m < 4 ? Complex(0, 0) : Complex(1, 0);
  }
  const JointChain crosses(std::move(split), {1, 2}, 0.5);
  const bool counterexample_flips =
      !swap_test(crosses, Window{0, 4}, SampleRange{0, 4}, SampleRange{4, 4}, 1.0);

  std::ostringstream os;
  os << passed << "/" << trials
     << " in-window swaps invariant; cross-window counterexample flips "
     << (counterexample_flips ? "yes" : "NO");
  return Outcome{passed == trials && counterexample_flips, os.str()};
}

Outcome sparse_pair_disagrees() {
  const SparseAgreementPair pair = sparse_agreement_pair();
  ProjectionConfig cfg;
  const auto qa = q_general(pair.a, pair.window_len, cfg);
  const auto qb = q_general(pair.b, pair.window_len, cfg);
  bool ok = qa.size() == qb.size() && !qa.empty();
  std::size_t windows = qa.size();
  for (std::size_t w = 0; ok && w < windows; ++w) {
    const std::size_t first = w * pair.window_len;
    ok = pair.a.sample(first).entries == pair.b.sample(first).entries;
    ok = ok && qa[w].state.has_value() && qb[w].state.has_value();
    if (ok)
      ok = qa[w].state->components[0].basis_index !=
           qb[w].state->components[0].basis_index;
  }
  std::ostringstream os;
  os << windows
     << " windows: first samples bitwise equal, projections disagree on every "
        "window";
  return Outcome{ok, os.str()};
}

Outcome identification_and_recognition() {
  const MooreMachine deep = machine_pair::deep_counter();
  const MooreMachine flat = machine_pair::flat_counter();

  const bool blind3 = !identification_experiment(deep, flat, 3).has_value();
  const auto found = identification_experiment(deep, flat, 4);
  bool found4 = found.has_value() && found->size() == 4;
  if (found4) found4 = run_outputs(deep, *found) != run_outputs(flat, *found);

  bool sweep_ok = true;
  for (std::size_t len = 0; len <= 4; ++len) {
    std::vector<Symbol> input(len, 0);
    const std::size_t total = std::size_t{1} << len;
    for (std::size_t code = 0; code < total; ++code) {
      for (std::size_t i = 0; i < len; ++i)
        input[i] = static_cast<Symbol>((code >> i) & 1);
      const bool same = run_outputs(deep, input) == run_outputs(flat, input);
      sweep_ok = sweep_ok && (len <= 3 ? same : !same);
    }
  }

  const Agent alice = make_alice(3);
  const auto noise = make_noise_agents(3, 3);
  const ChannelResult run = run_channel(alice, noise, 10000, 60901);
  const auto records = decode(run.stream, make_language_criterion(kAliceTag));
  bool channel_ok = records.size() == run.alice.size();
  for (std::size_t i = 0; channel_ok && i < records.size(); ++i) {
    const Message& truth = run.alice[i];
    channel_ok = records[i].time == truth.emit_time &&
                 records[i].content.is_pointer ==
                     (truth.kind == MessageKind::kPointer) &&
                 records[i].content.value == truth.value;
  }

  std::ostringstream os;
  os << "depth-3 blind " << (blind3 ? "yes" : "NO") << "; depth-4 experiment "
     << (found4 ? "found" : "MISSING") << "; exhaustive sweep "
     << (sweep_ok ? "confirms" : "FAILS") << "; " << records.size()
     << " records decoded from 10000 ticks with full precision and recall "
     << (channel_ok ? "yes" : "NO");
  return Outcome{blind3 && found4 && sweep_ok && channel_ok, os.str()};
}

Outcome diagrams_commute() {
  const MeasurementScenario scenario = build_measurement_scenario({});
  const Diagram1Report d1 = check_diagram1(scenario.composite.observer);
  const Diagram2Report d2 = check_diagram2(scenario.composite);
  bool clean = d1.consistent() && d2.consistent() && d1.pairs_checked > 0;

  const std::size_t faults = 50;
  std::size_t caught = 0;
  std::size_t localized = 0;
  for (std::size_t index = 0; index < faults; ++index) {
    const FaultInjection fault = inject_fault(scenario, index);
    const Diagram2Report report = check_diagram2(fault.composite);
    std::vector<PairViolation> all = report.observer_leg.violations;
    all.insert(all.end(), report.record_dynamics_violations.begin(),
               report.record_dynamics_violations.end());
    if (all.empty() || !report.pointer_violations.empty()) continue;
    ++caught;
    bool inside = true;
    for (const auto& v : all) {
      bool hit = false;
      for (const auto& p : fault.affected_pairs)
        hit = hit || (p.first == v.window_a && p.second == v.window_b);
      inside = inside && hit;
    }
    localized += inside ? 1 : 0;
  }

  std::ostringstream os;
  os << "clean run: 0 violations over " << d1.pairs_checked
     << " observer pairs and " << d2.pairs_checked << " record pairs; " << caught
     << "/" << faults << " faults caught, " << localized << "/" << faults
     << " localized to their windows";
  return Outcome{clean && caught == faults && localized == faults, os.str()};
}

Outcome exact_counters_and_normalization() {
  const std::vector<std::vector<Rational>> lists = {
      {Rational(1, 2), Rational(1, 2)},
      {Rational(1, 3), Rational(1, 3), Rational(1, 3)},
      {Rational(7, 10), Rational(2, 10), Rational(1, 10)},
      {Rational(2, 5), Rational(3, 10), Rational(1, 5), Rational(1, 10)},
  };
  bool exact = true;
  for (const auto& probs : lists) {
    const CounterAssignment counters = fine_grain(probs);
    Rational total(0, 1);
    for (std::size_t i = 0; i < probs.size(); ++i) {
      const Rational share = Rational(counters.counts[i], 1) * counters.unit;
      exact = exact && share == probs[i];
      total = total + share;
    }
    exact = exact && total == Rational(1, 1);
  }

  // Normalization sweeps: generated samples and maximal quasi-states both
  // stay within 1e-9 of unit norm.
  double worst = 0.0;
  const std::vector<GeneratorSpec> specs = {
      ConstantPure{1},
      BalancedSuperposition{{1, -1, 1}},
      RandomFast{0.02},
      PowerMartingale{{0.5, 0.3, 0.2}},
  };
  for (const auto& spec : specs) {
    const Trajectory traj = generate(spec, 3, 60, 0.01, 5);
    for (std::size_t m = 0; m < traj.sample_count(); ++m)
      worst = std::max(worst, std::abs(traj.sample(m).norm_sq() - 1.0));
  }

  std::mt19937_64 rng(88);
  ProjectionConfig cfg;
  for (int trial = 0; trial < 200; ++trial) {
    PowerSpectrum spectrum;
    spectrum.window = Window{0, 1};
    spectrum.per_basis_power = random_powers(rng, 4 + trial % 3);
    for (double p : spectrum.per_basis_power) spectrum.total_power += p;
    const MaximalResult r = maximal_from_spectrum(spectrum, cfg);
    if (!r.state) continue;
    double sum = 0.0;
    for (const auto& c : r.state->components) {
      const double w = c.weight / r.state->normalization;
      sum += w * w;
    }
    worst = std::max(worst, std::abs(sum - 1.0));
  }

  std::ostringstream os;
  os << "counter shares and totals exact in rational arithmetic; worst "
        "normalization error "
     << worst;
  return Outcome{exact && worst <= 1e-9, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  int selected = 0;
  if (argc > 1) selected = std::atoi(argv[1]);

  run_criterion(1, selected,
                "spin arrays classify the four reference regimes", 10.0,
                spin_array_regimes);
  run_criterion(2, selected,
                "maximal projection agrees with the exhaustive oracle", 60.0,
                maximal_matches_oracle);
  run_criterion(3, selected,
                "martingale sampling reproduces the squared coefficients", 60.0,
                born_frequencies);
  run_criterion(4, selected, "in-window segment swaps never change the record",
                60.0, swap_invariance);
  run_criterion(5, selected,
                "single shared samples cannot determine the quasi-state", 10.0,
                sparse_pair_disagrees);
  run_criterion(6, selected,
                "identification depth and channel recognition", 30.0,
                identification_and_recognition);
  run_criterion(7, selected,
                "commutation diagrams hold and localize injected faults", 30.0,
                diagrams_commute);
  run_criterion(8, selected,
                "counter assignments are exact and states stay normalized",
                10.0, exact_counters_and_normalization);

  if (g_failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criteria failed\n", g_failures);
  return 1;
}
