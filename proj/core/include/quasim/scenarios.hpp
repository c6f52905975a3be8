// Constructed experiment instances shared by the test suites and the CLI:
// spin arrays in the four reference regimes, the sparse-sample agreement
// pair, the rebalancing nonlinearity witness, and the end-to-end measurement
// scenario with its fault-injection harness.

#ifndef QUASIM_SCENARIOS_HPP_
#define QUASIM_SCENARIOS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "quasim/born.hpp"
#include "quasim/channel.hpp"
#include "quasim/config.hpp"
#include "quasim/consistency.hpp"
#include "quasim/projection.hpp"
#include "quasim/trajectory.hpp"

namespace quasim {

// ---------------------------------------------------------------------------
// Spin arrays: independent dim-2 trajectories evaluated spin by spin.

enum class SpinKind { kRandomFast, kBalanced, kPure, kNearBalanced };

struct SpinArraySpec {
  std::vector<SpinKind> spins;
  std::size_t steps = 3000;
  double dt = 0.001;
  double t_c = 0.001;   // random-fast characteristic time
  double delta = 0.05;  // near-balanced power imbalance: (0.5+d, 0.5-d)
};

// Convenience: M spins of one kind.
SpinArraySpec uniform_spin_array(SpinKind kind, std::size_t count);
// The mixed regime: `pure_count` pure spins followed by near-balanced ones.
SpinArraySpec mixed_spin_array(std::size_t pure_count, std::size_t count,
                               double delta = 0.05);

std::vector<Trajectory> build_spin_array(const SpinArraySpec& spec,
                                         std::uint64_t seed);

struct SpinWindowSummary {
  std::size_t window_index = 0;
  std::size_t total_components = 0;    // summed over spins
  std::vector<int> per_spin_component;  // basis index, or -1 for Null
};

// Per-spin maximal quasi-state per window, aggregated across the array.
std::vector<SpinWindowSummary> evaluate_spin_array(
    const std::vector<Trajectory>& spins, std::size_t window_len,
    const ProjectionConfig& cfg);

// ---------------------------------------------------------------------------
// Two trajectories that agree bitwise on the first sample of every window
// yet project to different quasi-states on every window: `a` stays pure on
// index 0, `b` spends the rest of each window on index 1.

struct SparseAgreementPair {
  Trajectory a;
  Trajectory b;
  std::size_t window_len;
};

SparseAgreementPair sparse_agreement_pair(std::size_t windows = 3,
                                          double dt = 0.25);

// ---------------------------------------------------------------------------
// Nonlinearity witness: both inputs project to Null on every window, their
// renormalized sum projects to a pure state.

struct RebalancedTriple {
  Trajectory plus;
  Trajectory minus;
  Trajectory rebalanced;  // per-sample normalized sum of the other two
};

RebalancedTriple rebalanced_triple(std::size_t steps = 8, double dt = 0.125);

// ---------------------------------------------------------------------------
// End-to-end measurement scenario.
//
// A three-sector apparatus chain (ready sector on pointer 0, one sector per
// pointer value) is scripted through the window schedule
//   ready, vacuous, P1, P2, ready, P1, P2
// where the vacuous window holds a uniform three-way superposition and every
// other window concentrates all power in its sector.  The observer
// trajectory mirrors the same schedule over its own three memory states, the
// reporter announces each window over the noisy channel, and the decoded
// records, the induced apparatus sequence, and the observer's interpreted
// quasi-state sequence assemble into a measurement composite whose legs all
// commute: the label dynamics is the cycle status:0 -> pointer:1 ->
// pointer:2 -> status:0.

struct MeasurementScenarioConfig {
  std::size_t window_len = 64;
  double dt = 1.0 / 64.0;
  std::size_t noise_sources = 3;
  std::uint64_t seed = 2026;
  int quantize_digits = 6;
  double alpha_min = 1.0;
};

struct MeasurementScenario {
  std::vector<int> schedule;  // per window: pointer value, -1 = vacuous
  int pointer_values;
  JointChain apparatus;
  Trajectory observer;
  std::vector<std::optional<QuasiState>> apparatus_sequence;
  std::vector<MaximalResult> observer_results;
  std::vector<Message> transcript;
  std::vector<Record> records;
  MeasurementComposite composite;
  MeasurementScenarioConfig config;
};

MeasurementScenario build_measurement_scenario(
    const MeasurementScenarioConfig& config = {});

// ---------------------------------------------------------------------------
// Single-entry fault injection over the composite's interpretation and
// info-dynamics tables.  `index` cycles deterministically through every
// entry and every wrong-but-resolvable replacement label; affected_pairs
// lists the window pairs reachable through the corrupted entry — a correct
// checker reports at least one violation, all of them inside that set.

struct FaultInjection {
  MeasurementComposite composite;
  std::string description;
  std::vector<std::pair<std::size_t, std::size_t>> affected_pairs;
};

std::size_t fault_site_count(const MeasurementScenario& scenario);
FaultInjection inject_fault(const MeasurementScenario& scenario,
                            std::size_t index);

}  // namespace quasim

#endif  // QUASIM_SCENARIOS_HPP_
