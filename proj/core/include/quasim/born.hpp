// Pointer statistics of a system-apparatus chain.
//
// A prepared system's coefficients seed one amplitude trace per sector of a
// joint chain; each sector is tied to a pointer reading (pointer 0 is the
// reserved quiet reading).  Window power grouped by pointer yields the
// analytic pointer probabilities; the single-dominant amplifying projection
// applied to that grouped decomposition recovers the recorded pointer per
// window, or Null when nothing dominates.  Monte Carlo sampling drives the
// sector powers with the bounded pair-transfer martingale, whose fixation
// probability equals the initial power; empirical pointer frequencies
// therefore converge on the squared coefficients without any postulated
// sampling rule.

#ifndef QUASIM_BORN_HPP_
#define QUASIM_BORN_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "quasim/config.hpp"
#include "quasim/projection.hpp"
#include "quasim/rational.hpp"
#include "quasim/trajectory.hpp"

namespace quasim {

struct PreparedSystem {
  std::vector<Complex> coefficients;  // sum of squared magnitudes = 1
  std::vector<std::string> labels;    // optional, defaults to indices
};

void validate_prepared(const PreparedSystem& sys, double eps_norm = 1e-9);

// ---------------------------------------------------------------------------

// One amplitude trace per sector plus a pointer index per sector.  The
// pointer index space always includes the quiet pointer 0, whether or not a
// sector maps to it.
class JointChain {
 public:
  JointChain(std::vector<std::vector<Complex>> sector_traces,
             std::vector<int> pointer_map, double dt, double eps_norm = 1e-9);

  std::size_t sector_count() const { return traces_.size(); }
  std::size_t sample_count() const { return traces_.front().size(); }
  double dt() const { return dt_; }
  int pointer_count() const { return pointer_count_; }
  const std::vector<int>& pointer_map() const { return pointer_map_; }
  const std::vector<Complex>& sector_trace(std::size_t k) const { return traces_[k]; }

  // Instantaneous power per pointer index, one row per sample.
  std::vector<std::vector<double>> pointer_power_rows() const;

  // Copy with two equal-length disjoint sample segments exchanged across
  // every sector trace.
  JointChain with_segments_swapped(std::size_t a_start, std::size_t b_start,
                                   std::size_t length) const;

 private:
  std::vector<std::vector<Complex>> traces_;
  std::vector<int> pointer_map_;
  double dt_;
  int pointer_count_;
};

// Convenience dynamics for build_chain.
GeneratorSpec frozen_dynamics(const PreparedSystem& sys);
GeneratorSpec martingale_dynamics(const PreparedSystem& sys);

// Evolves the prepared coefficients with the named generator dynamics and
// groups the resulting per-sector traces under the pointer map.  The sample-0
// state must agree with the prepared coefficients (power-martingale dynamics
// carries squared magnitudes through an integer grid and keeps each sector's
// original phase; agreement there is within the grid resolution).
JointChain build_chain(const PreparedSystem& sys, const std::vector<int>& pointer_map,
                       const GeneratorSpec& dynamics, std::size_t steps, double dt,
                       std::uint64_t seed);

// ---------------------------------------------------------------------------

// Grouped window power per pointer index, time units.
std::vector<double> pointer_window_powers(const JointChain& chain, const Window& w);

// Powers normalized by the window duration; sums to 1 for normalized chains.
std::vector<double> pointer_probability(const JointChain& chain, const Window& w);

// Single-dominant amplifying projection over the pointer power decomposition:
// non-Null exactly when one pointer's window power exceeds alpha_min times
// the power of all others combined (strictly), and the resulting state's one
// component names the recorded pointer for the window.
std::optional<QuasiState> induced_quasi_state(const JointChain& chain,
                                              const Window& w, double alpha_min);

// The recorded pointer of an induced state: its single component's index.
std::optional<int> recorded_pointer(const std::optional<QuasiState>& state);

// ---------------------------------------------------------------------------

struct SampleRange {
  std::size_t start = 0;
  std::size_t length = 0;
};

// True iff the induced quasi-state of window w is identical before and after
// exchanging the two segments.  Guaranteed true when both segments lie
// inside w (window integrals are permutation-exact); segments elsewhere in
// the chain can move power across the window boundary and flip the outcome.
bool swap_test(const JointChain& chain, const Window& w, const SampleRange& seg_a,
               const SampleRange& seg_b, double alpha_min);

// ---------------------------------------------------------------------------

struct MonteCarloOptions {
  std::size_t step_budget = 10000;  // martingale steps per trial
  bool exclude_unfixated = false;   // drop unfixated trials from frequencies
                                    // instead of tallying them to pointer 0
  unsigned threads = 1;
};

struct MonteCarloResult {
  std::vector<double> analytic;    // pointer probability at t = 0
  std::vector<double> empirical;   // tallied frequencies
  std::vector<double> std_error;   // binomial standard error of analytic
  double unfixated_rate = 0.0;
  std::size_t trials = 0;
  std::size_t tallied = 0;         // trials entering the frequencies
  std::size_t step_budget = 0;
};

// Per trial: evolve the sector powers with the pair-transfer martingale for
// step_budget steps, extract the recorded pointer of the whole trial window
// through induced_quasi_state, tally.  Null outcomes and trials that end
// unfixated count as pointer 0 (the latter excludable via options).
MonteCarloResult monte_carlo(const PreparedSystem& sys,
                             const std::vector<int>& pointer_map,
                             std::size_t trials, std::uint64_t seed,
                             const ProjectionConfig& cfg,
                             const MonteCarloOptions& options = {});

// ---------------------------------------------------------------------------

// Exact counter decomposition: counts M_i = p_i * D over the least common
// denominator D, unit u = 1 / sum(M_i) = 1/D.  sum(M_i) * u == 1 and
// M_i * u == p_i with zero error.
struct CounterAssignment {
  std::vector<std::int64_t> counts;
  Rational unit;
};

CounterAssignment fine_grain(const std::vector<Rational>& pointer_probs);

}  // namespace quasim

#endif  // QUASIM_BORN_HPP_
