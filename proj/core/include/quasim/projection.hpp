// Window power integration and dominance projection.
//
// Over a window, each basis direction accumulates the left-rectangle Riemann
// sum of its squared amplitude.  The projection machinery asks whether the
// accumulated power is concentrated enough to stand in for the whole window:
// either one component dominating everything else (q_single), or a grouped
// partition of the index set where every group has an internally dominant
// component (maximal_quasi_state).  Windows that fail the test map to Null.
//
// Power sums add their per-sample terms in ascending value order, which makes
// every window integral bit-exact under sample permutations inside the
// window; downstream equality checks rely on that.

#ifndef QUASIM_PROJECTION_HPP_
#define QUASIM_PROJECTION_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "quasim/config.hpp"
#include "quasim/trajectory.hpp"

namespace quasim {

// Per-basis window power integrals, in time units (sum |amp|^2 * dt).
struct PowerSpectrum {
  Window window;
  std::vector<double> per_basis_power;
  double total_power = 0.0;
};

PowerSpectrum power_spectrum(const Trajectory& traj, const Window& w);

// Integrals straight from a power table: rows[m][k] is the instantaneous
// power of component k at sample m.  Used by chain-level consumers.
PowerSpectrum power_spectrum_from_rows(const std::vector<std::vector<double>>& rows,
                                       const Window& w, double dt);

// ---------------------------------------------------------------------------

// Index group with an internally dominant component.  alpha is the dominance
// ratio power[dominant] / (sum of the other members' power); +inf when the
// rest carries no power.  Admission requires alpha > alpha_min, strictly.
struct PartitionBlock {
  std::vector<std::size_t> members;  // sorted ascending, size >= 2
  std::size_t dominant = 0;
  double alpha = 0.0;
};

// Pairwise-disjoint blocks covering a subset of the index set, at least one
// block, in canonical order (blocks sorted lexicographically by members).
struct Partition {
  std::vector<PartitionBlock> blocks;
};

struct QuasiComponent {
  std::size_t basis_index = 0;
  double weight = 0.0;  // beta_i = sqrt(window power of the dominant index)
};

// Weighted stand-in state for one window.  normalization beta satisfies
// beta^2 = sum of weight^2; components are sorted by basis index.
struct QuasiState {
  Window window;
  std::vector<QuasiComponent> components;
  double normalization = 0.0;
};

bool operator==(const QuasiComponent& a, const QuasiComponent& b);
bool operator==(const QuasiState& a, const QuasiState& b);

// Projection outcome plus selection diagnostics.  `state` empty means Null.
// Exact (N, dispersion) ties between distinct admissible partitions are
// surfaced via tie_detected and resolved to the lexicographically smallest
// canonical form, never silently.
struct MaximalResult {
  Window window;
  std::optional<QuasiState> state;
  std::vector<double> alphas;   // per component, aligned with components
  double dispersion = 0.0;      // population std dev of clamped alphas
  bool tie_detected = false;
  bool alpha_clamped = false;   // infinite alpha entered the dispersion
};

// ---------------------------------------------------------------------------
// Single-component projection: r_k = power[k] / power[everything else];
// passes when max_k r_k exceeds theta strictly (a ratio equal to theta does
// not pass; all-zero windows are Null).  The returned state carries one
// component with weight sqrt(power[k]).
std::optional<QuasiState> q_single(const Trajectory& traj, const Window& w,
                                   double theta);
std::optional<QuasiState> q_single_from_spectrum(const PowerSpectrum& spectrum,
                                                 double theta);

// Every admissible grouped partition.  Throws when the dimension exceeds
// brute_force_limit; use greedy_partition beyond it.
std::vector<Partition> enumerate_partitions(const PowerSpectrum& spectrum,
                                            double alpha_min,
                                            int brute_force_limit = 12);

// Exhaustive selection: maximum block count, then minimum dispersion of the
// dominance ratios, then lexicographic canonical order.
MaximalResult maximal_quasi_state(const Trajectory& traj, const Window& w,
                                  const ProjectionConfig& cfg);
MaximalResult maximal_from_spectrum(const PowerSpectrum& spectrum,
                                    const ProjectionConfig& cfg);

// Deterministic heuristic for dimensions beyond the exhaustive limit: walk
// candidate dominants in descending power order and pair each with the
// weakest unused index.  No optimality claim; block count never exceeds the
// exhaustive optimum.
std::optional<Partition> greedy_partition(const PowerSpectrum& spectrum,
                                          double alpha_min);

enum class PartitionMethod { kBrute, kGreedy };

// Maximal quasi-state per tiled window.  Results are indexed by window and
// independent of the number of worker threads.
std::vector<MaximalResult> q_general(const Trajectory& traj,
                                     std::size_t window_samples,
                                     const ProjectionConfig& cfg,
                                     PartitionMethod method = PartitionMethod::kBrute,
                                     unsigned threads = 1);

// Builds the quasi-state for an explicit partition (used by both search
// strategies and by tests).
MaximalResult build_result(const PowerSpectrum& spectrum, const Partition& partition,
                           const ProjectionConfig& cfg);

// Population standard deviation of the ratios with infinities clamped to
// alpha_cap; addends are sorted ascending before summation.
double alpha_dispersion(const std::vector<double>& alphas, double alpha_cap,
                        bool* clamped_out);

// ---------------------------------------------------------------------------
// CSV: header "window_start, window_len, N, comp_index_1, weight_1, ...,
// alpha_1, ..., dispersion, null_flag", one row per window, 17 significant
// digits, component columns up to the largest N in the sequence.
void save_quasi_csv(const std::vector<MaximalResult>& results, std::ostream& os);
void save_quasi_csv(const std::vector<MaximalResult>& results,
                    const std::string& path);

}  // namespace quasim

#endif  // QUASIM_PROJECTION_HPP_
