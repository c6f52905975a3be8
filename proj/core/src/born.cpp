#include "quasim/born.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

#include "quasim/parallel.hpp"
#include "quasim/rng.hpp"

namespace quasim {
namespace {

std::vector<double> squared_magnitudes(const std::vector<Complex>& v) {
  std::vector<double> p(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) p[k] = std::norm(v[k]);
  return p;
}

void validate_pointer_map(const std::vector<int>& pointer_map,
                          std::size_t sectors) {
  if (pointer_map.size() != sectors)
    throw std::invalid_argument("pointer map must cover every sector");
  for (int p : pointer_map)
    if (p < 0) throw std::invalid_argument("pointer indices must be >= 0");
}

int pointer_space_size(const std::vector<int>& pointer_map) {
  int max_pointer = 0;
  for (int p : pointer_map) max_pointer = std::max(max_pointer, p);
  return max_pointer + 1;  // pointer 0 always exists
}

// Grouped instantaneous power rows for an arbitrary power table.
std::vector<std::vector<double>> group_rows(
    const std::vector<std::vector<double>>& sector_rows,
    const std::vector<int>& pointer_map, int pointer_count) {
  std::vector<std::vector<double>> rows(sector_rows.size());
  for (std::size_t m = 0; m < sector_rows.size(); ++m) {
    rows[m].assign(static_cast<std::size_t>(pointer_count), 0.0);
    for (std::size_t k = 0; k < pointer_map.size(); ++k)
      rows[m][static_cast<std::size_t>(pointer_map[k])] += sector_rows[m][k];
  }
  return rows;
}

}  // namespace

void validate_prepared(const PreparedSystem& sys, double eps_norm) {
  if (sys.coefficients.empty())
    throw std::invalid_argument("prepared system needs at least one sector");
  double nsq = 0.0;
  for (const Complex& c : sys.coefficients) nsq += std::norm(c);
  if (std::abs(nsq - 1.0) > eps_norm)
    throw std::invalid_argument("prepared coefficients are not normalized");
  if (!sys.labels.empty() && sys.labels.size() != sys.coefficients.size())
    throw std::invalid_argument("label count does not match sector count");
}

// ---------------------------------------------------------------------------

JointChain::JointChain(std::vector<std::vector<Complex>> sector_traces,
                       std::vector<int> pointer_map, double dt, double eps_norm)
    : traces_(std::move(sector_traces)), pointer_map_(std::move(pointer_map)), dt_(dt) {
  if (traces_.empty()) throw std::invalid_argument("chain needs at least one sector");
  if (dt_ <= 0.0) throw std::invalid_argument("chain dt must be positive");
  const std::size_t samples = traces_.front().size();
  if (samples < 2) throw std::invalid_argument("chain needs at least two samples");
  for (const auto& tr : traces_)
    if (tr.size() != samples)
      throw std::invalid_argument("sector traces must share one length");
  validate_pointer_map(pointer_map_, traces_.size());
  pointer_count_ = pointer_space_size(pointer_map_);
  for (std::size_t m = 0; m < samples; ++m) {
    double nsq = 0.0;
    for (const auto& tr : traces_) nsq += std::norm(tr[m]);
    if (std::abs(nsq - 1.0) > eps_norm) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "chain sample %zu is not normalized", m);
      throw std::invalid_argument(buf);
    }
  }
}

std::vector<std::vector<double>> JointChain::pointer_power_rows() const {
  const std::size_t samples = sample_count();
  std::vector<std::vector<double>> rows(samples);
  for (std::size_t m = 0; m < samples; ++m) {
    rows[m].assign(static_cast<std::size_t>(pointer_count_), 0.0);
    for (std::size_t k = 0; k < traces_.size(); ++k)
      rows[m][static_cast<std::size_t>(pointer_map_[k])] += std::norm(traces_[k][m]);
  }
  return rows;
}

JointChain JointChain::with_segments_swapped(std::size_t a_start,
                                             std::size_t b_start,
                                             std::size_t length) const {
  auto swapped = traces_;
  for (auto& tr : swapped)
    for (std::size_t j = 0; j < length; ++j)
      std::swap(tr[a_start + j], tr[b_start + j]);
  return JointChain(std::move(swapped), pointer_map_, dt_);
}

// ---------------------------------------------------------------------------

GeneratorSpec frozen_dynamics(const PreparedSystem& sys) {
  return Frozen{sys.coefficients};
}

GeneratorSpec martingale_dynamics(const PreparedSystem& sys) {
  return PowerMartingale{squared_magnitudes(sys.coefficients)};
}

JointChain build_chain(const PreparedSystem& sys, const std::vector<int>& pointer_map,
                       const GeneratorSpec& dynamics, std::size_t steps, double dt,
                       std::uint64_t seed) {
  validate_prepared(sys);
  const std::size_t sectors = sys.coefficients.size();
  validate_pointer_map(pointer_map, sectors);

  const Trajectory traj = generate(dynamics, sectors, steps, dt, seed);

  std::vector<std::vector<Complex>> traces(sectors);
  for (std::size_t k = 0; k < sectors; ++k) {
    traces[k].resize(steps);
    for (std::size_t m = 0; m < steps; ++m)
      traces[k][m] = traj.sample(m).entries[k];
  }

  // The power-martingale generator emits nonnegative real amplitudes; restore
  // each sector's prepared phase (magnitudes are untouched).
  const bool martingale = std::holds_alternative<PowerMartingale>(dynamics);
  if (martingale) {
    for (std::size_t k = 0; k < sectors; ++k) {
      const double mag = std::abs(sys.coefficients[k]);
      if (mag == 0.0) continue;
      const Complex phase = sys.coefficients[k] / mag;
      for (auto& v : traces[k]) v *= phase;
    }
  }

  // The chain must actually start at the prepared state.  Martingale powers
  // live on an integer grid, so compare powers at grid resolution there;
  // every other kind must reproduce the coefficients outright.
  for (std::size_t k = 0; k < sectors; ++k) {
    const bool ok = martingale
                        ? std::abs(std::norm(traces[k][0]) -
                                   std::norm(sys.coefficients[k])) <= 1e-8
                        : std::abs(traces[k][0] - sys.coefficients[k]) <= 1e-9;
    if (!ok)
      throw std::invalid_argument(
          "dynamics does not start at the prepared state");
  }

  return JointChain(std::move(traces), pointer_map, dt);
}

// ---------------------------------------------------------------------------

std::vector<double> pointer_window_powers(const JointChain& chain, const Window& w) {
  const PowerSpectrum spectrum =
      power_spectrum_from_rows(chain.pointer_power_rows(), w, chain.dt());
  return spectrum.per_basis_power;
}

std::vector<double> pointer_probability(const JointChain& chain, const Window& w) {
  std::vector<double> probs = pointer_window_powers(chain, w);
  const double duration = w.duration(chain.dt());
  for (double& p : probs) p /= duration;
  return probs;
}

std::optional<QuasiState> induced_quasi_state(const JointChain& chain,
                                              const Window& w, double alpha_min) {
  const PowerSpectrum spectrum =
      power_spectrum_from_rows(chain.pointer_power_rows(), w, chain.dt());
  return q_single_from_spectrum(spectrum, alpha_min);
}

std::optional<int> recorded_pointer(const std::optional<QuasiState>& state) {
  if (!state || state->components.size() != 1) return std::nullopt;
  return static_cast<int>(state->components.front().basis_index);
}

// ---------------------------------------------------------------------------

bool swap_test(const JointChain& chain, const Window& w, const SampleRange& seg_a,
               const SampleRange& seg_b, double alpha_min) {
  if (seg_a.length != seg_b.length)
    throw std::invalid_argument("swap_test: ragged segments");
  if (seg_a.length == 0) throw std::invalid_argument("swap_test: empty segments");
  const std::size_t samples = chain.sample_count();
  if (seg_a.start + seg_a.length > samples || seg_b.start + seg_b.length > samples)
    throw std::invalid_argument("swap_test: segment outside the chain");
  const SampleRange& lo = seg_a.start <= seg_b.start ? seg_a : seg_b;
  const SampleRange& hi = seg_a.start <= seg_b.start ? seg_b : seg_a;
  if (lo.start + lo.length > hi.start)
    throw std::invalid_argument("swap_test: overlapping segments");
  if (w.length == 0 || w.start + w.length > samples)
    throw std::invalid_argument("swap_test: window outside the chain");

  const auto before = induced_quasi_state(chain, w, alpha_min);
  const JointChain swapped =
      chain.with_segments_swapped(seg_a.start, seg_b.start, seg_a.length);
  const auto after = induced_quasi_state(swapped, w, alpha_min);
  if (before.has_value() != after.has_value()) return false;
  return !before || *before == *after;
}

// ---------------------------------------------------------------------------

MonteCarloResult monte_carlo(const PreparedSystem& sys,
                             const std::vector<int>& pointer_map,
                             std::size_t trials, std::uint64_t seed,
                             const ProjectionConfig& cfg,
                             const MonteCarloOptions& options) {
  validate_prepared(sys);
  validate_pointer_map(pointer_map, sys.coefficients.size());
  if (trials < 1) throw std::invalid_argument("monte_carlo: trials must be >= 1");
  if (options.step_budget < 2)
    throw std::invalid_argument("monte_carlo: step budget must be >= 2");

  const std::vector<double> initial = squared_magnitudes(sys.coefficients);
  const int pointers = pointer_space_size(pointer_map);
  const Window trial_window{0, options.step_budget};

  // One slot per trial keeps the tally independent of worker count and
  // scheduling; -1 marks budget exhaustion without fixation.
  std::vector<std::int32_t> outcome(trials, 0);
  const unsigned threads = options.threads == 0 ? 1 : options.threads;
  parallel_for(trials, threads, [&](std::size_t trial) {
    const MartingaleTrace trace = martingale_power_trace(
        initial, options.step_budget, derive_seed(seed, trial));
    if (!trace.fixated) {
      outcome[trial] = -1;
      return;
    }
    const auto rows = group_rows(trace.powers, pointer_map, pointers);
    const PowerSpectrum spectrum =
        power_spectrum_from_rows(rows, trial_window, 1.0);
    const auto state = q_single_from_spectrum(spectrum, cfg.alpha_min);
    outcome[trial] = recorded_pointer(state).value_or(0);
  });

  MonteCarloResult res;
  res.trials = trials;
  res.step_budget = options.step_budget;
  res.analytic.assign(static_cast<std::size_t>(pointers), 0.0);
  for (std::size_t k = 0; k < pointer_map.size(); ++k)
    res.analytic[static_cast<std::size_t>(pointer_map[k])] += initial[k];

  std::vector<std::size_t> counts(static_cast<std::size_t>(pointers), 0);
  std::size_t unfixated = 0;
  for (std::int32_t v : outcome) {
    if (v < 0) {
      ++unfixated;
      if (!options.exclude_unfixated) ++counts[0];
    } else {
      ++counts[static_cast<std::size_t>(v)];
    }
  }
  res.unfixated_rate = static_cast<double>(unfixated) / static_cast<double>(trials);
  res.tallied = options.exclude_unfixated ? trials - unfixated : trials;

  res.empirical.assign(static_cast<std::size_t>(pointers), 0.0);
  res.std_error.assign(static_cast<std::size_t>(pointers), 0.0);
  if (res.tallied > 0) {
    const double n = static_cast<double>(res.tallied);
    for (int i = 0; i < pointers; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      res.empirical[ui] = static_cast<double>(counts[ui]) / n;
      const double p = res.analytic[ui];
      res.std_error[ui] = std::sqrt(p * (1.0 - p) / n);
    }
  }
  return res;
}

// ---------------------------------------------------------------------------

CounterAssignment fine_grain(const std::vector<Rational>& pointer_probs) {
  if (pointer_probs.empty())
    throw std::invalid_argument("fine_grain: empty probability list");
  Rational sum(0, 1);
  std::int64_t lcd = 1;
  for (const Rational& p : pointer_probs) {
    if (p.num() < 0) throw std::invalid_argument("fine_grain: negative probability");
    sum = sum + p;
    lcd = checked_lcm(lcd, p.den());
  }
  if (sum != Rational(1, 1))
    throw std::invalid_argument("fine_grain: probabilities must sum to exactly 1");

  CounterAssignment assignment;
  assignment.counts.reserve(pointer_probs.size());
  std::int64_t total = 0;
  for (const Rational& p : pointer_probs) {
    const Rational scaled = p * Rational(lcd, 1);
    assignment.counts.push_back(scaled.num());  // den divides lcd, so exact
    total += scaled.num();
  }
  assignment.unit = Rational(1, total);  // total == lcd since the sum is 1
  return assignment;
}

}  // namespace quasim
