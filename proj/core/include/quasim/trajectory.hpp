// Sampled complex-amplitude trajectories.
//
// A trajectory is an immutable, uniformly sampled path of a normalized
// complex amplitude vector, together with the sampling interval and the
// characteristic time of its dynamics.  Windows select contiguous sample
// ranges for downstream integration; the tensor product combines component
// systems sample by sample.

#ifndef QUASIM_TRAJECTORY_HPP_
#define QUASIM_TRAJECTORY_HPP_

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace quasim {

using Complex = std::complex<double>;

// One sample of the state.  `unnormalized` marks intentional intermediate
// values; validation otherwise requires |entries| = 1 within eps.
struct AmplitudeVector {
  std::vector<Complex> entries;
  bool unnormalized = false;

  double norm_sq() const;
};

// Throws std::invalid_argument when the invariant is violated.
void validate_amplitude(const AmplitudeVector& v, double eps_norm);

// Contiguous sample range [start, start + length).
struct Window {
  std::size_t start = 0;
  std::size_t length = 0;

  double duration(double dt) const { return static_cast<double>(length) * dt; }
};

class Trajectory {
 public:
  // Validates: dim >= 1, >= 2 samples, uniform dimension, dt > 0,
  // t_c >= dt, per-sample normalization within eps_norm.
  Trajectory(std::vector<AmplitudeVector> samples, double dt,
             double characteristic_time, std::vector<std::string> basis_labels,
             double eps_norm = 1e-9);

  std::size_t dim() const { return dim_; }
  std::size_t sample_count() const { return samples_.size(); }
  double dt() const { return dt_; }
  double characteristic_time() const { return t_c_; }
  const std::vector<std::string>& basis_labels() const { return labels_; }
  const AmplitudeVector& sample(std::size_t m) const { return samples_[m]; }
  const std::vector<AmplitudeVector>& samples() const { return samples_; }

 private:
  std::vector<AmplitudeVector> samples_;
  double dt_;
  double t_c_;
  std::size_t dim_;
  std::vector<std::string> labels_;
};

// ---------------------------------------------------------------------------
// Generators.  Pure functions of their parameters and the seed: the same
// spec and seed always produce the same trajectory, byte for byte once
// serialized.

struct ConstantPure {
  std::size_t k = 0;  // occupied basis index
};

struct BalancedSuperposition {
  std::vector<int> signs;  // one of {+1, -1} per basis index
};

// Holds an explicit (normalized) amplitude vector for every sample.
struct Frozen {
  std::vector<Complex> amplitudes;
};

// Haar-like random unit vectors resampled every ceil(t_c / dt) steps,
// linearly interpolated between anchors and renormalized per sample.
struct RandomFast {
  double t_c = 0.0;
};

// Piecewise-constant schedule of explicit states.
struct PiecewiseSegment {
  std::size_t steps = 0;
  std::vector<Complex> amplitudes;
};
struct Piecewise {
  std::vector<PiecewiseSegment> segments;
};

// Real nonnegative amplitudes sqrt(p_k(t)) where the powers p(t) follow the
// bounded pair-transfer martingale (see martingale_power_trace).
struct PowerMartingale {
  std::vector<double> initial_powers;  // sums to 1
};

using GeneratorSpec = std::variant<ConstantPure, BalancedSuperposition, Frozen,
                                   RandomFast, Piecewise, PowerMartingale>;

// Builds `steps` samples at spacing dt.  dim is validated against the kind
// (for Frozen/Piecewise/PowerMartingale it must match the embedded vectors).
Trajectory generate(const GeneratorSpec& spec, std::size_t dim,
                    std::size_t steps, double dt, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Martingale power dynamics (shared with the chain builder).
//
// Integer-grid pair transfer: powers are kept as units on a grid summing to
// `grid`; each step picks two live components and moves min(units) between
// them with equal probability either way.  Component power is a bounded
// martingale, the simplex vertices absorb, and the fixation probability of
// component k equals its initial unit share exactly.
struct MartingaleTrace {
  std::vector<std::vector<double>> powers;  // [step][component]
  std::optional<std::size_t> fixated;       // absorbing component, if reached
  std::size_t fixation_step = 0;            // first step at a vertex
};

inline constexpr std::int64_t kMartingaleGrid = 1ll << 30;

MartingaleTrace martingale_power_trace(const std::vector<double>& initial_powers,
                                       std::size_t steps, std::uint64_t seed,
                                       std::int64_t grid = kMartingaleGrid);

// ---------------------------------------------------------------------------
// Window tiling: maximal non-overlapping cover from sample 0; a trailing
// remainder shorter than length_samples is dropped.
std::vector<Window> windows(const Trajectory& traj, std::size_t length_samples);

// True when the window duration satisfies duration >= kappa * t_c.  Falling
// short is a scale warning for the caller to surface, not an error.
bool window_meets_scale(const Trajectory& traj, std::size_t length_samples,
                        double kappa);

// Sample-wise Kronecker product.  Requires equal dt and sample counts;
// labels combine i-major as "a⊗b"; t_c of the product is max(t_c_a, t_c_b).
Trajectory tensor(const Trajectory& a, const Trajectory& b);

// ---------------------------------------------------------------------------
// Serialization: CSV with header "t, re_0, im_0, re_1, im_1, ...", one row
// per sample, 17 significant digits.  A leading "# dt=... t_c=... labels=..."
// comment carries the metadata; loading is lossless.
void save_trajectory_csv(const Trajectory& traj, std::ostream& os);
void save_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory load_trajectory_csv(std::istream& is);
Trajectory load_trajectory_csv(const std::string& path);

}  // namespace quasim

#endif  // QUASIM_TRAJECTORY_HPP_
