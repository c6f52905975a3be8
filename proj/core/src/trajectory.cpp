#include "quasim/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "quasim/rng.hpp"

namespace quasim {
namespace {

constexpr double kDefaultEps = 1e-9;

std::vector<std::string> default_labels(std::size_t dim) {
  std::vector<std::string> labels(dim);
  for (std::size_t i = 0; i < dim; ++i) labels[i] = std::to_string(i);
  return labels;
}

std::vector<Complex> haar_unit_vector(std::size_t dim, Rng& rng) {
  std::vector<Complex> v(dim);
  double nsq = 0.0;
  do {
    nsq = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      v[k] = Complex(rng.next_normal(), rng.next_normal());
      nsq += std::norm(v[k]);
    }
  } while (nsq == 0.0);
  const double inv = 1.0 / std::sqrt(nsq);
  for (auto& e : v) e *= inv;
  return v;
}

AmplitudeVector as_sample(std::vector<Complex> entries) {
  AmplitudeVector s;
  s.entries = std::move(entries);
  return s;
}

void append_constant(std::vector<AmplitudeVector>& out,
                     const std::vector<Complex>& state, std::size_t steps) {
  for (std::size_t m = 0; m < steps; ++m) out.push_back(as_sample(state));
}

// Largest-remainder rounding of probabilities onto an integer grid.  The
// input is renormalized by its own sum so the floor parts can never exceed
// the grid total.
std::vector<std::int64_t> quantize_to_grid(const std::vector<double>& p,
                                           std::int64_t grid) {
  const std::size_t n = p.size();
  double total = 0.0;
  for (double v : p) total += v;
  std::vector<std::int64_t> units(n);
  std::vector<std::pair<double, std::size_t>> rem(n);
  std::int64_t assigned = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double exact = (p[k] / total) * static_cast<double>(grid);
    units[k] = static_cast<std::int64_t>(std::floor(exact));
    rem[k] = {exact - std::floor(exact), k};
    assigned += units[k];
  }
  std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (std::size_t i = 0; assigned < grid; ++i, ++assigned) units[rem[i % n].second] += 1;
  return units;
}

}  // namespace

double AmplitudeVector::norm_sq() const {
  double s = 0.0;
  for (const auto& e : entries) s += std::norm(e);
  return s;
}

void validate_amplitude(const AmplitudeVector& v, double eps_norm) {
  if (v.entries.empty())
    throw std::invalid_argument("amplitude vector: dimension must be >= 1");
  if (!v.unnormalized) {
    const double n = v.norm_sq();
    if (std::abs(n - 1.0) > eps_norm)
      throw std::invalid_argument("amplitude vector: not normalized (|norm^2 - 1| = " +
                                  std::to_string(std::abs(n - 1.0)) + ")");
  }
}

Trajectory::Trajectory(std::vector<AmplitudeVector> samples, double dt,
                       double characteristic_time,
                       std::vector<std::string> basis_labels, double eps_norm)
    : samples_(std::move(samples)), dt_(dt), t_c_(characteristic_time) {
  if (samples_.size() < 2)
    throw std::invalid_argument("trajectory: needs at least two samples");
  if (!(dt_ > 0.0)) throw std::invalid_argument("trajectory: dt must be positive");
  if (!(t_c_ >= dt_))
    throw std::invalid_argument("trajectory: characteristic time below dt");
  dim_ = samples_.front().entries.size();
  for (const auto& s : samples_) {
    if (s.entries.size() != dim_)
      throw std::invalid_argument("trajectory: inconsistent sample dimension");
    if (s.unnormalized)
      throw std::invalid_argument("trajectory: samples must be normalized");
    validate_amplitude(s, eps_norm);
  }
  labels_ = basis_labels.empty() ? default_labels(dim_) : std::move(basis_labels);
  if (labels_.size() != dim_)
    throw std::invalid_argument("trajectory: label count does not match dimension");
}

// ---------------------------------------------------------------------------

Trajectory generate(const GeneratorSpec& spec, std::size_t dim,
                    std::size_t steps, double dt, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("generate: dim must be >= 1");
  if (steps < 2) throw std::invalid_argument("generate: steps must be >= 2");
  if (!(dt > 0.0)) throw std::invalid_argument("generate: dt must be positive");

  std::vector<AmplitudeVector> samples;
  samples.reserve(steps);
  // Static kinds carry no dynamics of their own; their characteristic time
  // is reported as dt so windowing is never scale-limited by them.
  double t_c = dt;

  if (const auto* g = std::get_if<ConstantPure>(&spec)) {
    if (g->k >= dim) throw std::invalid_argument("constant-pure: index out of range");
    std::vector<Complex> state(dim, Complex(0.0, 0.0));
    state[g->k] = Complex(1.0, 0.0);
    append_constant(samples, state, steps);
  } else if (const auto* g = std::get_if<BalancedSuperposition>(&spec)) {
    if (g->signs.size() != dim)
      throw std::invalid_argument("balanced-superposition: sign count != dim");
    const double a = 1.0 / std::sqrt(static_cast<double>(dim));
    std::vector<Complex> state(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      if (g->signs[k] != 1 && g->signs[k] != -1)
        throw std::invalid_argument("balanced-superposition: signs must be +1/-1");
      state[k] = Complex(g->signs[k] * a, 0.0);
    }
    append_constant(samples, state, steps);
  } else if (const auto* g = std::get_if<Frozen>(&spec)) {
    if (g->amplitudes.size() != dim)
      throw std::invalid_argument("frozen: amplitude count != dim");
    append_constant(samples, g->amplitudes, steps);
  } else if (const auto* g = std::get_if<RandomFast>(&spec)) {
    if (!(g->t_c >= dt))
      throw std::invalid_argument("random-fast: t_c must be >= dt");
    t_c = g->t_c;
    const std::size_t period =
        static_cast<std::size_t>(std::ceil(g->t_c / dt - 1e-12));
    Rng rng(seed);
    std::vector<Complex> prev = haar_unit_vector(dim, rng);
    std::vector<Complex> next = haar_unit_vector(dim, rng);
    std::size_t anchor = 0;
    for (std::size_t m = 0; m < steps; ++m) {
      if (m - anchor == period) {  // period >= 1 since t_c >= dt
        anchor = m;
        prev = next;
        next = haar_unit_vector(dim, rng);
      }
      const double u = static_cast<double>(m - anchor) /
                       static_cast<double>(period);
      std::vector<Complex> v(dim);
      double nsq = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        v[k] = (1.0 - u) * prev[k] + u * next[k];
        nsq += std::norm(v[k]);
      }
      if (nsq < 1e-24) {
        v = next;  // antipodal anchors: fall back to the incoming anchor
        nsq = 1.0;
      }
      const double inv = 1.0 / std::sqrt(nsq);
      for (auto& e : v) e *= inv;
      samples.push_back(as_sample(std::move(v)));
    }
  } else if (const auto* g = std::get_if<Piecewise>(&spec)) {
    if (g->segments.empty())
      throw std::invalid_argument("piecewise: empty schedule");
    std::size_t total = 0;
    for (const auto& seg : g->segments) {
      if (seg.steps == 0)
        throw std::invalid_argument("piecewise: zero-length segment");
      if (seg.amplitudes.size() != dim)
        throw std::invalid_argument("piecewise: segment dimension out of range");
      total += seg.steps;
      append_constant(samples, seg.amplitudes, seg.steps);
    }
    if (total != steps)
      throw std::invalid_argument("piecewise: schedule covers " +
                                  std::to_string(total) + " steps, expected " +
                                  std::to_string(steps));
  } else if (const auto* g = std::get_if<PowerMartingale>(&spec)) {
    if (g->initial_powers.size() != dim)
      throw std::invalid_argument("power-martingale: power count != dim");
    const MartingaleTrace trace =
        martingale_power_trace(g->initial_powers, steps, seed);
    for (std::size_t m = 0; m < steps; ++m) {
      std::vector<Complex> v(dim);
      for (std::size_t k = 0; k < dim; ++k)
        v[k] = Complex(std::sqrt(trace.powers[m][k]), 0.0);
      samples.push_back(as_sample(std::move(v)));
    }
  } else {
    throw std::invalid_argument("generate: unknown generator kind");
  }

  return Trajectory(std::move(samples), dt, t_c, {}, kDefaultEps);
}

MartingaleTrace martingale_power_trace(const std::vector<double>& initial_powers,
                                       std::size_t steps, std::uint64_t seed,
                                       std::int64_t grid) {
  const std::size_t n = initial_powers.size();
  if (n < 1) throw std::invalid_argument("martingale: empty power vector");
  if (steps < 1) throw std::invalid_argument("martingale: steps must be >= 1");
  double total = 0.0;
  for (double p : initial_powers) {
    if (p < 0.0) throw std::invalid_argument("martingale: negative power");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("martingale: powers must sum to 1");

  std::vector<std::int64_t> units = quantize_to_grid(initial_powers, grid);
  std::vector<std::size_t> live;
  for (std::size_t k = 0; k < n; ++k)
    if (units[k] > 0) live.push_back(k);

  Rng rng(seed);
  MartingaleTrace trace;
  trace.powers.assign(steps, std::vector<double>(n));
  const double inv = 1.0 / static_cast<double>(grid);

  for (std::size_t m = 0; m < steps; ++m) {
    for (std::size_t k = 0; k < n; ++k)
      trace.powers[m][k] = static_cast<double>(units[k]) * inv;
    if (!trace.fixated && live.size() == 1) {
      trace.fixated = live.front();
      trace.fixation_step = m;
    }
    if (m + 1 == steps || trace.fixated) continue;

    const std::size_t ia = rng.next_index(live.size());
    std::size_t ib = rng.next_index(live.size() - 1);
    if (ib >= ia) ++ib;
    const std::size_t i = live[ia];
    const std::size_t j = live[ib];
    const std::int64_t amount = std::min(units[i], units[j]);
    if (rng.next_bool()) {
      units[i] += amount;
      units[j] -= amount;
    } else {
      units[i] -= amount;
      units[j] += amount;
    }
    live.erase(std::remove_if(live.begin(), live.end(),
                              [&](std::size_t k) { return units[k] == 0; }),
               live.end());
  }
  // A trace that ends fixated keeps its tail constant by construction.
  return trace;
}

// ---------------------------------------------------------------------------

std::vector<Window> windows(const Trajectory& traj, std::size_t length_samples) {
  if (length_samples == 0)
    throw std::invalid_argument("windows: length must be >= 1");
  if (length_samples > traj.sample_count())
    throw std::invalid_argument("windows: length exceeds trajectory length");
  std::vector<Window> out;
  const std::size_t count = traj.sample_count() / length_samples;
  out.reserve(count);
  for (std::size_t w = 0; w < count; ++w)
    out.push_back(Window{w * length_samples, length_samples});
  return out;
}

bool window_meets_scale(const Trajectory& traj, std::size_t length_samples,
                        double kappa) {
  return static_cast<double>(length_samples) * traj.dt() >=
         kappa * traj.characteristic_time();
}

Trajectory tensor(const Trajectory& a, const Trajectory& b) {
  if (a.dt() != b.dt())
    throw std::invalid_argument("tensor: sampling intervals differ");
  if (a.sample_count() != b.sample_count())
    throw std::invalid_argument("tensor: sample counts differ");
  const std::size_t da = a.dim();
  const std::size_t db = b.dim();
  std::vector<AmplitudeVector> samples;
  samples.reserve(a.sample_count());
  for (std::size_t m = 0; m < a.sample_count(); ++m) {
    std::vector<Complex> v(da * db);
    for (std::size_t i = 0; i < da; ++i)
      for (std::size_t j = 0; j < db; ++j)
        v[i * db + j] = a.sample(m).entries[i] * b.sample(m).entries[j];
    samples.push_back(as_sample(std::move(v)));
  }
  std::vector<std::string> labels;
  labels.reserve(da * db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < db; ++j)
      labels.push_back(a.basis_labels()[i] + "⊗" + b.basis_labels()[j]);
  // Product of two individually normalized vectors: allow the tolerance sum.
  return Trajectory(std::move(samples), a.dt(),
                    std::max(a.characteristic_time(), b.characteristic_time()),
                    std::move(labels), 1e-8);
}

// ---------------------------------------------------------------------------

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void save_trajectory_csv(const Trajectory& traj, std::ostream& os) {
  os << "# dt=" << fmt17(traj.dt()) << " t_c=" << fmt17(traj.characteristic_time())
     << " labels=";
  for (std::size_t k = 0; k < traj.dim(); ++k) {
    const auto& label = traj.basis_labels()[k];
    if (label.find_first_of(";\n,") != std::string::npos)
      throw std::invalid_argument("save: label contains reserved character");
    os << (k ? ";" : "") << label;
  }
  os << "\n";
  os << "t";
  for (std::size_t k = 0; k < traj.dim(); ++k)
    os << ", re_" << k << ", im_" << k;
  os << "\n";
  for (std::size_t m = 0; m < traj.sample_count(); ++m) {
    os << fmt17(static_cast<double>(m) * traj.dt());
    for (const auto& e : traj.sample(m).entries)
      os << ", " << fmt17(e.real()) << ", " << fmt17(e.imag());
    os << "\n";
  }
}

void save_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save: cannot open " + path);
  save_trajectory_csv(traj, os);
  if (!os) throw std::runtime_error("save: write failed for " + path);
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(sep, pos);
    if (next == std::string::npos) {
      parts.push_back(s.substr(pos));
      break;
    }
    parts.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
  return parts;
}

double parse_double(const std::string& tok) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str())
    throw std::runtime_error("load: malformed number '" + tok + "'");
  return v;
}

}  // namespace

Trajectory load_trajectory_csv(std::istream& is) {
  std::string line;
  double dt = 0.0;
  double t_c = 0.0;
  std::vector<std::string> labels;
  bool have_meta = false;

  if (!std::getline(is, line)) throw std::runtime_error("load: empty stream");
  if (line.rfind("# ", 0) == 0) {
    std::istringstream meta(line.substr(2));
    std::string tok;
    while (meta >> tok) {
      if (tok.rfind("dt=", 0) == 0) dt = parse_double(tok.substr(3));
      else if (tok.rfind("t_c=", 0) == 0) t_c = parse_double(tok.substr(4));
      else if (tok.rfind("labels=", 0) == 0) labels = split(tok.substr(7), ';');
    }
    have_meta = true;
    if (!std::getline(is, line)) throw std::runtime_error("load: missing header");
  }
  if (line.rfind("t", 0) != 0) throw std::runtime_error("load: missing csv header");

  std::vector<AmplitudeVector> samples;
  std::vector<double> times;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() < 3 || cells.size() % 2 == 0)
      throw std::runtime_error("load: bad cell count in row");
    times.push_back(parse_double(cells[0]));
    AmplitudeVector s;
    for (std::size_t c = 1; c + 1 < cells.size(); c += 2)
      s.entries.emplace_back(parse_double(cells[c]), parse_double(cells[c + 1]));
    samples.push_back(std::move(s));
  }
  if (samples.size() < 2) throw std::runtime_error("load: fewer than two rows");
  if (!have_meta) {
    dt = times[1] - times[0];
    t_c = dt;
  }
  if (labels.empty()) labels = default_labels(samples.front().entries.size());
  return Trajectory(std::move(samples), dt, t_c, std::move(labels));
}

Trajectory load_trajectory_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load: cannot open " + path);
  return load_trajectory_csv(is);
}

}  // namespace quasim
