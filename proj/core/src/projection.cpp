#include "quasim/projection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "quasim/parallel.hpp"

namespace quasim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_window(const Window& w, std::size_t sample_count) {
  if (w.length == 0) throw std::invalid_argument("window: zero length");
  if (w.start + w.length > sample_count)
    throw std::invalid_argument("window: out of trajectory range");
}

// Ascending-order left fold; permutation-invariant by construction.
double sorted_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += t;
  return acc;
}

}  // namespace

PowerSpectrum power_spectrum(const Trajectory& traj, const Window& w) {
  check_window(w, traj.sample_count());
  PowerSpectrum out;
  out.window = w;
  out.per_basis_power.resize(traj.dim());
  std::vector<double> terms(w.length);
  for (std::size_t k = 0; k < traj.dim(); ++k) {
    for (std::size_t m = 0; m < w.length; ++m)
      terms[m] = std::norm(traj.sample(w.start + m).entries[k]);
    out.per_basis_power[k] = sorted_sum(terms) * traj.dt();
  }
  for (double p : out.per_basis_power) out.total_power += p;
  return out;
}

PowerSpectrum power_spectrum_from_rows(const std::vector<std::vector<double>>& rows,
                                       const Window& w, double dt) {
  check_window(w, rows.size());
  if (!(dt > 0.0)) throw std::invalid_argument("power spectrum: dt must be positive");
  PowerSpectrum out;
  out.window = w;
  const std::size_t dim = rows[w.start].size();
  out.per_basis_power.resize(dim);
  std::vector<double> terms(w.length);
  for (std::size_t k = 0; k < dim; ++k) {
    for (std::size_t m = 0; m < w.length; ++m) {
      const auto& row = rows[w.start + m];
      if (row.size() != dim)
        throw std::invalid_argument("power spectrum: ragged power rows");
      terms[m] = row[k];
    }
    out.per_basis_power[k] = sorted_sum(terms) * dt;
  }
  for (double p : out.per_basis_power) out.total_power += p;
  return out;
}

// ---------------------------------------------------------------------------

bool operator==(const QuasiComponent& a, const QuasiComponent& b) {
  return a.basis_index == b.basis_index && a.weight == b.weight;
}

bool operator==(const QuasiState& a, const QuasiState& b) {
  return a.window.start == b.window.start && a.window.length == b.window.length &&
         a.normalization == b.normalization && a.components == b.components;
}

std::optional<QuasiState> q_single_from_spectrum(const PowerSpectrum& spectrum,
                                                 double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("q_single: theta must be positive");
  const auto& power = spectrum.per_basis_power;
  const std::size_t dim = power.size();
  bool have = false;
  std::size_t best_k = 0;
  double best_r = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    if (power[k] == 0.0) continue;  // zero power cannot dominate
    double rest = 0.0;
    for (std::size_t j = 0; j < dim; ++j)
      if (j != k) rest += power[j];
    const double r = rest == 0.0 ? kInf : power[k] / rest;
    if (!have || r > best_r) {
      have = true;
      best_k = k;
      best_r = r;
    }
  }
  if (!have) return std::nullopt;  // degenerate all-zero window
  if (!(best_r > theta)) return std::nullopt;
  QuasiState qs;
  qs.window = spectrum.window;
  qs.components.push_back({best_k, std::sqrt(power[best_k])});
  qs.normalization = std::sqrt(power[best_k]);
  return qs;
}

std::optional<QuasiState> q_single(const Trajectory& traj, const Window& w,
                                   double theta) {
  return q_single_from_spectrum(power_spectrum(traj, w), theta);
}

// ---------------------------------------------------------------------------

namespace {

using Mask = std::uint32_t;

struct BlockInfo {
  Mask mask = 0;
  std::vector<std::size_t> members;
  std::size_t dominant = 0;
  double alpha = 0.0;
};

// All index subsets of size >= 2 whose dominance ratio clears alpha_min.
std::vector<BlockInfo> admissible_blocks(const std::vector<double>& power,
                                         double alpha_min) {
  const std::size_t dim = power.size();
  std::vector<BlockInfo> blocks;
  const Mask full = dim >= 32 ? 0xffffffffu : ((Mask{1} << dim) - 1);
  for (Mask mask = 1; mask <= full; ++mask) {
    if ((mask & (mask - 1)) == 0) continue;  // size < 2
    BlockInfo b;
    b.mask = mask;
    for (std::size_t k = 0; k < dim; ++k)
      if (mask & (Mask{1} << k)) b.members.push_back(k);
    b.dominant = b.members.front();
    for (std::size_t m : b.members)
      if (power[m] > power[b.dominant]) b.dominant = m;
    // A block carrying no power at all has no dominant component to speak
    // of; treating its 0/0 ratio as infinite would admit phantom blocks over
    // identically-dark indices.
    if (power[b.dominant] == 0.0) continue;
    double rest = 0.0;
    for (std::size_t m : b.members)
      if (m != b.dominant) rest += power[m];
    b.alpha = rest == 0.0 ? kInf : power[b.dominant] / rest;
    if (b.alpha > alpha_min) blocks.push_back(std::move(b));
  }
  return blocks;
}

bool members_less(const std::vector<std::size_t>& a,
                  const std::vector<std::size_t>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

bool partition_less(const Partition& a, const Partition& b) {
  const std::size_t n = std::min(a.blocks.size(), b.blocks.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a.blocks[i].members != b.blocks[i].members)
      return members_less(a.blocks[i].members, b.blocks[i].members);
  }
  return a.blocks.size() < b.blocks.size();
}

Partition to_partition(const std::vector<const BlockInfo*>& chosen) {
  Partition p;
  p.blocks.reserve(chosen.size());
  for (const auto* b : chosen)
    p.blocks.push_back(PartitionBlock{b->members, b->dominant, b->alpha});
  std::sort(p.blocks.begin(), p.blocks.end(),
            [](const PartitionBlock& x, const PartitionBlock& y) {
              return members_less(x.members, y.members);
            });
  return p;
}

// Combines disjoint admissible blocks.  Branches on the lowest undecided
// index: leave it uncovered or cover it with one of the blocks containing it.
void combine(const std::vector<BlockInfo>& blocks,
             const std::vector<std::vector<std::size_t>>& by_lowest,
             std::size_t dim, std::size_t next, Mask used,
             std::vector<const BlockInfo*>& chosen,
             const std::function<void(const std::vector<const BlockInfo*>&)>& emit) {
  if (next == dim) {
    if (!chosen.empty()) emit(chosen);
    return;
  }
  if (used & (Mask{1} << next)) {
    combine(blocks, by_lowest, dim, next + 1, used, chosen, emit);
    return;
  }
  // next stays uncovered
  combine(blocks, by_lowest, dim, next + 1, used, chosen, emit);
  // or a block whose lowest member is next covers it
  for (std::size_t bi : by_lowest[next]) {
    const BlockInfo& b = blocks[bi];
    if (b.mask & used) continue;
    chosen.push_back(&b);
    combine(blocks, by_lowest, dim, next + 1, used | b.mask, chosen, emit);
    chosen.pop_back();
  }
}

void for_each_admissible(const PowerSpectrum& spectrum, double alpha_min,
                         int brute_force_limit,
                         const std::function<void(const std::vector<const BlockInfo*>&)>& emit,
                         std::vector<BlockInfo>& blocks_out) {
  const std::size_t dim = spectrum.per_basis_power.size();
  if (brute_force_limit < 2)
    throw std::invalid_argument("partitions: brute-force limit must be >= 2");
  if (dim > static_cast<std::size_t>(brute_force_limit))
    throw std::invalid_argument(
        "partitions: dimension above brute-force limit; use greedy_partition");
  blocks_out = admissible_blocks(spectrum.per_basis_power, alpha_min);
  std::vector<std::vector<std::size_t>> by_lowest(dim);
  for (std::size_t i = 0; i < blocks_out.size(); ++i)
    by_lowest[blocks_out[i].members.front()].push_back(i);
  std::vector<const BlockInfo*> chosen;
  combine(blocks_out, by_lowest, dim, 0, 0, chosen, emit);
}

}  // namespace

std::vector<Partition> enumerate_partitions(const PowerSpectrum& spectrum,
                                            double alpha_min,
                                            int brute_force_limit) {
  std::vector<Partition> out;
  std::vector<BlockInfo> blocks;
  for_each_admissible(
      spectrum, alpha_min, brute_force_limit,
      [&](const std::vector<const BlockInfo*>& chosen) {
        out.push_back(to_partition(chosen));
      },
      blocks);
  return out;
}

double alpha_dispersion(const std::vector<double>& alphas, double alpha_cap,
                        bool* clamped_out) {
  std::vector<double> vals;
  vals.reserve(alphas.size());
  bool clamped = false;
  for (double a : alphas) {
    if (std::isinf(a)) {
      vals.push_back(alpha_cap);
      clamped = true;
    } else {
      vals.push_back(a);
    }
  }
  std::sort(vals.begin(), vals.end());
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= static_cast<double>(vals.size());
  double ss = 0.0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  if (clamped_out) *clamped_out = clamped;
  return std::sqrt(ss / static_cast<double>(vals.size()));
}

MaximalResult build_result(const PowerSpectrum& spectrum, const Partition& partition,
                           const ProjectionConfig& cfg) {
  MaximalResult res;
  res.window = spectrum.window;
  QuasiState qs;
  qs.window = spectrum.window;
  std::vector<std::pair<QuasiComponent, double>> comps;
  for (const auto& block : partition.blocks) {
    const double p = spectrum.per_basis_power[block.dominant];
    comps.push_back({QuasiComponent{block.dominant, std::sqrt(p)}, block.alpha});
  }
  std::sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) {
    return a.first.basis_index < b.first.basis_index;
  });
  double beta_sq = 0.0;
  for (const auto& [c, a] : comps) {
    qs.components.push_back(c);
    res.alphas.push_back(a);
    beta_sq += c.weight * c.weight;
  }
  qs.normalization = std::sqrt(beta_sq);
  res.dispersion = alpha_dispersion(res.alphas, cfg.alpha_cap, &res.alpha_clamped);
  res.state = std::move(qs);
  return res;
}

MaximalResult maximal_from_spectrum(const PowerSpectrum& spectrum,
                                    const ProjectionConfig& cfg) {
  struct Best {
    bool have = false;
    Partition partition;
    double dispersion = 0.0;
    bool tie = false;
  } best;

  std::vector<BlockInfo> blocks;
  for_each_admissible(
      spectrum, cfg.alpha_min, cfg.brute_force_limit,
      [&](const std::vector<const BlockInfo*>& chosen) {
        std::vector<double> alphas;
        alphas.reserve(chosen.size());
        for (const auto* b : chosen) alphas.push_back(b->alpha);
        const double disp = alpha_dispersion(alphas, cfg.alpha_cap, nullptr);
        if (!best.have || chosen.size() > best.partition.blocks.size()) {
          best.have = true;
          best.partition = to_partition(chosen);
          best.dispersion = disp;
          best.tie = false;
          return;
        }
        if (chosen.size() < best.partition.blocks.size()) return;
        if (disp < best.dispersion) {
          best.partition = to_partition(chosen);
          best.dispersion = disp;
          best.tie = false;
        } else if (disp == best.dispersion) {
          best.tie = true;
          Partition p = to_partition(chosen);
          if (partition_less(p, best.partition)) best.partition = std::move(p);
        }
      },
      blocks);

  if (!best.have) {
    MaximalResult null_res;
    null_res.window = spectrum.window;
    return null_res;  // Null projection
  }
  MaximalResult res = build_result(spectrum, best.partition, cfg);
  res.tie_detected = best.tie;
  return res;
}

MaximalResult maximal_quasi_state(const Trajectory& traj, const Window& w,
                                  const ProjectionConfig& cfg) {
  return maximal_from_spectrum(power_spectrum(traj, w), cfg);
}

std::optional<Partition> greedy_partition(const PowerSpectrum& spectrum,
                                          double alpha_min) {
  const auto& power = spectrum.per_basis_power;
  const std::size_t dim = power.size();
  if (dim < 2) return std::nullopt;

  std::vector<std::size_t> by_power(dim);
  for (std::size_t k = 0; k < dim; ++k) by_power[k] = k;
  std::sort(by_power.begin(), by_power.end(), [&](std::size_t a, std::size_t b) {
    if (power[a] != power[b]) return power[a] > power[b];
    return a < b;
  });

  std::vector<bool> used(dim, false);
  Partition result;
  for (std::size_t di = 0; di < dim; ++di) {
    const std::size_t dominant = by_power[di];
    if (used[dominant]) continue;
    if (power[dominant] == 0.0) break;  // only dark indices remain
    // Weakest unused partner maximizes the ratio; adding further indices
    // only lowers it, so admissibility is decided by the first candidate.
    std::size_t partner = dim;
    for (std::size_t wi = dim; wi-- > 0;) {
      const std::size_t cand = by_power[wi];
      if (!used[cand] && cand != dominant) {
        partner = cand;
        break;
      }
    }
    if (partner == dim) break;  // nothing left to pair with
    const double rest = power[partner];
    const double alpha = rest == 0.0 ? kInf : power[dominant] / rest;
    if (!(alpha > alpha_min)) break;  // weaker dominants cannot do better
    PartitionBlock block;
    block.members = {std::min(dominant, partner), std::max(dominant, partner)};
    block.dominant = dominant;
    block.alpha = alpha;
    used[dominant] = used[partner] = true;
    result.blocks.push_back(std::move(block));
  }
  if (result.blocks.empty()) return std::nullopt;
  std::sort(result.blocks.begin(), result.blocks.end(),
            [](const PartitionBlock& x, const PartitionBlock& y) {
              return members_less(x.members, y.members);
            });
  return result;
}

std::vector<MaximalResult> q_general(const Trajectory& traj,
                                     std::size_t window_samples,
                                     const ProjectionConfig& cfg,
                                     PartitionMethod method, unsigned threads) {
  const auto tiling = windows(traj, window_samples);
  std::vector<MaximalResult> results(tiling.size());
  parallel_for(tiling.size(), threads, [&](std::size_t i) {
    const PowerSpectrum spectrum = power_spectrum(traj, tiling[i]);
    if (method == PartitionMethod::kBrute) {
      results[i] = maximal_from_spectrum(spectrum, cfg);
    } else {
      const auto partition = greedy_partition(spectrum, cfg.alpha_min);
      if (partition) {
        results[i] = build_result(spectrum, *partition, cfg);
      } else {
        results[i].window = tiling[i];
      }
    }
  });
  return results;
}

// ---------------------------------------------------------------------------

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void save_quasi_csv(const std::vector<MaximalResult>& results, std::ostream& os) {
  std::size_t max_n = 0;
  for (const auto& r : results)
    if (r.state) max_n = std::max(max_n, r.state->components.size());

  os << "window_start, window_len, N";
  for (std::size_t i = 1; i <= max_n; ++i)
    os << ", comp_index_" << i << ", weight_" << i;
  for (std::size_t i = 1; i <= max_n; ++i) os << ", alpha_" << i;
  os << ", dispersion, null_flag\n";

  for (const auto& r : results) {
    const bool null = !r.state.has_value();
    const std::size_t n = null ? 0 : r.state->components.size();
    os << r.window.start << ", " << r.window.length << ", " << n;
    for (std::size_t i = 0; i < max_n; ++i) {
      if (i < n) {
        os << ", " << r.state->components[i].basis_index << ", "
           << fmt17(r.state->components[i].weight);
      } else {
        os << ", , ";
      }
    }
    for (std::size_t i = 0; i < max_n; ++i) {
      if (i < n) {
        os << ", " << (std::isinf(r.alphas[i]) ? std::string("inf") : fmt17(r.alphas[i]));
      } else {
        os << ", ";
      }
    }
    os << ", " << fmt17(null ? 0.0 : r.dispersion) << ", " << (null ? 1 : 0) << "\n";
  }
}

void save_quasi_csv(const std::vector<MaximalResult>& results,
                    const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save: cannot open " + path);
  save_quasi_csv(results, os);
  if (!os) throw std::runtime_error("save: write failed for " + path);
}

}  // namespace quasim
