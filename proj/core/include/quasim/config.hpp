// Shared numeric thresholds.

#ifndef QUASIM_CONFIG_HPP_
#define QUASIM_CONFIG_HPP_

namespace quasim {

// Tunables for the projection machinery and its consumers.  Every output
// artifact that depends on these echoes the values it was produced with.
struct ProjectionConfig {
  double theta = 2.0;          // single-component dominance threshold (strict)
  double alpha_min = 1.0;      // grouped dominance admission threshold (strict)
  double alpha_cap = 1e6;      // stand-in for infinite ratios in dispersion
  double eps_norm = 1e-9;      // normalisation tolerance
  double kappa = 10.0;         // window/correlation scale ratio warning level
  int brute_force_limit = 12;  // max dimension for exhaustive partition search
  int quantize_digits = 6;     // weight rounding for canonical identifiers
};

}  // namespace quasim

#endif  // QUASIM_CONFIG_HPP_
