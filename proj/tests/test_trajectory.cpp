#include <cmath>
#include <complex>
#include <sstream>

#include "doctest.h"
#include "quasim/rng.hpp"
#include "quasim/trajectory.hpp"

using namespace quasim;

namespace {

bool samples_equal(const Trajectory& a, const Trajectory& b) {
  if (a.sample_count() != b.sample_count() || a.dim() != b.dim()) return false;
  for (std::size_t m = 0; m < a.sample_count(); ++m)
    for (std::size_t k = 0; k < a.dim(); ++k)
      if (a.sample(m).entries[k] != b.sample(m).entries[k]) return false;
  return true;
}

}  // namespace

TEST_CASE("constant-pure generator occupies exactly one index") {
  const Trajectory traj = generate(ConstantPure{0}, 2, 5, 0.5, 99);
  for (std::size_t m = 0; m < traj.sample_count(); ++m) {
    CHECK(traj.sample(m).entries[0] == Complex(1.0, 0.0));
    CHECK(traj.sample(m).entries[1] == Complex(0.0, 0.0));
  }
}

TEST_CASE("balanced superposition emits equal magnitudes with chosen signs") {
  const double r = 1.0 / std::sqrt(2.0);
  const Trajectory plus = generate(BalancedSuperposition{{1, 1}}, 2, 3, 1.0, 0);
  const Trajectory minus = generate(BalancedSuperposition{{1, -1}}, 2, 3, 1.0, 0);
  for (std::size_t m = 0; m < 3; ++m) {
    CHECK(plus.sample(m).entries[0].real() == doctest::Approx(r));
    CHECK(plus.sample(m).entries[1].real() == doctest::Approx(r));
    CHECK(minus.sample(m).entries[1].real() == doctest::Approx(-r));
  }
}

TEST_CASE("random-fast is reproducible under the seed and varies across seeds") {
  const Trajectory a = generate(RandomFast{0.01}, 2, 64, 0.01, 7);
  const Trajectory b = generate(RandomFast{0.01}, 2, 64, 0.01, 7);
  const Trajectory c = generate(RandomFast{0.01}, 2, 64, 0.01, 8);
  CHECK(samples_equal(a, b));
  CHECK(!samples_equal(a, c));
}

TEST_CASE("every generator keeps samples normalized") {
  const GeneratorSpec specs[] = {
      GeneratorSpec{ConstantPure{1}},
      GeneratorSpec{BalancedSuperposition{{1, -1, 1}}},
      GeneratorSpec{RandomFast{0.05}},
      GeneratorSpec{PowerMartingale{{0.25, 0.5, 0.25}}},
  };
  for (const auto& spec : specs) {
    const Trajectory traj = generate(spec, 3, 40, 0.01, 3);
    for (std::size_t m = 0; m < traj.sample_count(); ++m)
      CHECK(std::abs(traj.sample(m).norm_sq() - 1.0) <= 1e-9);
  }
}

TEST_CASE("generator argument validation") {
  CHECK_THROWS_AS(generate(ConstantPure{0}, 0, 10, 0.1, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate(ConstantPure{0}, 2, 1, 0.1, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate(ConstantPure{5}, 2, 10, 0.1, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate(BalancedSuperposition{{1}}, 2, 10, 0.1, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate(Piecewise{{{4, {Complex(1, 0), Complex(0, 0)}}}}, 2,
                           10, 0.1, 0),
                  std::invalid_argument);  // schedule covers 4 of 10 steps
  CHECK_THROWS_AS(generate(Piecewise{{}}, 2, 10, 0.1, 0), std::invalid_argument);
}

TEST_CASE("trajectory constructor enforces its invariants") {
  const std::vector<AmplitudeVector> two{{{Complex(1, 0)}, false},
                                         {{Complex(1, 0)}, false}};
  CHECK_NOTHROW(Trajectory(two, 0.1, 0.1, {}));
  CHECK_THROWS_AS(Trajectory(two, 0.0, 0.1, {}), std::invalid_argument);
  CHECK_THROWS_AS(Trajectory(two, 0.1, 0.05, {}), std::invalid_argument);
  CHECK_THROWS_AS(Trajectory({two[0]}, 0.1, 0.1, {}), std::invalid_argument);
  const std::vector<AmplitudeVector> ragged{{{Complex(1, 0)}, false},
                                            {{Complex(1, 0), Complex(0, 0)}, false}};
  CHECK_THROWS_AS(Trajectory(ragged, 0.1, 0.1, {}), std::invalid_argument);
  const std::vector<AmplitudeVector> off{{{Complex(0.9, 0)}, false},
                                         {{Complex(0.9, 0)}, false}};
  CHECK_THROWS_AS(Trajectory(off, 0.1, 0.1, {}), std::invalid_argument);
}

TEST_CASE("unnormalized flag exempts free-standing vectors only") {
  CHECK_NOTHROW(validate_amplitude({{Complex(0.5, 0)}, true}, 1e-9));
  CHECK_THROWS_AS(validate_amplitude({{Complex(0.5, 0)}, false}, 1e-9),
                  std::invalid_argument);
  // Trajectory samples are physical states; the flag buys no exemption there.
  const std::vector<AmplitudeVector> dark{{{Complex(0, 0)}, true},
                                          {{Complex(0, 0)}, true}};
  CHECK_THROWS_AS(Trajectory(dark, 0.1, 0.1, {}), std::invalid_argument);
}

TEST_CASE("window tiling drops the trailing remainder") {
  const Trajectory t10 = generate(ConstantPure{0}, 2, 10, 1.0, 0);
  const auto w10 = windows(t10, 3);
  REQUIRE(w10.size() == 3);
  CHECK(w10[0].start == 0);
  CHECK(w10[1].start == 3);
  CHECK(w10[2].start == 6);

  const Trajectory t9 = generate(ConstantPure{0}, 2, 9, 1.0, 0);
  CHECK(windows(t9, 3).size() == 3);

  const Trajectory t5 = generate(ConstantPure{0}, 2, 5, 1.0, 0);
  CHECK(windows(t5, 5).size() == 1);
  CHECK_THROWS_AS(windows(t5, 6), std::invalid_argument);
}

TEST_CASE("window scale check warns below kappa times t_c") {
  const Trajectory traj = generate(RandomFast{0.5}, 2, 100, 0.1, 1);
  CHECK(window_meets_scale(traj, 50, 10.0));   // 5.0 >= 10 * 0.5
  CHECK(!window_meets_scale(traj, 49, 10.0));  // 4.9 < 5.0
}

TEST_CASE("tensor takes the sample-wise Kronecker product") {
  const Trajectory a = generate(ConstantPure{0}, 2, 4, 0.5, 0);
  const Trajectory b = generate(ConstantPure{1}, 2, 4, 0.5, 0);
  const Trajectory ab = tensor(a, b);
  REQUIRE(ab.dim() == 4);
  for (std::size_t m = 0; m < 4; ++m) {
    CHECK(ab.sample(m).entries[0] == Complex(0, 0));
    CHECK(ab.sample(m).entries[1] == Complex(1, 0));
    CHECK(ab.sample(m).entries[2] == Complex(0, 0));
    CHECK(ab.sample(m).entries[3] == Complex(0, 0));
  }
}

TEST_CASE("tensor preserves normalization and orders labels i-major") {
  const Trajectory a = generate(RandomFast{0.02}, 2, 32, 0.01, 5);
  const Trajectory b = generate(RandomFast{0.02}, 3, 32, 0.01, 6);
  const Trajectory ab = tensor(a, b);
  REQUIRE(ab.dim() == 6);
  CHECK(ab.basis_labels()[0] == "0⊗0");
  CHECK(ab.basis_labels()[1] == "0⊗1");
  CHECK(ab.basis_labels()[5] == "1⊗2");
  for (std::size_t m = 0; m < ab.sample_count(); ++m)
    CHECK(std::abs(ab.sample(m).norm_sq() - 1.0) <= 1e-9);

  const Trajectory short_b = generate(ConstantPure{0}, 3, 16, 0.01, 6);
  CHECK_THROWS_AS(tensor(a, short_b), std::invalid_argument);
}

TEST_CASE("CSV round trip is lossless") {
  const Trajectory traj = generate(RandomFast{0.03}, 3, 48, 0.01, 11);
  std::stringstream buf;
  save_trajectory_csv(traj, buf);
  const Trajectory back = load_trajectory_csv(buf);
  CHECK(samples_equal(traj, back));
  CHECK(back.dt() == traj.dt());
  CHECK(back.characteristic_time() == traj.characteristic_time());
  CHECK(back.basis_labels() == traj.basis_labels());

  std::stringstream again;
  save_trajectory_csv(back, again);
  std::stringstream first;
  save_trajectory_csv(traj, first);
  CHECK(again.str() == first.str());
}

TEST_CASE("martingale trace conserves total power on every step and seed") {
  const std::vector<double> initial{0.5, 0.3, 0.2};
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    const MartingaleTrace trace = martingale_power_trace(initial, 200, seed);
    for (const auto& row : trace.powers) {
      double total = 0.0;
      for (double p : row) total += p;
      CHECK(std::abs(total - 1.0) <= 1e-9);
    }
    if (trace.fixated.has_value()) {
      CHECK(trace.powers[trace.fixation_step][*trace.fixated] ==
            doctest::Approx(1.0));
    }
  }
}

TEST_CASE("martingale trace is a pure function of its seed") {
  const std::vector<double> initial{0.25, 0.75};
  const MartingaleTrace a = martingale_power_trace(initial, 64, 17);
  const MartingaleTrace b = martingale_power_trace(initial, 64, 17);
  CHECK(a.powers == b.powers);
  CHECK(a.fixated == b.fixated);
}

TEST_CASE("derived seeds decorrelate streams deterministically") {
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) != derive_seed(2, 2));
}
