// Copyright 2026 The statematch developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>

#include "statematch/simulator.hpp"
#include "statematch/stats.hpp"
#include "test_helpers.hpp"

using namespace statematch;
using Catch::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

ExperimentConfig tiny_config() {
  ExperimentConfig config;
  config.epsilons = {0.7};
  config.theta0_count = 3;
  config.phi0_count = 2;
  config.shots = 256;
  config.seed = 4242;
  return config;
}
}  // namespace

TEST_CASE("the default sweep matches the reference experiment design") {
  ExperimentConfig config;
  config.seed = 1;
  const auto points = make_sweep(config);
  CHECK(points.size() == 4 * 26 * 25);

  // first and last theta0 of the grid
  CHECK(points.front().theta0 == 0.0);
  double max_theta = 0.0;
  for (const auto& p : points) max_theta = std::max(max_theta, p.theta0);
  CHECK(max_theta == Approx(25.0 * kPi / 49.0).margin(1e-15));

  // equally spaced phi0 covers [0, 2 pi] endpoints inclusive
  CHECK(points.front().phi0 == 0.0);
  CHECK(points[24].phi0 == Approx(2.0 * kPi).margin(1e-12));
}

TEST_CASE("random phi0 policy is reproducible and shared across epsilon") {
  ExperimentConfig config;
  config.epsilons = {0.6, 0.9};
  config.phi0_policy = Phi0Policy::Random;
  config.seed = 5050;
  const auto points_a = make_sweep(config);
  const auto points_b = make_sweep(config);
  REQUIRE(points_a.size() == points_b.size());
  for (std::size_t i = 0; i < points_a.size(); ++i) {
    CHECK(points_a[i].phi0 == points_b[i].phi0);
  }

  // identical phi0 sequence for both epsilon values at equal theta0 index
  const std::size_t block = points_a.size() / 2;
  for (std::size_t i = 0; i < block; ++i) {
    CHECK(points_a[i].phi0 == points_a[block + i].phi0);
  }

  // independent sequences per theta0
  CHECK(points_a[0].phi0 != points_a[25].phi0);

  // draws lie in [0, 2 pi)
  for (const auto& p : points_a) {
    CHECK(p.phi0 >= 0.0);
    CHECK(p.phi0 < 2.0 * kPi);
  }
}

TEST_CASE("sigma_band implements the binomial band") {
  const SigmaBand band = sigma_band(0.5, 8192, 3.0);
  CHECK(band.sigma == Approx(std::sqrt(0.25 / 8192.0)).margin(1e-15));
  CHECK(band.sigma == Approx(0.005524).margin(1e-6));
  CHECK(band.lo == Approx(0.48343).margin(1e-5));
  CHECK(band.hi == Approx(0.51657).margin(1e-5));

  const SigmaBand degenerate = sigma_band(0.0, 4096, 3.0);
  CHECK(degenerate.lo == 0.0);
  CHECK(degenerate.hi == 0.0);

  CHECK(sigma_band(0.25, 8192).sigma == Approx(0.004785).margin(1e-6));

  CHECK_THROWS_AS(sigma_band(1.2, 100), std::invalid_argument);
  CHECK_THROWS_AS(sigma_band(0.5, 0), std::invalid_argument);
}

TEST_CASE("classification is inclusive at the band edge") {
  const SigmaBand band = sigma_band(0.4, 8192, 3.0);
  CHECK(classify(0.4, band) == Classification::WithinStatistical);
  CHECK(classify(band.hi, band) == Classification::WithinStatistical);
  CHECK(classify(band.lo, band) == Classification::WithinStatistical);
  CHECK(classify(0.4 + 4.0 * band.sigma, band) ==
        Classification::DeviceError);
  CHECK(classify(0.4 - 4.0 * band.sigma, band) ==
        Classification::DeviceError);
}

TEST_CASE("phi invariance statistic on exact and perturbed inputs") {
  const Circuit c = build_protocol_circuit(Epsilon(0.7), 1);
  const double theta0 = 1.0;

  SECTION("noiseless exact estimates do not vary") {
    std::vector<double> exact;
    for (int j = 0; j < 25; ++j) {
      const BlochState input(theta0, 2.0 * kPi * j / 24.0);
      exact.push_back(
          post_select_exact(probabilities(simulate_statevector(c, input)), c)
              .p_success);
    }
    const Phi0Spread spread = phi_invariance_stat(exact);
    CHECK(spread.max_minus_min < 1e-12);
    CHECK(spread.stddev < 1e-12);
  }

  SECTION("sampled estimates fluctuate within the binomial scale") {
    const double p_ideal =
        ideal_state_after(BlochState(theta0, 0.0), Epsilon(0.7), 1)
            .success_probability;
    const double sigma = sigma_band(p_ideal, 8192).sigma;
    std::vector<double> sampled;
    for (int j = 0; j < 25; ++j) {
      const BlochState input(theta0, 2.0 * kPi * j / 24.0);
      const CountsTable counts =
          run_statevector(c, input, 8192, 9000 + j);
      sampled.push_back(post_select(counts, c).p_success_estimate);
    }
    const Phi0Spread spread = phi_invariance_stat(sampled);
    CHECK(spread.stddev < 2.0 * sigma);
  }

  SECTION("phi0-coupled preparation error is flagged") {
    const double p_ideal =
        ideal_state_after(BlochState(theta0, 0.0), Epsilon(0.7), 1)
            .success_probability;
    const double sigma = sigma_band(p_ideal, 8192).sigma;
    std::vector<double> skewed;
    for (int j = 0; j < 25; ++j) {
      const double phi = 2.0 * kPi * j / 24.0;
      // over-rotation of the preparation coupled to phi0
      const BlochState input(theta0 + 0.15 * std::sin(phi), phi);
      const CountsTable counts =
          run_statevector(c, input, 8192, 9100 + j);
      skewed.push_back(post_select(counts, c).p_success_estimate);
    }
    const Phi0Spread spread = phi_invariance_stat(skewed);
    CHECK(spread.max_minus_min > 5.0 * sigma);
  }

  SECTION("fewer than two records rejected") {
    CHECK_THROWS_AS(phi_invariance_stat({0.4}), std::invalid_argument);
  }
}

TEST_CASE("run_sweep is deterministic and consistent with its config") {
  const ExperimentConfig config = tiny_config();
  const SweepResult a = run_sweep(config);
  const SweepResult b = run_sweep(config);
  REQUIRE(a.records.size() == 1 * 3 * 2);
  REQUIRE(b.records.size() == a.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].p_est == b.records[i].p_est);
    CHECK(a.records[i].seed == b.records[i].seed);
    CHECK(a.records[i].n00 == b.records[i].n00);
  }

  for (const StatRecord& r : a.records) {
    // sigma derives from the ideal probability, not the estimate
    CHECK(r.sigma == sigma_band(r.p_ideal, r.shots).sigma);
    CHECK(r.shots == config.shots);
    CHECK(r.n00 + r.n01 + r.n10 + r.n11 == config.shots);
    const SigmaBand band = sigma_band(r.p_ideal, r.shots);
    CHECK((r.p_est >= band.lo && r.p_est <= band.hi) ==
          (r.classification == Classification::WithinStatistical));
  }

  SECTION("aggregate rows carry the band descriptors") {
    for (const AggregateRow& row : aggregate(a)) {
      double width = 0.0, excess = 0.0;
      for (const StatRecord& r : a.records) {
        if (r.epsilon != row.epsilon || r.theta0 != row.theta0) continue;
        width = std::max(width, r.band_hi - r.band_lo);
        excess = std::max({excess, r.band_lo - r.p_est, r.p_est - r.band_hi});
      }
      CHECK(row.band_width == width);
      CHECK(row.out_of_band_excess == std::max(0.0, excess));
    }
  }
}

TEST_CASE("sweep grids cover the configured endpoints exactly") {
  ExperimentConfig config = tiny_config();
  config.theta0_min = 0.25;
  config.theta0_max = 1.25;
  const SweepResult result = run_sweep(config);
  CHECK(result.records.front().theta0 == 0.25);
  CHECK(result.records.back().theta0 == 1.25);
}

TEST_CASE("zero-success records mark the estimator as missing") {
  ExperimentConfig config;
  config.epsilons = {0.05};
  config.theta0_count = 1;
  config.theta0_min = config.theta0_max = 0.0;  // p_s = 0.0025
  config.phi0_count = 1;
  config.shots = 4;
  config.backend = SimBackend::Statevector;

  bool found_missing = false;
  for (std::uint64_t seed = 0; seed < 50 && !found_missing; ++seed) {
    config.seed = seed;
    const SweepResult result = run_sweep(config);
    REQUIRE(result.records.size() == 1);
    const StatRecord& r = result.records.front();
    if (r.theta1_missing) {
      found_missing = true;
      CHECK(r.p_est == 0.0);
      CHECK(std::isnan(r.theta1_est));
      const auto rows = aggregate(result);
      REQUIRE(rows.size() == 1);
      CHECK(rows[0].theta1_missing == 1);
      CHECK(rows[0].count == 1);
    }
  }
  CHECK(found_missing);
}

TEST_CASE("aggregate semantics") {
  SECTION("single record per group has zero spread") {
    StatRecord r;
    r.epsilon = 0.7;
    r.theta0 = 0.3;
    r.p_est = 0.42;
    r.theta1_est = 0.9;
    const auto rows = aggregate_records({r});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].p_mean == 0.42);
    CHECK(rows[0].p_std == 0.0);
    CHECK(rows[0].theta1_std == 0.0);
  }

  SECTION("noiseless exact records reproduce the ideal curves") {
    const Epsilon eps(0.8);
    const Circuit c = build_protocol_circuit(eps, 1);
    std::vector<StatRecord> records;
    for (int i = 0; i < 8; ++i) {
      const double theta0 = 0.1 + 0.15 * i;
      for (int j = 0; j < 5; ++j) {
        const BlochState input(theta0, 2.0 * kPi * j / 5.0);
        const ExactPostSelection sel = post_select_exact(
            probabilities(simulate_statevector(c, input)), c);
        StatRecord r;
        r.epsilon = 0.8;
        r.theta0 = theta0;
        r.phi0 = input.phi;
        r.p_ideal = ideal_state_after(input, eps, 1).success_probability;
        r.p_est = sel.p_success;
        r.theta1_ideal = ideal_state_after(input, eps, 1).state.theta;
        r.theta1_est = estimate_theta1(sel.p_kept_zero, sel.p_kept_one);
        records.push_back(r);
      }
    }
    for (const AggregateRow& row : aggregate_records(records)) {
      const IdealIteration ideal = ideal_state_after(
          BlochState(row.theta0, 0.0), eps, 1);
      CHECK(row.p_mean == Approx(ideal.success_probability).margin(1e-12));
      CHECK(row.theta1_mean == Approx(ideal.state.theta).margin(1e-10));
      CHECK(row.count == 5);
    }
  }

  SECTION("empty input rejected") {
    CHECK_THROWS_AS(aggregate_records({}), std::invalid_argument);
  }
}

TEST_CASE("config validation") {
  ExperimentConfig config = tiny_config();
  config.epsilons = {};
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);

  config = tiny_config();
  config.theta0_max = 3.5;  // beyond pi
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);

  config = tiny_config();
  config.damping_gamma = 0.05;  // noise on the statevector backend
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.backend = SimBackend::Density;
  CHECK_NOTHROW(config.validate());

  config = tiny_config();
  config.iterations = 4;
  config.backend = SimBackend::Density;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("gate-sequence backend sweeps agree with the statevector backend") {
  ExperimentConfig config = tiny_config();
  const SweepResult dense = run_sweep(config);
  config.backend = SimBackend::GateSequence;
  const SweepResult synth = run_sweep(config);
  REQUIRE(dense.records.size() == synth.records.size());
  for (std::size_t i = 0; i < dense.records.size(); ++i) {
    // identical seeds and near-identical distributions give equal counts
    CHECK(dense.records[i].p_est == synth.records[i].p_est);
  }
}
