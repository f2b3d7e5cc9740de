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

#pragma once

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "statematch/simulator.hpp"
#include "statematch/state_space.hpp"

namespace statematch {

enum class Phi0Policy { EquallySpaced, Random };
enum class SimBackend { Statevector, Density, GateSequence };
enum class Classification { WithinStatistical, DeviceError };

const char* to_label(Phi0Policy policy);
const char* to_label(SimBackend backend);
const char* to_label(Classification c);

/// Declarative sweep description. Defaults reproduce the reference
/// experiment design: 26 theta0 values on [0, 25*pi/49], 25 phi0 values,
/// 2^13 shots per configuration.
struct ExperimentConfig {
  std::vector<double> epsilons{0.6, 0.7, 0.8, 0.9};
  int theta0_count = 26;
  double theta0_min = 0.0;
  double theta0_max = 25.0 * std::numbers::pi / 49.0;
  Phi0Policy phi0_policy = Phi0Policy::EquallySpaced;
  int phi0_count = 25;
  std::uint64_t shots = 8192;
  int iterations = 1;
  std::uint64_t seed = 0;
  SimBackend backend = SimBackend::Statevector;
  double damping_gamma = 0.0;
  double readout_flip01 = 0.0;  // P(report 1 | true 0)
  double readout_flip10 = 0.0;  // P(report 0 | true 1)

  void validate() const;
  bool has_noise() const {
    return damping_gamma > 0.0 || readout_flip01 > 0.0 ||
           readout_flip10 > 0.0;
  }
  NoiseSpec noise_spec(int qubit_count) const;
};

struct SweepPoint {
  double epsilon = 0.0;
  double theta0 = 0.0;
  double phi0 = 0.0;
  std::size_t epsilon_index = 0;
  std::size_t theta0_index = 0;
  std::size_t phi0_index = 0;
};

/// Grid points in row-major (epsilon, theta0, phi0) order. Equally spaced
/// policies include both interval endpoints; the random policy draws one
/// independent phi0 sequence per theta0 from the config seed, reused across
/// epsilon values.
std::vector<SweepPoint> make_sweep(const ExperimentConfig& config);

/// phi0 values the sweep uses for a given theta0 index.
std::vector<double> phi0_values(const ExperimentConfig& config,
                                std::size_t theta0_index);

/// Simulation seed of the sweep point with the given flat index.
std::uint64_t point_seed(const ExperimentConfig& config,
                         std::size_t flat_index);

struct SigmaBand {
  double sigma = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// sigma = sqrt(p(1-p)/shots); band p +- k*sigma clipped to [0, 1].
SigmaBand sigma_band(double p_ideal, std::uint64_t shots, double k = 3.0);

/// Band membership is inclusive.
Classification classify(double p_est, const SigmaBand& band);

struct StatRecord {
  double epsilon = 0.0;
  double theta0 = 0.0;
  double phi0 = 0.0;
  std::uint64_t shots = 0;
  double p_ideal = 0.0;
  double p_est = 0.0;
  double sigma = 0.0;
  double band_lo = 0.0;
  double band_hi = 0.0;
  Classification classification = Classification::WithinStatistical;
  double theta1_ideal = 0.0;
  double theta1_est = 0.0;     // valid only when !theta1_missing
  bool theta1_missing = false; // no successful shots, Eq. undefined at 0/0
  std::uint64_t seed = 0;
  // Raw outcome counts for one-step circuits (all zero for iterations > 1);
  // required downstream by readout mitigation.
  std::uint64_t n00 = 0, n01 = 0, n10 = 0, n11 = 0;
};

struct SweepResult {
  ExperimentConfig config;
  std::vector<StatRecord> records;
};

/// Runs the full pipeline (simulate, post-select, classify) over the sweep.
/// Deterministic given the config.
SweepResult run_sweep(const ExperimentConfig& config);

struct Phi0Spread {
  double max_minus_min = 0.0;
  double stddev = 0.0;
};

/// Spread of success estimates over the phi0 set at fixed (theta0, epsilon).
/// Requires at least 2 values.
Phi0Spread phi_invariance_stat(const std::vector<double>& p_estimates);

struct AggregateRow {
  double epsilon = 0.0;
  double theta0 = 0.0;
  double p_mean = 0.0;
  double p_std = 0.0;
  double theta1_mean = 0.0;
  double theta1_std = 0.0;
  int count = 0;
  int theta1_missing = 0;
  // Descriptive split of statistical vs device deviation: the +-3 sigma band
  // width and the largest estimate excursion beyond it (0 when all records
  // stayed inside). No formal estimator is attached to either number.
  double band_width = 0.0;
  double out_of_band_excess = 0.0;
};

/// Mean and population standard deviation over phi0 per (epsilon, theta0).
/// Missing theta1 estimates are excluded and counted.
std::vector<AggregateRow> aggregate(const SweepResult& sweep);
std::vector<AggregateRow> aggregate_records(
    const std::vector<StatRecord>& records);

}  // namespace statematch
