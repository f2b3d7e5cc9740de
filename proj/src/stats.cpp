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

#include "statematch/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "statematch/rng.hpp"

namespace statematch {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Seed-stream tags of the sweep harness.
constexpr std::uint64_t kPhi0Stream = 1;
constexpr std::uint64_t kPointStream = 2;

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double population_std(const std::vector<double>& v, double mean) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size()));
}
}  // namespace

const char* to_label(Phi0Policy policy) {
  return policy == Phi0Policy::EquallySpaced ? "equally-spaced" : "random";
}

const char* to_label(SimBackend backend) {
  switch (backend) {
    case SimBackend::Statevector: return "statevector";
    case SimBackend::Density: return "density";
    case SimBackend::GateSequence: return "gate-sequence";
  }
  return "statevector";
}

const char* to_label(Classification c) {
  return c == Classification::WithinStatistical ? "within-statistical"
                                                : "device-error";
}

void ExperimentConfig::validate() const {
  if (epsilons.empty()) {
    throw std::invalid_argument("config: at least one epsilon is required");
  }
  for (double e : epsilons) Epsilon{e};
  if (theta0_count < 1 || phi0_count < 1) {
    throw std::invalid_argument("config: grid counts must be >= 1");
  }
  if (theta0_min < 0.0 || theta0_max > std::numbers::pi ||
      theta0_min > theta0_max) {
    throw std::invalid_argument(
        "config: theta0 interval must lie within [0, pi]");
  }
  if (shots < 1) {
    throw std::invalid_argument("config: shots must be >= 1");
  }
  if (iterations < 1 || iterations > 4) {
    throw std::invalid_argument("config: iterations must lie in [1, 4]");
  }
  if (damping_gamma < 0.0 || damping_gamma > 1.0) {
    throw std::invalid_argument("config: gamma must lie in [0, 1]");
  }
  if (readout_flip01 < 0.0 || readout_flip01 > 1.0 || readout_flip10 < 0.0 ||
      readout_flip10 > 1.0) {
    throw std::invalid_argument(
        "config: readout flip probabilities must lie in [0, 1]");
  }
  if (has_noise() && backend != SimBackend::Density) {
    throw std::invalid_argument(
        "config: noise requires the density backend");
  }
  if (backend == SimBackend::Density && iterations > 3) {
    throw std::invalid_argument(
        "config: the density backend supports at most 3 iterations");
  }
}

NoiseSpec ExperimentConfig::noise_spec(int qubit_count) const {
  if (!has_noise()) return NoiseSpec::none();
  Eigen::Matrix2d confusion;
  confusion << 1.0 - readout_flip01, readout_flip10,
               readout_flip01, 1.0 - readout_flip10;
  NoiseSpec spec = NoiseSpec::uniform(qubit_count, damping_gamma, confusion);
  if (damping_gamma == 0.0) spec.damping.clear();
  if (readout_flip01 == 0.0 && readout_flip10 == 0.0) spec.readout.clear();
  return spec;
}

std::vector<double> phi0_values(const ExperimentConfig& config,
                                std::size_t theta0_index) {
  std::vector<double> out;
  out.reserve(config.phi0_count);
  if (config.phi0_policy == Phi0Policy::EquallySpaced) {
    if (config.phi0_count == 1) return {0.0};
    for (int j = 0; j < config.phi0_count; ++j) {
      out.push_back(kTwoPi * j / (config.phi0_count - 1));
    }
  } else {
    std::mt19937_64 rng(derive_seed(config.seed, kPhi0Stream, theta0_index));
    for (int j = 0; j < config.phi0_count; ++j) {
      out.push_back(kTwoPi * canonical_unit(rng));
    }
  }
  return out;
}

std::uint64_t point_seed(const ExperimentConfig& config,
                         std::size_t flat_index) {
  return derive_seed(config.seed, kPointStream, flat_index);
}

std::vector<SweepPoint> make_sweep(const ExperimentConfig& config) {
  config.validate();
  std::vector<double> thetas;
  thetas.reserve(config.theta0_count);
  if (config.theta0_count == 1) {
    thetas.push_back(config.theta0_min);
  } else {
    for (int i = 0; i < config.theta0_count; ++i) {
      thetas.push_back(config.theta0_min +
                       (config.theta0_max - config.theta0_min) * i /
                           (config.theta0_count - 1));
    }
  }
  std::vector<std::vector<double>> phis(config.theta0_count);
  for (int i = 0; i < config.theta0_count; ++i) {
    phis[i] = phi0_values(config, i);
  }

  std::vector<SweepPoint> points;
  points.reserve(config.epsilons.size() * thetas.size() * config.phi0_count);
  for (std::size_t e = 0; e < config.epsilons.size(); ++e) {
    for (std::size_t t = 0; t < thetas.size(); ++t) {
      for (std::size_t p = 0; p < phis[t].size(); ++p) {
        points.push_back(SweepPoint{config.epsilons[e], thetas[t], phis[t][p],
                                    e, t, p});
      }
    }
  }
  return points;
}

SigmaBand sigma_band(double p_ideal, std::uint64_t shots, double k) {
  if (p_ideal < 0.0 || p_ideal > 1.0) {
    throw std::invalid_argument("sigma_band: probability outside [0, 1]");
  }
  if (shots < 1) {
    throw std::invalid_argument("sigma_band: shots must be >= 1");
  }
  SigmaBand band;
  band.sigma =
      std::sqrt(p_ideal * (1.0 - p_ideal) / static_cast<double>(shots));
  band.lo = std::max(0.0, p_ideal - k * band.sigma);
  band.hi = std::min(1.0, p_ideal + k * band.sigma);
  return band;
}

Classification classify(double p_est, const SigmaBand& band) {
  return (p_est >= band.lo && p_est <= band.hi)
             ? Classification::WithinStatistical
             : Classification::DeviceError;
}

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  SweepResult result;
  result.config = config;
  const std::vector<SweepPoint> points = make_sweep(config);
  result.records.reserve(points.size());

  for (std::size_t flat = 0; flat < points.size(); ++flat) {
    const SweepPoint& pt = points[flat];
    const Epsilon eps(pt.epsilon);
    const Circuit circuit = build_protocol_circuit(eps, config.iterations);
    const BlochState input(pt.theta0, pt.phi0);
    const std::uint64_t seed = point_seed(config, flat);

    CountsTable counts;
    switch (config.backend) {
      case SimBackend::Statevector:
        counts = run_statevector(circuit, input, config.shots, seed, false);
        break;
      case SimBackend::GateSequence:
        counts = run_statevector(circuit, input, config.shots, seed, true);
        break;
      case SimBackend::Density:
        counts = run_density(circuit, input,
                             config.noise_spec(circuit.qubit_count),
                             config.shots, seed);
        break;
    }

    const PostSelection sel = post_select(counts, circuit);
    const IdealIteration ideal =
        ideal_state_after(input, eps, config.iterations);

    StatRecord rec;
    rec.epsilon = pt.epsilon;
    rec.theta0 = pt.theta0;
    rec.phi0 = pt.phi0;
    rec.shots = config.shots;
    rec.p_ideal = ideal.success_probability;
    rec.p_est = sel.p_success_estimate;
    const SigmaBand band = sigma_band(rec.p_ideal, config.shots);
    rec.sigma = band.sigma;
    rec.band_lo = band.lo;
    rec.band_hi = band.hi;
    rec.classification = classify(rec.p_est, band);
    rec.theta1_ideal = ideal.state.theta;
    if (sel.kept_zero == 0 && sel.kept_one == 0) {
      rec.theta1_missing = true;
      rec.theta1_est = std::numeric_limits<double>::quiet_NaN();
    } else {
      rec.theta1_est = estimate_theta1(sel.kept_zero, sel.kept_one);
    }
    rec.seed = seed;
    if (config.iterations == 1) {
      auto at = [&](const char* key) -> std::uint64_t {
        auto it = counts.counts.find(key);
        return it == counts.counts.end() ? 0 : it->second;
      };
      rec.n00 = at("00");
      rec.n01 = at("01");
      rec.n10 = at("10");
      rec.n11 = at("11");
    }
    result.records.push_back(rec);
  }
  return result;
}

Phi0Spread phi_invariance_stat(const std::vector<double>& p_estimates) {
  if (p_estimates.size() < 2) {
    throw std::invalid_argument(
        "phi_invariance_stat: at least two records are required");
  }
  const auto [mn, mx] =
      std::minmax_element(p_estimates.begin(), p_estimates.end());
  const double mean = mean_of(p_estimates);
  return Phi0Spread{*mx - *mn, population_std(p_estimates, mean)};
}

std::vector<AggregateRow> aggregate_records(
    const std::vector<StatRecord>& records) {
  if (records.empty()) {
    throw std::invalid_argument("aggregate: no records");
  }
  std::vector<AggregateRow> rows;
  std::size_t i = 0;
  while (i < records.size()) {
    std::size_t j = i;
    while (j < records.size() && records[j].epsilon == records[i].epsilon &&
           records[j].theta0 == records[i].theta0) {
      ++j;
    }
    std::vector<double> p, t1;
    int missing = 0;
    double band_width = 0.0;
    double excess = 0.0;
    for (std::size_t r = i; r < j; ++r) {
      p.push_back(records[r].p_est);
      band_width = std::max(band_width, records[r].band_hi - records[r].band_lo);
      excess = std::max({excess, records[r].band_lo - records[r].p_est,
                         records[r].p_est - records[r].band_hi});
      if (records[r].theta1_missing) {
        ++missing;
      } else {
        t1.push_back(records[r].theta1_est);
      }
    }
    AggregateRow row;
    row.epsilon = records[i].epsilon;
    row.theta0 = records[i].theta0;
    row.count = static_cast<int>(j - i);
    row.theta1_missing = missing;
    row.band_width = band_width;
    row.out_of_band_excess = std::max(0.0, excess);
    row.p_mean = mean_of(p);
    row.p_std = population_std(p, row.p_mean);
    row.theta1_mean = mean_of(t1);
    row.theta1_std = population_std(t1, row.theta1_mean);
    rows.push_back(row);
    i = j;
  }
  return rows;
}

std::vector<AggregateRow> aggregate(const SweepResult& sweep) {
  return aggregate_records(sweep.records);
}

}  // namespace statematch
