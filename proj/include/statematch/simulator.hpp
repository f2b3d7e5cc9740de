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

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "statematch/kak.hpp"
#include "statematch/state_space.hpp"
#include "statematch/unitary_builder.hpp"

namespace statematch {

/// Iterated-protocol circuit on 2^n qubits: every qubit prepared in the same
/// input state, 2^n - 1 applications of U_epsilon pairing the survivors of
/// the previous step, one terminal measurement of all qubits. Qubit 0 is the
/// kept qubit; all others are post-selected on reading 0.
struct Circuit {
  int iterations = 1;
  int qubit_count = 2;
  double epsilon = 1.0;
  /// (kept, post-selected) qubit of each U_epsilon application, in order.
  std::vector<std::pair<int, int>> pairs;
  int kept_qubit = 0;
  std::vector<int> discard_set;
};

/// Builds the circuit for 1 <= iterations <= 4.
Circuit build_protocol_circuit(const Epsilon& eps, int iterations);

/// Per-qubit noise applied at the end of a density-matrix run: amplitude
/// damping immediately before measurement, then a readout confusion matrix
/// on the outcome distribution. Confusion columns index the true state.
struct NoiseSpec {
  std::vector<double> damping;             // empty = no damping
  std::vector<Eigen::Matrix2d> readout;    // empty = ideal readout

  static NoiseSpec none() { return NoiseSpec{}; }
  static NoiseSpec uniform_damping(int qubit_count, double gamma);
  static NoiseSpec uniform(int qubit_count, double gamma,
                           const Eigen::Matrix2d& confusion);
  bool trivial() const { return damping.empty() && readout.empty(); }
  void validate(int qubit_count) const;
};

/// Measured bitstring counts. Bitstrings are qubit-ordered with qubit 0 as
/// the leftmost character; counts sum to shots.
struct CountsTable {
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
};

std::string bitstring_of_index(std::uint64_t index, int qubit_count);

/// Exact final statevector. `use_gate_sequence` replaces every dense
/// U_epsilon application with its synthesized two-CNOT gate sequence so the
/// decomposition and the simulator cross-validate.
Eigen::VectorXcd simulate_statevector(const Circuit& c,
                                      const BlochState& input,
                                      bool use_gate_sequence = false);

Eigen::VectorXd probabilities(const Eigen::VectorXcd& state);

/// Multinomial sampling of the outcome distribution: per shot one canonical
/// 53-bit uniform draw from mt19937_64(seed), placed by binary search over
/// the inclusive prefix sums.
CountsTable sample_counts(const Eigen::VectorXd& probs, std::uint64_t shots,
                          std::uint64_t seed);

CountsTable run_statevector(const Circuit& c, const BlochState& input,
                            std::uint64_t shots, std::uint64_t seed,
                            bool use_gate_sequence = false);

/// Exact outcome distribution of the density-matrix backend (iterations <= 3)
/// with the noise model applied.
Eigen::VectorXd run_density_exact(const Circuit& c, const BlochState& input,
                                  const NoiseSpec& noise);
/// Same, for copies of a mixed single-qubit input state.
Eigen::VectorXd run_density_exact(const Circuit& c,
                                  const Eigen::Matrix2cd& rho0,
                                  const NoiseSpec& noise);

CountsTable run_density(const Circuit& c, const BlochState& input,
                        const NoiseSpec& noise, std::uint64_t shots,
                        std::uint64_t seed);
CountsTable run_density(const Circuit& c, const Eigen::Matrix2cd& rho0,
                        const NoiseSpec& noise, std::uint64_t shots,
                        std::uint64_t seed);

struct PostSelection {
  double p_success_estimate = 0.0;
  std::uint64_t kept_zero = 0;
  std::uint64_t kept_one = 0;
};

/// Success = every discarded qubit read 0. Zero successful shots yield
/// estimate 0 with empty kept counts.
PostSelection post_select(const CountsTable& counts, const Circuit& c);

struct ExactPostSelection {
  double p_success = 0.0;
  double p_kept_zero = 0.0;  // joint probability of success with kept bit 0
  double p_kept_one = 0.0;
};

ExactPostSelection post_select_exact(const Eigen::VectorXd& probs,
                                     const Circuit& c);

/// Kept-qubit state conditioned on all post-selections succeeding.
BlochState conditional_kept_state(const Eigen::VectorXcd& state,
                                  const Circuit& c);

/// theta_1 estimator 2 atan(sqrt(n1/n0)); n0 = 0 gives pi, n1 = 0 gives 0.
/// Throws std::domain_error when both counts are zero.
double estimate_theta1(std::uint64_t kept_zero, std::uint64_t kept_one);
double estimate_theta1(double p_kept_zero, double p_kept_one);

}  // namespace statematch
