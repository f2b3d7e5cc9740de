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
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "statematch/simulator.hpp"

namespace statematch {

class MitigationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two-qubit readout confusion matrix. Column j holds the reported-outcome
/// distribution when basis state j (order 00, 01, 10, 11) is prepared.
struct ConfusionMatrix {
  Eigen::Matrix4d entries = Eigen::Matrix4d::Identity();
  std::string source = "synthetic";  // "calibration" or "synthetic"
  std::uint64_t shots = 0;

  void validate() const;  // non-negative entries, columns sum to 1
};

/// Basis-state preparation for one calibration run: optional X gates
/// followed by a terminal measurement.
struct CalibrationCircuit {
  std::string prepared;  // "00", "01", "10", "11"
  bool flip_qubit1 = false;
  bool flip_qubit2 = false;
};

/// The four basis-state calibration circuits in basis order.
std::array<CalibrationCircuit, 4> calibration_circuits();

/// Default shots per calibration circuit, matching the experiment default.
inline constexpr std::uint64_t kDefaultCalibrationShots = 8192;

/// Simulates one calibration run under the given noise model.
CountsTable run_calibration(const CalibrationCircuit& circuit,
                            const NoiseSpec& noise,
                            std::uint64_t shots = kDefaultCalibrationShots,
                            std::uint64_t seed = 0);

/// Column j = empirical outcome frequencies of calibration run j.
ConfusionMatrix build_confusion(const std::array<CountsTable, 4>& runs);

/// Tensor-product confusion from per-qubit 2x2 matrices.
ConfusionMatrix tensor_confusion(const Eigen::Matrix2d& qubit1,
                                 const Eigen::Matrix2d& qubit2);

/// Forward model: distribution reported when `p` is the true distribution.
Eigen::Vector4d apply_confusion(const ConfusionMatrix& a,
                                const Eigen::Vector4d& p);

/// Readout error mitigation: solves a x = raw; when the unconstrained
/// solution leaves the probability simplex, re-solves as constrained least
/// squares over the simplex. Throws MitigationError when the matrix is
/// numerically singular (condition estimate > 1e12).
Eigen::Vector4d mitigate(const Eigen::Vector4d& raw, const ConfusionMatrix& a);

}  // namespace statematch
