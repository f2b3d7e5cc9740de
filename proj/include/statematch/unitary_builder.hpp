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

#include "statematch/state_space.hpp"

namespace statematch {

/// Dense two-qubit unitary in the basis |00>, |01>, |10>, |11>. The left bit
/// is qubit 1 (the kept qubit), the right bit is qubit 2 (the post-selected
/// qubit).
using Unitary4 = Eigen::Matrix4cd;

/// max |(U^dag U - I)_{ij}|
double unitarity_residual(const Unitary4& u);

/// The entangling unitary U_epsilon of the matching protocol. Real-valued
/// and orthogonal; entries are computed from epsilon directly.
Unitary4 build_u_epsilon(const Epsilon& eps);

/// |phi> (x) |phi> as a 4-vector in the Unitary4 basis convention.
Eigen::Vector4cd pair_input_state(const BlochState& state);

struct PairAction {
  /// Probability that qubit 2 is measured in |0>.
  double probability_q2_zero = 0.0;
  /// Normalized state of qubit 1 conditioned on that outcome.
  BlochState kept_state;
};

/// Applies U_epsilon to |phi0> (x) |phi0> and projects qubit 2 onto |0>.
PairAction action_on_pair(const Epsilon& eps, const BlochState& state0);

}  // namespace statematch
