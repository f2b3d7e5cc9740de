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

#include "statematch/unitary_builder.hpp"

#include <cmath>
#include <numbers>

namespace statematch {

double unitarity_residual(const Unitary4& u) {
  return (u.adjoint() * u - Unitary4::Identity()).cwiseAbs().maxCoeff();
}

Unitary4 build_u_epsilon(const Epsilon& eps) {
  const double e = eps.value();
  const double s = std::sqrt(1.0 - e * e);
  const double q = 1.0 / std::sqrt(2.0);
  Unitary4 u = Unitary4::Zero();
  u(0, 0) = e;
  u(0, 1) = -q * s;
  u(0, 2) = q * s;
  u(1, 1) = q;
  u(1, 2) = q;
  u(2, 3) = 1.0;
  u(3, 0) = s;
  u(3, 1) = q * e;
  u(3, 2) = -q * e;
  return u;
}

Eigen::Vector4cd pair_input_state(const BlochState& state) {
  const std::complex<double> a0 = std::cos(state.theta / 2.0);
  const std::complex<double> a1 =
      std::polar(std::sin(state.theta / 2.0), state.phi);
  Eigen::Vector4cd psi;
  psi << a0 * a0, a0 * a1, a1 * a0, a1 * a1;
  return psi;
}

PairAction action_on_pair(const Epsilon& eps, const BlochState& state0) {
  const Eigen::Vector4cd out = build_u_epsilon(eps) * pair_input_state(state0);
  // qubit 2 reads 0 on basis states |00> and |10>
  const std::complex<double> kept0 = out(0);
  const std::complex<double> kept1 = out(2);
  const double prob = std::norm(kept0) + std::norm(kept1);

  PairAction result;
  result.probability_q2_zero = prob;
  const double theta = 2.0 * std::atan2(std::abs(kept1), std::abs(kept0));
  const double phi =
      std::abs(kept1) == 0.0 || std::abs(kept0) == 0.0
          ? 0.0
          : std::arg(kept1) - std::arg(kept0);
  result.kept_state = BlochState(theta, phi);
  return result;
}

}  // namespace statematch
