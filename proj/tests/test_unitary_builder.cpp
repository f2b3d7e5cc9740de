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
#include <random>

#include "statematch/state_space.hpp"
#include "statematch/unitary_builder.hpp"
#include "test_helpers.hpp"

using namespace statematch;
using Catch::Approx;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("U_1 has the degenerate closed form") {
  const Unitary4 u = build_u_epsilon(Epsilon(1.0));
  const double q = 1.0 / std::sqrt(2.0);
  Unitary4 expected = Unitary4::Zero();
  expected(0, 0) = 1.0;
  expected(1, 1) = q;
  expected(1, 2) = q;
  expected(2, 3) = 1.0;
  expected(3, 1) = q;
  expected(3, 2) = -q;
  CHECK(test::max_abs_diff(u, expected) < 1e-15);
}

TEST_CASE("U_epsilon is real orthogonal across the parameter range") {
  for (double e = 0.05; e <= 1.0; e += 0.05) {
    const Unitary4 u = build_u_epsilon(Epsilon(e));
    CHECK(unitarity_residual(u) < 1e-12);
    CHECK(u.imag().cwiseAbs().maxCoeff() == 0.0);
    CHECK(test::max_abs_diff(u.transpose() * u, Unitary4::Identity()) <
          1e-12);
  }
}

TEST_CASE("out-of-range tolerance radii are rejected") {
  CHECK_THROWS_AS(build_u_epsilon(Epsilon(0.0)), std::domain_error);
  CHECK_THROWS_AS(build_u_epsilon(Epsilon(1.5)), std::domain_error);
}

TEST_CASE("action_on_pair at the poles") {
  const PairAction at_zero = action_on_pair(Epsilon(0.5), BlochState(0.0, 0.0));
  CHECK(at_zero.probability_q2_zero == Approx(0.25).margin(1e-15));
  CHECK(at_zero.kept_state.theta == Approx(0.0).margin(1e-12));

  const PairAction at_pi = action_on_pair(Epsilon(0.4), BlochState(kPi, 0.0));
  CHECK(at_pi.probability_q2_zero == Approx(1.0).margin(1e-12));
  CHECK(at_pi.kept_state.theta == Approx(kPi).margin(1e-12));
}

TEST_CASE("action_on_pair at the equator for eps = 0.7") {
  const PairAction a = action_on_pair(Epsilon(0.7), BlochState(kPi / 2, 0.0));
  CHECK(a.probability_q2_zero == Approx(0.3725).margin(1e-12));
  CHECK(a.kept_state.theta ==
        Approx(2.0 * std::atan(1.0 / 0.7)).margin(1e-12));
}

TEST_CASE("pair action agrees with the complex-map prediction") {
  std::mt19937_64 rng(20240917);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double theta = 0.02 + (kPi - 0.04) * uni(rng);
    const double phi = 2.0 * kPi * uni(rng);
    const double e = 0.05 + 0.95 * uni(rng);
    const BlochState s(theta, phi);
    const Epsilon eps(e);

    const PairAction a = action_on_pair(eps, s);
    const BlochState predicted =
        lift_to_sphere(apply_map(project_to_plane(s), eps));
    CHECK(test::bloch_distance(a.kept_state, predicted) < 1e-10);

    const double p_formula =
        ideal_state_after(s, eps, 1).success_probability;
    CHECK(a.probability_q2_zero == Approx(p_formula).margin(1e-12));
  }
}
