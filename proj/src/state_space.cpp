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

#include "statematch/state_space.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace statematch {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_phase(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  // fmod can land exactly on 2*pi after the correction
  if (w >= kTwoPi) w = 0.0;
  return w;
}
}  // namespace

BlochState::BlochState(double theta_in, double phi_in) : theta(theta_in) {
  if (theta < 0.0 || theta > kPi) {
    if (theta > -1e-12 && theta < kPi + 1e-12) {
      theta = theta < 0.0 ? 0.0 : kPi;
    } else {
      throw std::domain_error("BlochState: theta must lie in [0, pi]");
    }
  }
  phi = (theta == 0.0 || theta == kPi) ? 0.0 : wrap_phase(phi_in);
}

std::complex<double> ComplexPoint::value() const {
  if (infinite_) {
    throw std::logic_error("ComplexPoint: no finite value at infinity");
  }
  return value_;
}

double ComplexPoint::magnitude() const {
  return infinite_ ? std::numeric_limits<double>::infinity()
                   : std::abs(value_);
}

Epsilon::Epsilon(double value) : value_(value) {
  if (!(value > 0.0) || value > 1.0) {
    throw std::domain_error("Epsilon: tolerance radius must lie in (0, 1]");
  }
  alpha_ = std::acos(value_);
}

ComplexPoint project_to_plane(const BlochState& state) {
  if (state.theta == kPi) return ComplexPoint::infinity();
  double r = std::tan(state.theta / 2.0);
  return ComplexPoint::finite(std::polar(r, state.phi));
}

BlochState lift_to_sphere(const ComplexPoint& z) {
  if (z.is_infinity()) return BlochState(kPi, 0.0);
  double r = std::abs(z.value());
  double theta = 2.0 * std::atan(r);
  double phi = r == 0.0 ? 0.0 : std::arg(z.value());
  return BlochState(theta, phi);
}

ComplexPoint apply_map(const ComplexPoint& z, const Epsilon& eps) {
  if (z.is_infinity()) return ComplexPoint::infinity();
  if (std::abs(z.value()) > kOrbitOverflow) return ComplexPoint::infinity();
  return ComplexPoint::finite(z.value() * z.value() / eps.value());
}

std::vector<ComplexPoint> iterate_map(const ComplexPoint& z0,
                                      const Epsilon& eps, int steps) {
  if (steps < 0) {
    throw std::invalid_argument("iterate_map: steps must be >= 0");
  }
  std::vector<ComplexPoint> orbit;
  orbit.reserve(static_cast<std::size_t>(steps) + 1);
  orbit.push_back(z0);
  for (int k = 0; k < steps; ++k) {
    orbit.push_back(apply_map(orbit.back(), eps));
  }
  return orbit;
}

IdealIteration ideal_state_after(const BlochState& state0, const Epsilon& eps,
                                 int steps) {
  if (steps < 1) {
    throw std::invalid_argument("ideal_state_after: steps must be >= 1");
  }
  double half = state0.theta / 2.0;
  double c = std::cos(half);
  double s = std::sin(half);
  double e = eps.value();
  double q = std::pow(2.0, steps + 1);  // 2^(n+1)
  double p_success = std::pow(e, q - 2.0) * std::pow(c, q) + std::pow(s, q);

  // tan(theta_n / 2) = tan(theta0/2)^(2^n) / eps^(2^n - 1), evaluated in log
  // space so that the double-exponential growth saturates to the poles
  // instead of overflowing.
  double theta_n;
  if (state0.theta == 0.0) {
    theta_n = 0.0;
  } else if (state0.theta == kPi) {
    theta_n = kPi;
  } else {
    double pw = std::pow(2.0, steps);
    double log_tan = pw * std::log(std::tan(half)) - (pw - 1.0) * std::log(e);
    theta_n = 2.0 * std::atan(std::exp(log_tan));
  }
  double phi_n = std::fmod(std::pow(2.0, steps) * state0.phi, kTwoPi);
  return IdealIteration{BlochState(theta_n, phi_n), p_success};
}

}  // namespace statematch
