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

#include <complex>
#include <vector>

namespace statematch {

/// Pure qubit state as a point on the Bloch sphere. theta lies in [0, pi],
/// phi is normalized into [0, 2*pi). At the poles the azimuth is unphysical
/// and is canonicalized to phi = 0.
struct BlochState {
  double theta = 0.0;
  double phi = 0.0;

  BlochState() = default;
  BlochState(double theta_in, double phi_in);
};

/// Point on the extended complex plane (C together with the point at
/// infinity). Exactly one of {finite value, infinity} is set.
class ComplexPoint {
 public:
  ComplexPoint() = default;
  static ComplexPoint finite(std::complex<double> value) {
    ComplexPoint p;
    p.value_ = value;
    return p;
  }
  static ComplexPoint infinity() {
    ComplexPoint p;
    p.infinite_ = true;
    return p;
  }

  bool is_infinity() const { return infinite_; }
  /// Finite value; must not be called on the infinity point.
  std::complex<double> value() const;
  /// |z|, or +inf for the infinity point.
  double magnitude() const;

 private:
  std::complex<double> value_{0.0, 0.0};
  bool infinite_ = false;
};

/// Tolerance radius of the matching protocol, 0 < epsilon <= 1, together
/// with the angle alpha = arccos(epsilon) in [0, pi/2).
class Epsilon {
 public:
  explicit Epsilon(double value);
  double value() const { return value_; }
  double alpha() const { return alpha_; }

 private:
  double value_;
  double alpha_;
};

/// Orbit points with magnitude beyond this bound are clamped to the infinity
/// point; the limit of the map there is known.
inline constexpr double kOrbitOverflow = 1e150;

/// Stereographic projection z = e^{i phi} tan(theta/2); theta = pi maps to
/// the infinity point.
ComplexPoint project_to_plane(const BlochState& state);

/// Inverse of project_to_plane.
BlochState lift_to_sphere(const ComplexPoint& z);

/// One protocol step on the plane: f(z) = z^2 / epsilon. Fixes 0 and
/// infinity.
ComplexPoint apply_map(const ComplexPoint& z, const Epsilon& eps);

/// Orbit z0, f(z0), ..., f^n(z0) (n+1 entries, steps >= 0).
std::vector<ComplexPoint> iterate_map(const ComplexPoint& z0,
                                      const Epsilon& eps, int steps);

struct IdealIteration {
  BlochState state;
  double success_probability = 0.0;
};

/// Closed-form kept state and success probability after `steps` >= 1
/// protocol iterations on input `state0`. The probability depends on theta0
/// only; the returned azimuth is 2^n * phi0 mod 2*pi.
IdealIteration ideal_state_after(const BlochState& state0, const Epsilon& eps,
                                 int steps);

}  // namespace statematch
