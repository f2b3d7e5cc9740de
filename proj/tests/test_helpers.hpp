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
#include <cmath>
#include <complex>
#include <random>

#include "statematch/kak.hpp"
#include "statematch/state_space.hpp"

namespace statematch::test {

inline double max_abs_diff(const Eigen::MatrixXcd& a,
                           const Eigen::MatrixXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

/// Chordal distance between Bloch vectors; insensitive to the unphysical
/// azimuth at the poles.
inline double bloch_distance(const BlochState& a, const BlochState& b) {
  const Eigen::Vector3d va(std::sin(a.theta) * std::cos(a.phi),
                           std::sin(a.theta) * std::sin(a.phi),
                           std::cos(a.theta));
  const Eigen::Vector3d vb(std::sin(b.theta) * std::cos(b.phi),
                           std::sin(b.theta) * std::sin(b.phi),
                           std::cos(b.theta));
  return (va - vb).norm();
}

/// Haar-ish random U(4) from the QR of a complex Gaussian matrix,
/// renormalized to unit determinant.
inline Eigen::Matrix4cd random_su4(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Matrix4cd z;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) z(r, c) = {gauss(rng), gauss(rng)};
  Eigen::HouseholderQR<Eigen::Matrix4cd> qr(z);
  Eigen::Matrix4cd q = qr.householderQ();
  // fix the phases left free by the QR factorization
  const Eigen::Matrix4cd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < 4; ++j) {
    q.col(j) *= r(j, j) / std::abs(r(j, j));
  }
  const std::complex<double> det = q.determinant();
  return q * std::polar(1.0, -std::arg(det) / 4.0);
}

inline Eigen::Matrix2cd random_su2(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Vector4d v;
  for (int i = 0; i < 4; ++i) v(i) = gauss(rng);
  v.normalize();
  Eigen::Matrix2cd m;
  m << std::complex<double>(v(0), v(1)), std::complex<double>(v(2), v(3)),
      std::complex<double>(-v(2), v(3)), std::complex<double>(v(0), -v(1));
  return m;
}

/// Independent oracle for exp(i (k0 + k . Sigma)): eigendecomposition of the
/// Hermitian generator, no magic-basis shortcut.
inline Eigen::Matrix4cd exp_k_sigma_oracle(double k0,
                                           const Eigen::Vector3d& k) {
  Eigen::Matrix4cd h = k0 * Eigen::Matrix4cd::Identity();
  for (int j = 1; j <= 3; ++j) {
    h += k(j - 1) * kak_constants::sigma_tensor(j);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h);
  Eigen::Vector4cd phases;
  for (int i = 0; i < 4; ++i) {
    phases(i) = std::polar(1.0, es.eigenvalues()(i));
  }
  return es.eigenvectors() * phases.asDiagonal() *
         es.eigenvectors().adjoint();
}

}  // namespace statematch::test
