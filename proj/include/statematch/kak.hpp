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
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "statematch/state_space.hpp"
#include "statematch/unitary_builder.hpp"

namespace statematch {

/// Input lies outside an operation's structural domain: non-unitary matrix,
/// a local factor that is not a tensor product, or a k-vector outside the
/// two-CNOT family.
class DecompositionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace kak_constants {

/// Magic-basis change matrix M. Local unitaries conjugated by M become real
/// orthogonal matrices.
const Eigen::Matrix4cd& magic_basis();

/// Phase-mixing matrix Lambda; Lambda^{-1} = Lambda^T / 4.
const Eigen::Matrix4d& lambda_matrix();

/// Pauli matrix sigma_j for j in {1, 2, 3}.
const Eigen::Matrix2cd& pauli(int j);

const Eigen::Matrix2cd& hadamard();

/// S = (1/sqrt(2)) [[i, -1], [1, -i]]; the qubit-2 factor of the conjugated
/// eigenvector matrix H (+) H.
const Eigen::Matrix2cd& s_matrix();

/// sigma_j (x) sigma_j.
Eigen::Matrix4cd sigma_tensor(int j);

}  // namespace kak_constants

/// Intermediate matrices of the magic-basis joint diagonalization, kept for
/// audit. After completion, u_prime = q_l * diag(exp(i*phi)) * q_r.
struct KakIntermediates {
  Eigen::Matrix4cd u_prime;
  Eigen::Matrix4d u_r;
  Eigen::Matrix4d u_i;
  /// Phase applied to the input to reach unit determinant.
  std::complex<double> su_phase{1.0, 0.0};

  // Filled by joint diagonalization:
  Eigen::Matrix4d v_a;
  Eigen::Matrix4d x_a;
  Eigen::Vector4d d;         // diagonal of D; U_R = V_A D X_A^T
  Eigen::Matrix4d u_i_prime; // V_A^T U_I X_A
  Eigen::Matrix4d p;         // u_i_prime = P G P^T
  Eigen::Vector4d g;
  Eigen::Vector4d phi;       // D_jj + i G_jj = exp(i phi_j)
  Eigen::Matrix4d q_l;       // V_A P
  Eigen::Matrix4d q_r;       // P^T X_A^T
  bool analytic_path = false;
  bool completed = false;
};

/// Canonical-class data of a two-qubit unitary: phase k0, interaction vector
/// (k1, k2, k3) and the four local SU(2) factors. Reconstructs the input as
/// (a1 (x) a2) exp(i (k0 + k . Sigma)) (b1 (x) b2).
struct KakResult {
  double k0 = 0.0;
  Eigen::Vector3d k = Eigen::Vector3d::Zero();
  Eigen::Matrix2cd a1, a2, b1, b2;
  KakIntermediates intermediates;
};

struct Gate {
  enum class Kind { OneQubit, Cnot };
  Kind kind = Kind::OneQubit;
  int qubit = 0;    // OneQubit target
  int control = 0;  // Cnot wires
  int target = 1;
  Eigen::Matrix2cd matrix = Eigen::Matrix2cd::Identity();

  static Gate one_qubit(int qubit, const Eigen::Matrix2cd& m);
  static Gate cnot(int control, int target);
};

/// Ordered gate list (temporal order: gates[0] acts first) realizing a
/// two-qubit unitary up to the recorded global phase.
struct GateSequence {
  std::vector<Gate> gates;
  double epsilon = 0.0;
  int cnot_count = 0;
  std::complex<double> global_phase{1.0, 0.0};
};

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b);

/// exp(i (k0 + sum_j k_j sigma_j (x) sigma_j)); evaluated through the magic
/// basis where the generator is diagonal.
Unitary4 exp_k_sigma(double k0, const Eigen::Vector3d& k);

/// (a1 (x) a2) exp(i (k0 + k . Sigma)) (b1 (x) b2).
Unitary4 kak_reconstruct(const KakResult& kak);

/// 1 - |tr(a^dag b)| / 4; zero iff a and b agree up to a global phase.
double phase_distance(const Unitary4& a, const Unitary4& b);

/// Step 1: normalize to unit determinant and conjugate into the magic basis.
/// Throws DecompositionError when the input is not unitary (residual > 1e-8).
KakIntermediates to_magic_basis(const Unitary4& u);

/// Steps 2-4, generic numerical route: SVD of U_R with degenerate-subspace
/// reorthogonalization, then the induced diagonalization of U_I.
void joint_diagonalize(KakIntermediates& inter);

/// Steps 2-4 using the closed forms available for U_epsilon. Throws
/// DecompositionError when |cos(2 alpha)| < 1e-6 (the degenerate branch,
/// handled by the numerical route).
void joint_diagonalize_analytic(KakIntermediates& inter, const Epsilon& eps);

/// Step 5: (k0, k) = Lambda^{-1} Phi.
std::pair<double, Eigen::Vector3d> extract_k_vector(const Eigen::Vector4d& phi);

/// Splits a magic-frame SO(4) matrix o into one-qubit factors:
/// w1 (x) w2 = M o M^dag with det(w1) = det(w2) = 1. Of the two homomorphic
/// preimages +-(w1, w2), returns the canonical sign.
std::pair<Eigen::Matrix2cd, Eigen::Matrix2cd> factor_local_so4(
    const Eigen::Matrix4d& o);

/// Full decomposition of an arbitrary two-qubit unitary (numerical route).
KakResult decompose(const Unitary4& u);

/// Full decomposition of U_epsilon. Uses the analytic closed forms away from
/// alpha = pi/4 and the numerical route inside the degenerate window.
KakResult decompose_epsilon(const Epsilon& eps);

/// Closed-form squared singular values of U_R for U_epsilon.
struct UrSingularValues {
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
};
UrSingularValues u_r_singular_values(const Epsilon& eps);

/// Swap-rotates the interaction term into the two-CNOT canonical form and
/// emits the gate sequence (B locals) CNOT (u2 (x) v2) CNOT (A locals) with
/// the swap rotations folded into the outer locals. Requires k1 = 0 and
/// k2, k3 <= 0 (the protocol family); throws DecompositionError otherwise.
GateSequence canonicalize_and_synthesize(const KakResult& kak, double epsilon);

/// Dense matrix of the sequence including its global phase.
Unitary4 sequence_matrix(const GateSequence& seq);

/// Residual 1 - |tr(target^dag product)| / 4.
double verify_decomposition(const GateSequence& seq, const Unitary4& target);

}  // namespace statematch
