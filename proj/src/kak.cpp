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

#include "statematch/kak.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace statematch {

namespace {

using std::complex;
constexpr double kPi = std::numbers::pi;
const complex<double> kI{0.0, 1.0};

// Degenerate-branch routing threshold: |cos(2 alpha)| below this goes to the
// numerical route.
constexpr double kAnalyticWindow = 1e-6;

// Singular values closer than this are treated as one cluster. A cluster
// counts as null only when the independent-rotation freedom it uses cannot
// perturb U_R beyond the reconstruction contract.
constexpr double kClusterTol = 1e-5;
constexpr double kNullTol = 1e-12;

Eigen::Matrix2cd pauli_exp(int j, double angle) {
  // exp(-i angle sigma_j)
  return std::cos(angle) * Eigen::Matrix2cd::Identity() -
         kI * std::sin(angle) * kak_constants::pauli(j);
}

}  // namespace

namespace kak_constants {

const Eigen::Matrix4cd& magic_basis() {
  static const Eigen::Matrix4cd m = [] {
    Eigen::Matrix4cd v;
    v << 1, 0, 0, kI,
         0, kI, 1, 0,
         0, kI, -1, 0,
         1, 0, 0, -kI;
    return Eigen::Matrix4cd(v / std::sqrt(2.0));
  }();
  return m;
}

const Eigen::Matrix4d& lambda_matrix() {
  static const Eigen::Matrix4d l = [] {
    Eigen::Matrix4d v;
    v << 1, 1, -1, 1,
         1, 1, 1, -1,
         1, -1, -1, -1,
         1, -1, 1, 1;
    return v;
  }();
  return l;
}

const Eigen::Matrix2cd& pauli(int j) {
  static const Eigen::Matrix2cd s1 = (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
  static const Eigen::Matrix2cd s2 =
      (Eigen::Matrix2cd() << 0, -kI, kI, 0).finished();
  static const Eigen::Matrix2cd s3 = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
  switch (j) {
    case 1: return s1;
    case 2: return s2;
    case 3: return s3;
    default: throw std::invalid_argument("pauli: index must be 1, 2 or 3");
  }
}

const Eigen::Matrix2cd& hadamard() {
  static const Eigen::Matrix2cd h =
      (Eigen::Matrix2cd() << 1, 1, 1, -1).finished() / std::sqrt(2.0);
  return h;
}

const Eigen::Matrix2cd& s_matrix() {
  static const Eigen::Matrix2cd s =
      (Eigen::Matrix2cd() << kI, -1, 1, -kI).finished() / std::sqrt(2.0);
  return s;
}

Eigen::Matrix4cd sigma_tensor(int j) { return kron2(pauli(j), pauli(j)); }

}  // namespace kak_constants

Gate Gate::one_qubit(int qubit, const Eigen::Matrix2cd& m) {
  Gate g;
  g.kind = Kind::OneQubit;
  g.qubit = qubit;
  g.matrix = m;
  return g;
}

Gate Gate::cnot(int control, int target) {
  Gate g;
  g.kind = Kind::Cnot;
  g.control = control;
  g.target = target;
  return g;
}

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

Unitary4 exp_k_sigma(double k0, const Eigen::Vector3d& k) {
  Eigen::Vector4d kk;
  kk << k0, k(0), k(1), k(2);
  const Eigen::Vector4d phi = kak_constants::lambda_matrix() * kk;
  Eigen::Vector4cd diag;
  for (int j = 0; j < 4; ++j) diag(j) = std::polar(1.0, phi(j));
  const Eigen::Matrix4cd& m = kak_constants::magic_basis();
  return m * diag.asDiagonal() * m.adjoint();
}

Unitary4 kak_reconstruct(const KakResult& kak) {
  return kron2(kak.a1, kak.a2) * exp_k_sigma(kak.k0, kak.k) *
         kron2(kak.b1, kak.b2);
}

double phase_distance(const Unitary4& a, const Unitary4& b) {
  return 1.0 - std::abs((a.adjoint() * b).trace()) / 4.0;
}

KakIntermediates to_magic_basis(const Unitary4& u) {
  if (unitarity_residual(u) > 1e-8) {
    throw DecompositionError("to_magic_basis: input is not unitary");
  }
  // Normalize to unit determinant; among the four roots, apply the phase of
  // smallest |arg| (non-negative arg on ties).
  const complex<double> det = u.determinant();
  complex<double> best{1.0, 0.0};
  double best_arg = 1e9;
  for (int r = 0; r < 4; ++r) {
    const complex<double> c =
        std::polar(1.0, -std::arg(det) / 4.0 - kPi / 2.0 * r);
    const double a = std::abs(std::arg(c));
    if (a < best_arg - 1e-15 ||
        (std::abs(a - best_arg) <= 1e-15 && std::arg(c) > std::arg(best))) {
      best = c;
      best_arg = a;
    }
  }
  KakIntermediates inter;
  inter.su_phase = best;
  const Eigen::Matrix4cd& m = kak_constants::magic_basis();
  inter.u_prime = m.adjoint() * (best * u) * m;
  inter.u_r = inter.u_prime.real();
  inter.u_i = inter.u_prime.imag();
  return inter;
}

namespace {

void finalize_intermediates(KakIntermediates& inter) {
  for (int j = 0; j < 4; ++j) {
    const double mod = std::hypot(inter.d(j), inter.g(j));
    if (std::abs(mod - 1.0) > 1e-8) {
      throw DecompositionError(
          "joint_diagonalize: D + iG is not a diagonal phase");
    }
    inter.phi(j) = std::atan2(inter.g(j), inter.d(j));
  }
  inter.q_l = inter.v_a * inter.p;
  inter.q_r = inter.p.transpose() * inter.x_a.transpose();
  inter.completed = true;
}

}  // namespace

void joint_diagonalize(KakIntermediates& inter) {
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(
      inter.u_r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix4d v = svd.matrixU();
  Eigen::Matrix4d x = svd.matrixV();
  Eigen::Vector4d d = svd.singularValues();  // descending

  // Within a degenerate cluster the factors are only determined up to a
  // joint rotation; choose it so that V^T U_I X restricted to the cluster is
  // diagonal. A null cluster admits independent rotations on both sides.
  Eigen::Matrix4d b = v.transpose() * inter.u_i * x;
  int i = 0;
  while (i < 4) {
    int j = i;
    while (j + 1 < 4 && d(i) - d(j + 1) < kClusterTol) ++j;
    const int len = j - i + 1;
    if (len > 1 || d(i) < kNullTol) {
      const Eigen::MatrixXd blk = b.block(i, i, len, len);
      if (d(i) < kNullTol) {
        Eigen::JacobiSVD<Eigen::MatrixXd> bsvd(
            blk, Eigen::ComputeFullU | Eigen::ComputeFullV);
        v.block(0, i, 4, len) = v.block(0, i, 4, len) * bsvd.matrixU();
        x.block(0, i, 4, len) = x.block(0, i, 4, len) * bsvd.matrixV();
      } else {
        const Eigen::MatrixXd sym = 0.5 * (blk + blk.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
        // ascending eigenvalues; flip to descending for a fixed convention
        Eigen::MatrixXd rot = es.eigenvectors().rowwise().reverse();
        v.block(0, i, 4, len) = v.block(0, i, 4, len) * rot;
        x.block(0, i, 4, len) = x.block(0, i, 4, len) * rot;
      }
      b = v.transpose() * inter.u_i * x;
    }
    i = j + 1;
  }

  // Restore det = +1 on both sides. A joint column flip fixes both; a
  // one-sided flip moves the sign into the last (smallest) diagonal entry.
  const double dv = v.determinant();
  const double dx = x.determinant();
  if (dv < 0.0 && dx < 0.0) {
    v.col(3) *= -1.0;
    x.col(3) *= -1.0;
  } else if (dv < 0.0) {
    v.col(3) *= -1.0;
    d(3) = -d(3);
  } else if (dx < 0.0) {
    x.col(3) *= -1.0;
    d(3) = -d(3);
  }
  b = v.transpose() * inter.u_i * x;

  const Eigen::Matrix4d offdiag = b - b.diagonal().asDiagonal().toDenseMatrix();
  if (offdiag.cwiseAbs().maxCoeff() > 1e-8) {
    throw DecompositionError(
        "joint_diagonalize: transformed imaginary part is not diagonal");
  }

  inter.v_a = v;
  inter.x_a = x;
  inter.d = d;
  inter.u_i_prime = b;
  inter.p = Eigen::Matrix4d::Identity();
  inter.g = b.diagonal();
  inter.analytic_path = false;
  finalize_intermediates(inter);
}

void joint_diagonalize_analytic(KakIntermediates& inter, const Epsilon& eps) {
  const double a = eps.alpha();
  const double s2a = std::sin(2.0 * a);
  const double c2a = std::cos(2.0 * a);
  if (std::abs(c2a) < kAnalyticWindow) {
    throw DecompositionError(
        "joint_diagonalize_analytic: degenerate branch at alpha = pi/4");
  }
  const double r = std::sqrt(8.0 + s2a * s2a);
  const double lambda_plus = (4.0 - s2a + r) / 8.0;
  // 1 - sin(2a) = (sin a - cos a)^2 keeps the small singular value accurate.
  const double sc = std::sin(a) - std::cos(a);
  const double lambda_minus = sc * sc / (8.0 * lambda_plus);

  const double y1 = (3.0 * s2a + r) / (2.0 * std::sqrt(2.0) * c2a);
  const double y2 = (s2a - r) / (2.0 * std::sqrt(2.0));
  const double n1 = std::hypot(1.0, y1);
  const double n2 = std::hypot(1.0, y2);

  Eigen::Matrix4d x;
  x << y1 / n1, 0, -1.0 / n1, 0,
       0, 1.0 / n2, 0, -y2 / n2,
       1.0 / n1, 0, y1 / n1, 0,
       0, y2 / n2, 0, 1.0 / n2;

  Eigen::Vector4d d;
  const double sp = std::sqrt(lambda_plus);
  const double sm = std::sqrt(lambda_minus);
  d << sp, sp, sm, sm;

  // Left singular vectors from U_R x_j = lambda^(1/2) v_j.
  Eigen::Matrix4d v = inter.u_r * x;
  for (int j = 0; j < 4; ++j) v.col(j) /= d(j);
  if ((v.transpose() * v - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() >
      1e-8) {
    throw DecompositionError(
        "joint_diagonalize_analytic: left factor is not orthogonal");
  }

  const Eigen::Matrix4d b = v.transpose() * inter.u_i * x;
  // The transformed imaginary part couples only (0,1) and (2,3).
  Eigen::Matrix4d expected = Eigen::Matrix4d::Zero();
  expected(0, 1) = expected(1, 0) = b(0, 1);
  expected(2, 3) = expected(3, 2) = b(2, 3);
  if ((b - expected).cwiseAbs().maxCoeff() > 1e-9) {
    throw DecompositionError(
        "joint_diagonalize_analytic: unexpected structure of U'_I");
  }

  Eigen::Matrix4d p = Eigen::Matrix4d::Zero();
  const Eigen::Matrix2d h = kak_constants::hadamard().real();
  p.block<2, 2>(0, 0) = h;
  p.block<2, 2>(2, 2) = h;

  inter.v_a = v;
  inter.x_a = x;
  inter.d = d;
  inter.u_i_prime = b;
  inter.p = p;
  inter.g << b(0, 1), -b(0, 1), b(2, 3), -b(2, 3);
  inter.analytic_path = true;
  finalize_intermediates(inter);
}

std::pair<double, Eigen::Vector3d> extract_k_vector(
    const Eigen::Vector4d& phi) {
  const Eigen::Vector4d k =
      kak_constants::lambda_matrix().transpose() * phi / 4.0;
  return {k(0), Eigen::Vector3d(k(1), k(2), k(3))};
}

std::pair<Eigen::Matrix2cd, Eigen::Matrix2cd> factor_local_so4(
    const Eigen::Matrix4d& o) {
  if ((o.transpose() * o - Eigen::Matrix4d::Identity())
          .cwiseAbs()
          .maxCoeff() > 1e-8) {
    throw DecompositionError("factor_local_so4: input is not orthogonal");
  }
  if (std::abs(o.determinant() - 1.0) > 1e-8) {
    throw DecompositionError(
        "factor_local_so4: determinant -1, no SU(2) x SU(2) preimage");
  }
  const Eigen::Matrix4cd& m = kak_constants::magic_basis();
  const Eigen::Matrix4cd t = m * o.cast<complex<double>>() * m.adjoint();

  // Realign so that a tensor product becomes a rank-1 matrix:
  // rearranged(2i+j, 2k+l) = t(2i+k, 2j+l).
  Eigen::Matrix4cd rearranged;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          rearranged(2 * i + j, 2 * k + l) = t(2 * i + k, 2 * j + l);

  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(
      rearranged, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues()(1) > 1e-8) {
    throw DecompositionError(
        "factor_local_so4: input does not factor into one-qubit unitaries");
  }
  const double scale = std::sqrt(svd.singularValues()(0));
  Eigen::Matrix2cd w1, w2;
  const Eigen::Vector4cd u0 = svd.matrixU().col(0);
  const Eigen::Vector4cd v0 = svd.matrixV().col(0).conjugate();
  w1 << u0(0), u0(1), u0(2), u0(3);
  w2 << v0(0), v0(1), v0(2), v0(3);
  w1 *= scale;
  w2 *= scale;

  // Rephase so that det(w1) = det(w2) = 1.
  const complex<double> det1 = w1.determinant();
  const complex<double> g = std::polar(1.0, -std::arg(det1) / 2.0);
  w1 *= g;
  w2 /= g;
  const double mag = std::sqrt(std::abs(w1.determinant()));
  w1 /= mag;
  w2 *= mag;
  if (std::abs(w2.determinant() - 1.0) > 1e-8) {
    throw DecompositionError(
        "factor_local_so4: factors cannot both be special unitary");
  }

  // Canonical choice between (w1, w2) and (-w1, -w2): the first entry of w1
  // of significant magnitude gets a non-negative real part (non-negative
  // imaginary part on ties).
  for (int idx = 0; idx < 4; ++idx) {
    const complex<double> e = w1(idx / 2, idx % 2);
    if (std::abs(e) <= 1e-9) continue;
    const bool flip = e.real() < -1e-12 ||
                      (std::abs(e.real()) <= 1e-12 && e.imag() < -1e-12);
    if (flip) {
      w1 = -w1;
      w2 = -w2;
    }
    break;
  }

  if ((kron2(w1, w2) - t).cwiseAbs().maxCoeff() > 1e-9) {
    throw DecompositionError("factor_local_so4: reconstruction failed");
  }
  return {w1, w2};
}

namespace {

KakResult complete_decomposition(KakIntermediates inter, const Unitary4& u) {
  KakResult result;
  auto [k0, k] = extract_k_vector(inter.phi);
  std::tie(result.a1, result.a2) = factor_local_so4(inter.q_l);
  std::tie(result.b1, result.b2) = factor_local_so4(inter.q_r);
  // Undo the determinant normalization so the result reconstructs the input
  // exactly, not only up to phase.
  result.k0 = k0 - std::arg(inter.su_phase);
  result.k = k;
  result.intermediates = std::move(inter);

  // When k1 vanishes the one-sided conjugation by i*sigma_c flips the signs
  // of the two components with j != c; normalize to k2, k3 <= 0.
  if (std::abs(result.k(0)) <= 1e-10 &&
      (result.k(1) > 1e-12 || result.k(2) > 1e-12)) {
    const bool flip2 = result.k(1) > 1e-12;
    const bool flip3 = result.k(2) > 1e-12;
    const int c = flip2 && flip3 ? 1 : (flip2 ? 3 : 2);
    const Eigen::Matrix2cd sigma = kak_constants::pauli(c);
    result.a1 = result.a1 * (kI * sigma);
    result.b1 = (-kI * sigma) * result.b1;
    for (int j = 1; j <= 3; ++j) {
      if (j != c) result.k(j - 1) = -result.k(j - 1);
    }
  }

  const double resid = phase_distance(u, kak_reconstruct(result));
  if (resid > 1e-9) {
    std::ostringstream msg;
    msg << "decompose: reconstruction residual " << resid
        << " exceeds 1e-9 (k0=" << result.k0 << ", k=[" << result.k.transpose()
        << "])";
    throw DecompositionError(msg.str());
  }
  return result;
}

}  // namespace

KakResult decompose(const Unitary4& u) {
  KakIntermediates inter = to_magic_basis(u);
  joint_diagonalize(inter);
  return complete_decomposition(std::move(inter), u);
}

KakResult decompose_epsilon(const Epsilon& eps) {
  const Unitary4 u = build_u_epsilon(eps);
  KakIntermediates inter = to_magic_basis(u);
  if (std::abs(std::cos(2.0 * eps.alpha())) >= kAnalyticWindow) {
    joint_diagonalize_analytic(inter, eps);
  } else {
    joint_diagonalize(inter);
  }
  return complete_decomposition(std::move(inter), u);
}

UrSingularValues u_r_singular_values(const Epsilon& eps) {
  const double a = eps.alpha();
  const double s2a = std::sin(2.0 * a);
  const double r = std::sqrt(8.0 + s2a * s2a);
  UrSingularValues sv;
  sv.lambda_plus = (4.0 - s2a + r) / 8.0;
  const double sc = std::sin(a) - std::cos(a);
  sv.lambda_minus = sc * sc / (8.0 * sv.lambda_plus);
  return sv;
}

GateSequence canonicalize_and_synthesize(const KakResult& kak,
                                         double epsilon) {
  const Eigen::Vector3d& k = kak.k;
  if (std::abs(k(0)) > 1e-9 || k(1) > 1e-9 || k(2) > 1e-9) {
    std::ostringstream msg;
    msg << "canonicalize_and_synthesize: k-vector [" << k.transpose()
        << "] is outside the protocol family (need k1 = 0 and k2, k3 <= 0)";
    throw DecompositionError(msg.str());
  }
  const double a2 = std::max(0.0, -k(1));
  const double a3 = std::max(0.0, -k(2));

  // w = (1 - i sigma_1)/sqrt(2) = exp(-i pi/4 sigma_1).
  const Eigen::Matrix2cd w = pauli_exp(1, kPi / 4.0);
  Eigen::Matrix2cd rot_pre;   // simultaneous swap rotation on both qubits
  Eigen::Matrix2cd u2, v2;
  if (a2 - a3 >= -1e-12) {
    // (0, |k2|, |k3|) -> (|k2|, 0, |k3|) -> (|k2|, |k3|, 0)
    rot_pre = pauli_exp(3, 3.0 * kPi / 4.0) * pauli_exp(1, 3.0 * kPi / 4.0);
    u2 = pauli_exp(1, a2);
    v2 = pauli_exp(3, -a3);  // exp(+i |k3| sigma_3)
  } else {
    // (0, |k2|, |k3|) -> (|k3|, |k2|, 0)
    rot_pre = pauli_exp(2, kPi / 4.0);
    u2 = pauli_exp(1, a3);
    v2 = pauli_exp(3, -a2);
  }

  const Eigen::Matrix2cd w_dag = w.adjoint();
  const Eigen::Matrix2cd rot_dag = rot_pre.adjoint();
  GateSequence seq;
  seq.epsilon = epsilon;
  seq.global_phase = std::polar(1.0, kak.k0);
  seq.gates.push_back(Gate::one_qubit(0, w_dag * rot_dag * kak.b1));
  seq.gates.push_back(Gate::one_qubit(1, w * rot_dag * kak.b2));
  seq.gates.push_back(Gate::cnot(0, 1));
  seq.gates.push_back(Gate::one_qubit(0, u2));
  seq.gates.push_back(Gate::one_qubit(1, v2));
  seq.gates.push_back(Gate::cnot(0, 1));
  seq.gates.push_back(Gate::one_qubit(0, kak.a1 * rot_pre * w));
  seq.gates.push_back(Gate::one_qubit(1, kak.a2 * rot_pre * w_dag));
  seq.cnot_count = 2;

  const double resid =
      phase_distance(kak_reconstruct(kak), sequence_matrix(seq));
  if (resid > 1e-9) {
    std::ostringstream msg;
    msg << "canonicalize_and_synthesize: synthesis residual " << resid
        << " exceeds 1e-9 (k=[" << k.transpose() << "], branch "
        << (a2 - a3 >= -1e-12 ? "|k2|>=|k3|" : "|k3|>|k2|") << ")";
    throw DecompositionError(msg.str());
  }
  return seq;
}

Unitary4 sequence_matrix(const GateSequence& seq) {
  Unitary4 acc = Unitary4::Identity();
  for (const Gate& g : seq.gates) {
    Unitary4 full;
    if (g.kind == Gate::Kind::OneQubit) {
      full = g.qubit == 0 ? kron2(g.matrix, Eigen::Matrix2cd::Identity())
                          : kron2(Eigen::Matrix2cd::Identity(), g.matrix);
    } else {
      full = Unitary4::Zero();
      for (int b0 = 0; b0 < 2; ++b0)
        for (int b1 = 0; b1 < 2; ++b1) {
          int bits[2] = {b0, b1};
          int out[2] = {b0, b1};
          if (bits[g.control] == 1) out[g.target] ^= 1;
          full(2 * out[0] + out[1], 2 * b0 + b1) = 1.0;
        }
    }
    acc = full * acc;
  }
  return seq.global_phase * acc;
}

double verify_decomposition(const GateSequence& seq, const Unitary4& target) {
  return phase_distance(target, sequence_matrix(seq));
}

}  // namespace statematch
