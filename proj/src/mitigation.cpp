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

#include "statematch/mitigation.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace statematch {

namespace {

Eigen::Vector4d clamp_to_simplex(Eigen::Vector4d x) {
  for (int i = 0; i < 4; ++i) x(i) = std::max(0.0, x(i));
  const double sum = x.sum();
  if (sum <= 0.0) {
    throw MitigationError("mitigate: corrected distribution vanished");
  }
  return x / sum;
}

/// Minimizes ||A_S x_S - r||^2 subject to sum(x_S) = 1 over a fixed support
/// S via the KKT system; returns nullopt when the system is singular.
std::optional<Eigen::VectorXd> solve_on_support(const Eigen::Matrix4d& a,
                                                const Eigen::Vector4d& r,
                                                const std::vector<int>& s) {
  const int m = static_cast<int>(s.size());
  Eigen::MatrixXd asub(4, m);
  for (int i = 0; i < m; ++i) asub.col(i) = a.col(s[i]);
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + 1, m + 1);
  kkt.topLeftCorner(m, m) = 2.0 * asub.transpose() * asub;
  kkt.topRightCorner(m, 1).setOnes();
  kkt.bottomLeftCorner(1, m).setOnes();
  Eigen::VectorXd rhs(m + 1);
  rhs.head(m) = 2.0 * asub.transpose() * r;
  rhs(m) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  if (!lu.isInvertible()) return std::nullopt;
  return Eigen::VectorXd(lu.solve(rhs).head(m));
}

}  // namespace

void ConfusionMatrix::validate() const {
  for (int col = 0; col < 4; ++col) {
    double sum = 0.0;
    for (int row = 0; row < 4; ++row) {
      if (entries(row, col) < -1e-12) {
        throw MitigationError("ConfusionMatrix: negative entry");
      }
      sum += entries(row, col);
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw MitigationError("ConfusionMatrix: column does not sum to 1");
    }
  }
}

std::array<CalibrationCircuit, 4> calibration_circuits() {
  return {CalibrationCircuit{"00", false, false},
          CalibrationCircuit{"01", false, true},
          CalibrationCircuit{"10", true, false},
          CalibrationCircuit{"11", true, true}};
}

CountsTable run_calibration(const CalibrationCircuit& circuit,
                            const NoiseSpec& noise, std::uint64_t shots,
                            std::uint64_t seed) {
  noise.validate(2);
  Eigen::Vector4d probs = Eigen::Vector4d::Zero();
  const int prepared = (circuit.flip_qubit1 ? 2 : 0) +
                       (circuit.flip_qubit2 ? 1 : 0);
  probs(prepared) = 1.0;
  // On basis states, damping acts on outcome probabilities as the
  // column-stochastic map [[1, gamma], [0, 1 - gamma]] per qubit.
  for (int q = 0; q < 2; ++q) {
    Eigen::Matrix2d per_qubit = Eigen::Matrix2d::Identity();
    if (!noise.damping.empty() && noise.damping[q] > 0.0) {
      per_qubit << 1.0, noise.damping[q], 0.0, 1.0 - noise.damping[q];
    }
    if (!noise.readout.empty()) {
      per_qubit = noise.readout[q] * per_qubit;
    }
    Eigen::Vector4d next = Eigen::Vector4d::Zero();
    for (int idx = 0; idx < 4; ++idx) {
      const int bit = q == 0 ? idx >> 1 : idx & 1;
      for (int out_bit = 0; out_bit < 2; ++out_bit) {
        const int out_idx =
            q == 0 ? (out_bit << 1) | (idx & 1) : (idx & 2) | out_bit;
        next(out_idx) += per_qubit(out_bit, bit) * probs(idx);
      }
    }
    probs = next;
  }
  return sample_counts(probs, shots, seed);
}

ConfusionMatrix build_confusion(const std::array<CountsTable, 4>& runs) {
  ConfusionMatrix cm;
  cm.source = "calibration";
  cm.entries.setZero();
  std::uint64_t total_shots = 0;
  for (int col = 0; col < 4; ++col) {
    if (runs[col].shots < 1) {
      throw MitigationError(
          "build_confusion: every calibration run needs at least one shot");
    }
    total_shots += runs[col].shots;
    for (const auto& [bits, n] : runs[col].counts) {
      if (bits.size() != 2) {
        throw MitigationError(
            "build_confusion: calibration counts must be two-qubit");
      }
      const int row = (bits[0] == '1' ? 2 : 0) + (bits[1] == '1' ? 1 : 0);
      cm.entries(row, col) +=
          static_cast<double>(n) / static_cast<double>(runs[col].shots);
    }
  }
  cm.shots = total_shots / 4;
  cm.validate();
  return cm;
}

ConfusionMatrix tensor_confusion(const Eigen::Matrix2d& qubit1,
                                 const Eigen::Matrix2d& qubit2) {
  ConfusionMatrix cm;
  cm.source = "synthetic";
  for (int r1 = 0; r1 < 2; ++r1)
    for (int r2 = 0; r2 < 2; ++r2)
      for (int c1 = 0; c1 < 2; ++c1)
        for (int c2 = 0; c2 < 2; ++c2)
          cm.entries(2 * r1 + r2, 2 * c1 + c2) = qubit1(r1, c1) * qubit2(r2, c2);
  cm.validate();
  return cm;
}

Eigen::Vector4d apply_confusion(const ConfusionMatrix& a,
                                const Eigen::Vector4d& p) {
  return a.entries * p;
}

Eigen::Vector4d mitigate(const Eigen::Vector4d& raw,
                         const ConfusionMatrix& a) {
  a.validate();
  if (std::abs(raw.sum() - 1.0) > 1e-9 || raw.minCoeff() < -1e-12) {
    throw std::invalid_argument(
        "mitigate: raw frequencies must form a probability vector");
  }
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(a.entries);
  const double smin = svd.singularValues()(3);
  if (smin <= 0.0 || svd.singularValues()(0) / smin > 1e12) {
    throw MitigationError("mitigate: confusion matrix is numerically singular");
  }

  const Eigen::Vector4d direct = a.entries.partialPivLu().solve(raw);
  if (direct.minCoeff() >= -1e-12) {
    return clamp_to_simplex(direct);
  }

  // Constrained least squares over the probability simplex: the optimum is
  // interior to one of the 15 support faces, where it solves the
  // equality-constrained problem.
  double best_objective = std::numeric_limits<double>::infinity();
  Eigen::Vector4d best = Eigen::Vector4d::Zero();
  bool found = false;
  for (int mask = 1; mask < 16; ++mask) {
    std::vector<int> support;
    for (int i = 0; i < 4; ++i) {
      if (mask & (1 << i)) support.push_back(i);
    }
    const auto sol = solve_on_support(a.entries, raw, support);
    if (!sol) continue;
    if (sol->minCoeff() < -1e-12) continue;
    Eigen::Vector4d candidate = Eigen::Vector4d::Zero();
    for (std::size_t i = 0; i < support.size(); ++i) {
      candidate(support[i]) = (*sol)(static_cast<int>(i));
    }
    const double objective = (a.entries * candidate - raw).squaredNorm();
    if (objective < best_objective - 1e-15) {
      best_objective = objective;
      best = candidate;
      found = true;
    }
  }
  if (!found) {
    throw MitigationError("mitigate: constrained solve failed");
  }
  return clamp_to_simplex(best);
}

}  // namespace statematch
