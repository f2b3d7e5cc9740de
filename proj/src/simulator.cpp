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

#include "statematch/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "statematch/rng.hpp"

namespace statematch {

namespace {

using std::complex;

std::uint64_t bit_mask(int qubit_count, int qubit) {
  return std::uint64_t{1} << (qubit_count - 1 - qubit);
}

void apply_one_qubit(Eigen::VectorXcd& state, int qubit_count, int qubit,
                     const Eigen::Matrix2cd& m) {
  const std::uint64_t mask = bit_mask(qubit_count, qubit);
  const std::uint64_t dim = std::uint64_t{1} << qubit_count;
  for (std::uint64_t idx = 0; idx < dim; ++idx) {
    if (idx & mask) continue;
    const complex<double> a0 = state(idx);
    const complex<double> a1 = state(idx | mask);
    state(idx) = m(0, 0) * a0 + m(0, 1) * a1;
    state(idx | mask) = m(1, 0) * a0 + m(1, 1) * a1;
  }
}

void apply_two_qubit(Eigen::VectorXcd& state, int qubit_count, int qa, int qb,
                     const Eigen::Matrix4cd& m) {
  const std::uint64_t ma = bit_mask(qubit_count, qa);
  const std::uint64_t mb = bit_mask(qubit_count, qb);
  const std::uint64_t dim = std::uint64_t{1} << qubit_count;
  for (std::uint64_t idx = 0; idx < dim; ++idx) {
    if ((idx & ma) || (idx & mb)) continue;
    const std::uint64_t i00 = idx;
    const std::uint64_t i01 = idx | mb;
    const std::uint64_t i10 = idx | ma;
    const std::uint64_t i11 = idx | ma | mb;
    const Eigen::Vector4cd in(state(i00), state(i01), state(i10), state(i11));
    const Eigen::Vector4cd out = m * in;
    state(i00) = out(0);
    state(i01) = out(1);
    state(i10) = out(2);
    state(i11) = out(3);
  }
}

void apply_cnot(Eigen::VectorXcd& state, int qubit_count, int control,
                int target) {
  const std::uint64_t mc = bit_mask(qubit_count, control);
  const std::uint64_t mt = bit_mask(qubit_count, target);
  const std::uint64_t dim = std::uint64_t{1} << qubit_count;
  for (std::uint64_t idx = 0; idx < dim; ++idx) {
    if ((idx & mc) && !(idx & mt)) {
      std::swap(state(idx), state(idx | mt));
    }
  }
}

Eigen::Matrix2cd prep_ry(double theta) {
  Eigen::Matrix2cd m;
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  m << c, -s, s, c;
  return m;
}

Eigen::Matrix2cd prep_phase(double phi) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = std::polar(1.0, phi);
  return m;
}

void apply_pair_gates(Eigen::VectorXcd& state, const Circuit& c,
                      bool use_gate_sequence) {
  if (!use_gate_sequence) {
    const Unitary4 u = build_u_epsilon(Epsilon(c.epsilon));
    for (const auto& [qa, qb] : c.pairs) {
      apply_two_qubit(state, c.qubit_count, qa, qb, u);
    }
    return;
  }
  const GateSequence seq =
      canonicalize_and_synthesize(decompose_epsilon(Epsilon(c.epsilon)),
                                  c.epsilon);
  for (const auto& [qa, qb] : c.pairs) {
    for (const Gate& g : seq.gates) {
      if (g.kind == Gate::Kind::OneQubit) {
        apply_one_qubit(state, c.qubit_count, g.qubit == 0 ? qa : qb,
                        g.matrix);
      } else {
        apply_cnot(state, c.qubit_count, g.control == 0 ? qa : qb,
                   g.target == 0 ? qa : qb);
      }
    }
    state *= seq.global_phase;
  }
}

// Density-matrix helpers; rho <- (op on columns) via the statevector kernels.
template <typename ApplyFn>
void left_apply(Eigen::MatrixXcd& rho, ApplyFn&& fn) {
  for (Eigen::Index col = 0; col < rho.cols(); ++col) {
    Eigen::VectorXcd column = rho.col(col);
    fn(column);
    rho.col(col) = column;
  }
}

template <typename ApplyFn>
void conjugate_apply(Eigen::MatrixXcd& rho, ApplyFn&& fn) {
  left_apply(rho, fn);
  Eigen::MatrixXcd adj = rho.adjoint();
  left_apply(adj, fn);
  rho = adj.adjoint();
}

void apply_damping(Eigen::MatrixXcd& rho, int qubit_count, int qubit,
                   double gamma) {
  Eigen::Matrix2cd k0 = Eigen::Matrix2cd::Zero();
  Eigen::Matrix2cd k1 = Eigen::Matrix2cd::Zero();
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  k1(0, 1) = std::sqrt(gamma);
  Eigen::MatrixXcd term0 = rho;
  conjugate_apply(term0, [&](Eigen::VectorXcd& v) {
    apply_one_qubit(v, qubit_count, qubit, k0);
  });
  Eigen::MatrixXcd term1 = rho;
  conjugate_apply(term1, [&](Eigen::VectorXcd& v) {
    apply_one_qubit(v, qubit_count, qubit, k1);
  });
  rho = term0 + term1;
}

void apply_readout(Eigen::VectorXd& probs, int qubit_count, int qubit,
                   const Eigen::Matrix2d& confusion) {
  const std::uint64_t mask = bit_mask(qubit_count, qubit);
  const std::uint64_t dim = std::uint64_t{1} << qubit_count;
  for (std::uint64_t idx = 0; idx < dim; ++idx) {
    if (idx & mask) continue;
    const double p0 = probs(idx);
    const double p1 = probs(idx | mask);
    probs(idx) = confusion(0, 0) * p0 + confusion(0, 1) * p1;
    probs(idx | mask) = confusion(1, 0) * p0 + confusion(1, 1) * p1;
  }
}

Eigen::VectorXd density_distribution(const Circuit& c,
                                     const Eigen::Matrix2cd& rho0,
                                     const NoiseSpec& noise) {
  if (c.iterations > 3) {
    throw std::invalid_argument(
        "run_density: density-matrix backend supports at most 3 iterations");
  }
  noise.validate(c.qubit_count);
  const std::uint64_t dim = std::uint64_t{1} << c.qubit_count;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Ones(1, 1);
  for (int q = 0; q < c.qubit_count; ++q) {
    Eigen::MatrixXcd next(rho.rows() * 2, rho.cols() * 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        next.block(i * rho.rows(), j * rho.cols(), rho.rows(), rho.cols()) =
            rho0(i, j) * rho;
    rho = std::move(next);
  }

  const Unitary4 u = build_u_epsilon(Epsilon(c.epsilon));
  for (const auto& [qa, qb] : c.pairs) {
    conjugate_apply(rho, [&](Eigen::VectorXcd& v) {
      apply_two_qubit(v, c.qubit_count, qa, qb, u);
    });
  }
  if (!noise.damping.empty()) {
    for (int q = 0; q < c.qubit_count; ++q) {
      if (noise.damping[q] > 0.0) {
        apply_damping(rho, c.qubit_count, q, noise.damping[q]);
      }
    }
  }
  Eigen::VectorXd probs(dim);
  for (std::uint64_t idx = 0; idx < dim; ++idx) {
    probs(idx) = std::max(0.0, rho(idx, idx).real());
  }
  if (!noise.readout.empty()) {
    for (int q = 0; q < c.qubit_count; ++q) {
      apply_readout(probs, c.qubit_count, q, noise.readout[q]);
    }
  }
  return probs;
}

Eigen::Matrix2cd pure_density(const BlochState& s) {
  Eigen::Vector2cd v;
  v << std::cos(s.theta / 2.0), std::polar(std::sin(s.theta / 2.0), s.phi);
  return v * v.adjoint();
}

}  // namespace

Circuit build_protocol_circuit(const Epsilon& eps, int iterations) {
  if (iterations < 1 || iterations > 4) {
    throw std::invalid_argument(
        "build_protocol_circuit: iterations must lie in [1, 4]");
  }
  Circuit c;
  c.iterations = iterations;
  c.qubit_count = 1 << iterations;
  c.epsilon = eps.value();
  c.kept_qubit = 0;
  for (int step = 1; step <= iterations; ++step) {
    const int stride = 1 << step;
    for (int i = 0; i < c.qubit_count; i += stride) {
      c.pairs.emplace_back(i, i + stride / 2);
    }
  }
  for (int q = 1; q < c.qubit_count; ++q) c.discard_set.push_back(q);
  return c;
}

NoiseSpec NoiseSpec::uniform_damping(int qubit_count, double gamma) {
  NoiseSpec n;
  n.damping.assign(qubit_count, gamma);
  return n;
}

NoiseSpec NoiseSpec::uniform(int qubit_count, double gamma,
                             const Eigen::Matrix2d& confusion) {
  NoiseSpec n;
  n.damping.assign(qubit_count, gamma);
  n.readout.assign(qubit_count, confusion);
  return n;
}

void NoiseSpec::validate(int qubit_count) const {
  if (!damping.empty() && static_cast<int>(damping.size()) != qubit_count) {
    throw std::invalid_argument("NoiseSpec: one damping value per qubit");
  }
  for (double g : damping) {
    if (g < 0.0 || g > 1.0) {
      throw std::invalid_argument("NoiseSpec: damping must lie in [0, 1]");
    }
  }
  if (!readout.empty() && static_cast<int>(readout.size()) != qubit_count) {
    throw std::invalid_argument("NoiseSpec: one confusion matrix per qubit");
  }
  for (const auto& m : readout) {
    for (int col = 0; col < 2; ++col) {
      if (m(0, col) < -1e-12 || m(1, col) < -1e-12 ||
          std::abs(m.col(col).sum() - 1.0) > 1e-9) {
        throw std::invalid_argument(
            "NoiseSpec: confusion columns must be probability vectors");
      }
    }
  }
}

std::string bitstring_of_index(std::uint64_t index, int qubit_count) {
  std::string s(qubit_count, '0');
  for (int q = 0; q < qubit_count; ++q) {
    if (index & bit_mask(qubit_count, q)) s[q] = '1';
  }
  return s;
}

Eigen::VectorXcd simulate_statevector(const Circuit& c,
                                      const BlochState& input,
                                      bool use_gate_sequence) {
  const std::uint64_t dim = std::uint64_t{1} << c.qubit_count;
  Eigen::VectorXcd state = Eigen::VectorXcd::Zero(dim);
  state(0) = 1.0;
  const Eigen::Matrix2cd ry = prep_ry(input.theta);
  const Eigen::Matrix2cd ph = prep_phase(input.phi);
  for (int q = 0; q < c.qubit_count; ++q) {
    apply_one_qubit(state, c.qubit_count, q, ry);
    apply_one_qubit(state, c.qubit_count, q, ph);
  }
  apply_pair_gates(state, c, use_gate_sequence);
  return state;
}

Eigen::VectorXd probabilities(const Eigen::VectorXcd& state) {
  return state.cwiseAbs2();
}

CountsTable sample_counts(const Eigen::VectorXd& probs, std::uint64_t shots,
                          std::uint64_t seed) {
  if (shots < 1) {
    throw std::invalid_argument("sample_counts: shots must be >= 1");
  }
  const auto dim = static_cast<std::uint64_t>(probs.size());
  int qubit_count = 0;
  while ((std::uint64_t{1} << qubit_count) < dim) ++qubit_count;

  std::vector<double> cumulative(dim);
  double acc = 0.0;
  for (std::uint64_t i = 0; i < dim; ++i) {
    acc += std::max(0.0, probs(i));
    cumulative[i] = acc;
  }
  const double total = cumulative.back();

  std::mt19937_64 rng(seed);
  CountsTable table;
  table.shots = shots;
  table.seed = seed;
  std::vector<std::uint64_t> raw(dim, 0);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = canonical_unit(rng) * total;
    const auto it =
        std::upper_bound(cumulative.begin(), cumulative.end(), u);
    auto idx = static_cast<std::uint64_t>(
        std::distance(cumulative.begin(), it));
    if (idx >= dim) idx = dim - 1;
    ++raw[idx];
  }
  for (std::uint64_t i = 0; i < dim; ++i) {
    if (raw[i] > 0) table.counts[bitstring_of_index(i, qubit_count)] = raw[i];
  }
  return table;
}

CountsTable run_statevector(const Circuit& c, const BlochState& input,
                            std::uint64_t shots, std::uint64_t seed,
                            bool use_gate_sequence) {
  return sample_counts(
      probabilities(simulate_statevector(c, input, use_gate_sequence)), shots,
      seed);
}

Eigen::VectorXd run_density_exact(const Circuit& c, const BlochState& input,
                                  const NoiseSpec& noise) {
  return density_distribution(c, pure_density(input), noise);
}

Eigen::VectorXd run_density_exact(const Circuit& c,
                                  const Eigen::Matrix2cd& rho0,
                                  const NoiseSpec& noise) {
  if ((rho0 - rho0.adjoint()).cwiseAbs().maxCoeff() > 1e-10 ||
      std::abs(rho0.trace().real() - 1.0) > 1e-10 ||
      std::abs(rho0.trace().imag()) > 1e-10) {
    throw std::invalid_argument(
        "run_density: input density matrix must be Hermitian with trace 1");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(rho0);
  if (es.eigenvalues().minCoeff() < -1e-10) {
    throw std::invalid_argument(
        "run_density: input density matrix must be positive semidefinite");
  }
  return density_distribution(c, rho0, noise);
}

CountsTable run_density(const Circuit& c, const BlochState& input,
                        const NoiseSpec& noise, std::uint64_t shots,
                        std::uint64_t seed) {
  return sample_counts(run_density_exact(c, input, noise), shots, seed);
}

CountsTable run_density(const Circuit& c, const Eigen::Matrix2cd& rho0,
                        const NoiseSpec& noise, std::uint64_t shots,
                        std::uint64_t seed) {
  return sample_counts(run_density_exact(c, rho0, noise), shots, seed);
}

PostSelection post_select(const CountsTable& counts, const Circuit& c) {
  PostSelection result;
  std::uint64_t favorable = 0;
  for (const auto& [bits, n] : counts.counts) {
    if (static_cast<int>(bits.size()) != c.qubit_count) {
      throw std::invalid_argument(
          "post_select: counts are inconsistent with the circuit width");
    }
    bool success = true;
    for (int q : c.discard_set) {
      if (bits[q] != '0') {
        success = false;
        break;
      }
    }
    if (!success) continue;
    favorable += n;
    if (bits[c.kept_qubit] == '0') {
      result.kept_zero += n;
    } else {
      result.kept_one += n;
    }
  }
  result.p_success_estimate =
      counts.shots == 0 ? 0.0
                        : static_cast<double>(favorable) /
                              static_cast<double>(counts.shots);
  return result;
}

ExactPostSelection post_select_exact(const Eigen::VectorXd& probs,
                                     const Circuit& c) {
  std::uint64_t discard_mask = 0;
  for (int q : c.discard_set) discard_mask |= bit_mask(c.qubit_count, q);
  const std::uint64_t kept_mask = bit_mask(c.qubit_count, c.kept_qubit);
  ExactPostSelection out;
  for (std::uint64_t idx = 0;
       idx < static_cast<std::uint64_t>(probs.size()); ++idx) {
    if (idx & discard_mask) continue;
    if (idx & kept_mask) {
      out.p_kept_one += probs(idx);
    } else {
      out.p_kept_zero += probs(idx);
    }
  }
  out.p_success = out.p_kept_zero + out.p_kept_one;
  return out;
}

BlochState conditional_kept_state(const Eigen::VectorXcd& state,
                                  const Circuit& c) {
  const std::complex<double> amp0 = state(0);
  const std::complex<double> amp1 =
      state(bit_mask(c.qubit_count, c.kept_qubit));
  const double n0 = std::abs(amp0);
  const double n1 = std::abs(amp1);
  if (n0 == 0.0 && n1 == 0.0) {
    throw std::domain_error(
        "conditional_kept_state: zero post-selection amplitude");
  }
  const double theta = 2.0 * std::atan2(n1, n0);
  const double phi =
      (n0 == 0.0 || n1 == 0.0) ? 0.0 : std::arg(amp1) - std::arg(amp0);
  return BlochState(theta, phi);
}

double estimate_theta1(std::uint64_t kept_zero, std::uint64_t kept_one) {
  if (kept_zero == 0 && kept_one == 0) {
    throw std::domain_error("estimate_theta1: no successful shots");
  }
  return estimate_theta1(static_cast<double>(kept_zero),
                         static_cast<double>(kept_one));
}

double estimate_theta1(double p_kept_zero, double p_kept_one) {
  if (p_kept_zero <= 0.0 && p_kept_one <= 0.0) {
    throw std::domain_error("estimate_theta1: empty post-selected outcome");
  }
  if (p_kept_zero <= 0.0) return std::numbers::pi;
  if (p_kept_one <= 0.0) return 0.0;
  return 2.0 * std::atan(std::sqrt(p_kept_one / p_kept_zero));
}

}  // namespace statematch
