// Copyright 2026 The QMLC Authors
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

#include "qmlc/device/density_matrix.hpp"

#include <cmath>
#include <string>

#include "qmlc/common/errors.hpp"

namespace qmlc::device {

using circuit::GateKind;

ComplexMatrix gate_unitary(GateKind kind) {
  const double r = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  ComplexMatrix u = ComplexMatrix::Zero(2, 2);
  switch (kind) {
    case GateKind::Id:
      u << 1, 0, 0, 1;
      break;
    case GateKind::X:
      u << 0, 1, 1, 0;
      break;
    case GateKind::Y:
      u << 0, -i, i, 0;
      break;
    case GateKind::Z:
      u << 1, 0, 0, -1;
      break;
    case GateKind::H:
      u << r, r, r, -r;
      break;
    case GateKind::S:
      u << 1, 0, 0, i;
      break;
    case GateKind::X90:  // exp(-i pi/4 X)
      u << r, -i * r, -i * r, r;
      break;
    case GateKind::Y90:  // exp(-i pi/4 Y)
      u << r, -r, r, r;
      break;
    case GateKind::CX:
      u = ComplexMatrix::Zero(4, 4);
      u(0, 0) = u(1, 1) = u(2, 3) = u(3, 2) = 1.0;
      break;
    default:
      throw GateError("no unitary for '" + std::string(circuit::gate_name(kind)) + "'");
  }
  return u;
}

DensityMatrix DensityMatrix::zero_state(int num_qubits) {
  const Eigen::Index dim = Eigen::Index{1} << num_qubits;
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  rho(0, 0) = 1.0;
  return {num_qubits, std::move(rho)};
}

ComplexMatrix embed_operator(const ComplexMatrix& op, std::span<const int> qubits,
                             int num_qubits) {
  const int dim = 1 << num_qubits;
  const int k = static_cast<int>(qubits.size());
  int mask = 0;
  for (int q : qubits) mask |= 1 << (num_qubits - 1 - q);
  auto sub_index = [&](int index) {
    int s = 0;
    for (int j = 0; j < k; ++j) s = (s << 1) | qubit_bit(index, qubits[static_cast<std::size_t>(j)], num_qubits);
    return s;
  };
  ComplexMatrix full = ComplexMatrix::Zero(dim, dim);
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      if ((a & ~mask) != (b & ~mask)) continue;
      full(a, b) = op(sub_index(a), sub_index(b));
    }
  }
  return full;
}

void DensityMatrix::apply_unitary(const ComplexMatrix& u, std::span<const int> qubits) {
  const ComplexMatrix full = embed_operator(u, qubits, num_qubits_);
  rho_ = full * rho_ * full.adjoint();
}

void DensityMatrix::apply_channel(const KrausSet& kraus, std::span<const int> qubits) {
  ComplexMatrix out = ComplexMatrix::Zero(rho_.rows(), rho_.cols());
  for (const auto& k : kraus) {
    const ComplexMatrix full = embed_operator(k, qubits, num_qubits_);
    out += full * rho_ * full.adjoint();
  }
  rho_ = std::move(out);
}

RealVector DensityMatrix::probabilities() const { return rho_.diagonal().real(); }

double DensityMatrix::trace() const { return rho_.trace().real(); }

double DensityMatrix::hermiticity_error() const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (rho_ + rho_.adjoint()));
  return solver.eigenvalues().minCoeff();
}

void apply_noisy_moment(DensityMatrix& state, const circuit::Moment& moment,
                        const NoiseModel& noise) {
  const int n = state.num_qubits();
  std::vector<bool> touched(static_cast<std::size_t>(n), false);
  for (const auto& op : moment) {
    if (op.arity() == 2) {
      const std::array<int, 2> qs{op.qubit, op.target};
      state.apply_unitary(gate_unitary(op.kind), qs);
      touched[static_cast<std::size_t>(op.target)] = true;
    } else {
      const std::array<int, 1> qs{op.qubit};
      state.apply_unitary(gate_unitary(op.kind), qs);
    }
    touched[static_cast<std::size_t>(op.qubit)] = true;
  }
  for (int q = 0; q < n; ++q) {
    const auto& qn = noise.qubits[static_cast<std::size_t>(q)];
    const std::array<int, 1> qs{q};
    if (touched[static_cast<std::size_t>(q)]) {
      if (qn.depolarizing > 0.0) state.apply_channel(depolarizing_kraus(qn.depolarizing), qs);
      if (qn.amplitude_damping > 0.0) {
        state.apply_channel(amplitude_damping_kraus(qn.amplitude_damping), qs);
      }
    }
    if (qn.dephasing > 0.0) state.apply_channel(dephasing_kraus(qn.dephasing), qs);
  }
  for (const auto& op : moment) {
    if (op.arity() != 2) continue;
    const double rate = noise.pair_rate(op.qubit, op.target);
    if (rate <= 0.0) continue;
    const std::array<int, 2> qs{op.qubit, op.target};
    state.apply_channel(two_qubit_depolarizing_kraus(rate), qs);
  }
}

RealVector apply_readout(const RealVector& p, const NoiseModel& noise) {
  const int n = noise.num_qubits();
  const Eigen::Index dim = p.size();
  RealVector out = RealVector::Zero(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (p(i) == 0.0) continue;
    for (Eigen::Index j = 0; j < dim; ++j) {
      double w = p(i);
      for (int q = 0; q < n; ++q) {
        w *= noise.readout[static_cast<std::size_t>(q)]
                          [static_cast<std::size_t>(qubit_bit(static_cast<int>(i), q, n))]
                          [static_cast<std::size_t>(qubit_bit(static_cast<int>(j), q, n))];
      }
      out(j) += w;
    }
  }
  return out;
}

RealVector apply_circuit(const circuit::Circuit& circuit, const NoiseModel& noise,
                         const SimulatorOptions& options, const MomentObserver& observer) {
  const int n = circuit.num_qubits();
  if (n > options.max_qubits) {
    throw ScaleError(std::to_string(n) + " qubits exceeds the density-matrix limit of " +
                     std::to_string(options.max_qubits));
  }
  if (noise.num_qubits() != n) {
    throw DimensionError("noise model covers " + std::to_string(noise.num_qubits()) +
                         " qubits, circuit has " + std::to_string(n));
  }
  auto state = DensityMatrix::zero_state(n);
  for (int m = 0; m < circuit.length(); ++m) {
    apply_noisy_moment(state, circuit.moments()[static_cast<std::size_t>(m)], noise);
    if (observer) observer(m, state);
  }
  RealVector p = state.probabilities();
  for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = std::max(p(i), 0.0);
  p /= p.sum();
  return noise.has_readout_error() ? apply_readout(p, noise) : p;
}

}  // namespace qmlc::device
