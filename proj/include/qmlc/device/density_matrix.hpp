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

#pragma once

#include <functional>
#include <span>

#include "qmlc/circuit/circuit.hpp"
#include "qmlc/common/linalg.hpp"
#include "qmlc/device/noise_model.hpp"

namespace qmlc::device {

/// Basis index convention: qubit 0 is the most significant bit, so index
/// i = sum_q b_q 2^(Q-1-q).
inline int qubit_bit(int index, int qubit, int num_qubits) {
  return (index >> (num_qubits - 1 - qubit)) & 1;
}

/// Gate matrix in the computational basis; CX is 4x4 with the control as the
/// first (more significant) qubit.
ComplexMatrix gate_unitary(circuit::GateKind kind);

class DensityMatrix {
 public:
  static DensityMatrix zero_state(int num_qubits);

  int num_qubits() const { return num_qubits_; }
  const ComplexMatrix& matrix() const { return rho_; }

  void apply_unitary(const ComplexMatrix& u, std::span<const int> qubits);
  void apply_channel(const KrausSet& kraus, std::span<const int> qubits);

  RealVector probabilities() const;
  double trace() const;
  double hermiticity_error() const;
  double min_eigenvalue() const;

 private:
  DensityMatrix(int num_qubits, ComplexMatrix rho) : num_qubits_(num_qubits), rho_(std::move(rho)) {}

  int num_qubits_;
  ComplexMatrix rho_;
};

/// Lifts an operator on `qubits` (first listed = most significant) to the
/// full 2^Q space.
ComplexMatrix embed_operator(const ComplexMatrix& op, std::span<const int> qubits, int num_qubits);

struct SimulatorOptions {
  int max_qubits = 3;
};

using MomentObserver = std::function<void(int moment, const DensityMatrix& state)>;

/// Applies one moment: gate unitaries, then depolarizing, amplitude damping
/// and dephasing on touched qubits (dephasing only on idle qubits), then
/// two-qubit depolarizing on each two-qubit gate's pair.
void apply_noisy_moment(DensityMatrix& state, const circuit::Moment& moment,
                        const NoiseModel& noise);

/// Readout confusion applied to a computational-basis distribution.
RealVector apply_readout(const RealVector& p, const NoiseModel& noise);

/// Outcome distribution of `circuit` on |0...0> under `noise`, measured in
/// the computational basis. Throws ScaleError above options.max_qubits.
RealVector apply_circuit(const circuit::Circuit& circuit, const NoiseModel& noise,
                         const SimulatorOptions& options = {},
                         const MomentObserver& observer = {});

}  // namespace qmlc::device
