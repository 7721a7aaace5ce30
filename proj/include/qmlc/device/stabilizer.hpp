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

#include <cstdint>
#include <optional>
#include <vector>

#include "qmlc/circuit/circuit.hpp"
#include "qmlc/common/linalg.hpp"

namespace qmlc::device {

/// Aaronson-Gottesman stabilizer tableau: rows [0, n) destabilizers,
/// [n, 2n) stabilizers, row 2n scratch.
class StabilizerTableau {
 public:
  explicit StabilizerTableau(int num_qubits);

  int num_qubits() const { return n_; }

  void h(int q);
  void s(int q);
  void cx(int control, int target);
  void pauli_x(int q);
  void pauli_y(int q);
  void pauli_z(int q);

  /// Applies a circuit gate; throws GateError for anything non-Clifford.
  void apply(const circuit::GateOp& op);

  /// Outcome of a Z measurement on `q` if it is deterministic.
  std::optional<int> deterministic_outcome(int q) const;
  /// Z measurement on `q`; `outcome` picks the branch when it is random.
  int measure(int q, int outcome);

 private:
  void rowsum(int h, int i);
  std::uint8_t& x(int row, int q) { return x_[static_cast<std::size_t>(row * n_ + q)]; }
  std::uint8_t& z(int row, int q) { return z_[static_cast<std::size_t>(row * n_ + q)]; }
  std::uint8_t xv(int row, int q) const { return x_[static_cast<std::size_t>(row * n_ + q)]; }
  std::uint8_t zv(int row, int q) const { return z_[static_cast<std::size_t>(row * n_ + q)]; }

  int n_;
  std::vector<std::uint8_t> x_;
  std::vector<std::uint8_t> z_;
  std::vector<std::uint8_t> r_;
};

/// Exact computational-basis distribution of a Clifford circuit on |0...0>,
/// by enumerating measurement branches. Entries are dyadic, so the doubles
/// are exact.
RealVector ideal_clifford_distribution(const circuit::Circuit& circuit);

}  // namespace qmlc::device
