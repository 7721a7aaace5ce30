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

#include <algorithm>
#include <span>
#include <vector>

#include "qmlc/circuit/gate_vocab.hpp"
#include "qmlc/common/rng.hpp"

namespace qmlc::circuit {

/// One gate placement. Single-qubit gates leave `target` at -1; for CX,
/// `qubit` is the control.
struct GateOp {
  GateKind kind;
  int qubit;
  int target = -1;

  int arity() const { return target < 0 ? 1 : 2; }
  int min_qubit() const { return target < 0 ? qubit : std::min(qubit, target); }
  bool touches(int q) const { return qubit == q || target == q; }
  friend bool operator==(const GateOp&, const GateOp&) = default;
};

/// A moment; qubits not touched by any op are idle for that moment. Ops are
/// kept sorted by their lowest qubit.
using Moment = std::vector<GateOp>;

class Circuit {
 public:
  explicit Circuit(int num_qubits);
  Circuit(int num_qubits, std::vector<Moment> moments);

  int num_qubits() const { return num_qubits_; }
  int length() const { return static_cast<int>(moments_.size()); }
  const std::vector<Moment>& moments() const { return moments_; }
  bool empty() const { return moments_.empty(); }

  /// Appends a moment verbatim (an empty moment is an idle step).
  void add_moment(Moment moment);

  /// Places `op` in the earliest moment after the last one that uses any of
  /// its qubits, opening a new moment if needed.
  void append(const GateOp& op);

  /// The circuit concatenated with itself `times` times.
  Circuit repeated(int times) const;

  /// Sorted distinct gate kinds used.
  std::vector<GateKind> gate_kinds() const;

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  Moment validated(Moment moment) const;

  int num_qubits_;
  std::vector<Moment> moments_;
};

/// Random circuit with `depth` moments drawn from `gates`. Each qubit is left
/// idle with probability `idle_prob`; two-qubit gates act on neighbours with
/// the lower qubit as control unless `random_orientation` is set.
Circuit random_circuit(int num_qubits, int depth, std::span<const GateKind> gates,
                       Rng& rng, double idle_prob = 0.0,
                       bool random_orientation = false);

}  // namespace qmlc::circuit
