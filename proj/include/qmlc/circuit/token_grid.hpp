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

#include <vector>

#include "qmlc/circuit/circuit.hpp"
#include "qmlc/circuit/gate_vocab.hpp"

namespace qmlc::circuit {

/// Q x T integer token matrix, row = qubit, column = time step.
class TokenGrid {
 public:
  TokenGrid(int num_qubits, int depth, int fill);

  int num_qubits() const { return q_; }
  int depth() const { return t_; }
  int at(int q, int t) const { return cells_[index(q, t)]; }
  void set(int q, int t, int token) { cells_[index(q, t)] = token; }
  const std::vector<int>& cells() const { return cells_; }

  friend bool operator==(const TokenGrid&, const TokenGrid&) = default;

 private:
  std::size_t index(int q, int t) const {
    return static_cast<std::size_t>(q) * static_cast<std::size_t>(t_) +
           static_cast<std::size_t>(t);
  }

  int q_;
  int t_;
  std::vector<int> cells_;
};

/// Moments map to columns left to right; trailing columns are padding and
/// qubits untouched in an occupied column get the idle token. A CX token is
/// written on both of its rows; the lower row is the control.
TokenGrid tokenize_circuit(const Circuit& circuit, const GateVocab& vocab, int depth);

/// Inverse of tokenize_circuit. Throws StructureError for grids no circuit
/// maps to: unpaired or non-adjacent CX tokens, or padding that is not a
/// common suffix of every row.
Circuit detokenize(const TokenGrid& grid, const GateVocab& vocab);

}  // namespace qmlc::circuit
