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

#include "qmlc/circuit/token_grid.hpp"

#include <string>

#include "qmlc/common/errors.hpp"

namespace qmlc::circuit {

TokenGrid::TokenGrid(int num_qubits, int depth, int fill)
    : q_(num_qubits),
      t_(depth),
      cells_(static_cast<std::size_t>(num_qubits) * static_cast<std::size_t>(depth), fill) {
  if (num_qubits < 1 || depth < 0) throw DimensionError("invalid grid shape");
}

TokenGrid tokenize_circuit(const Circuit& circuit, const GateVocab& vocab, int depth) {
  if (circuit.length() > depth) {
    throw LengthError("circuit length " + std::to_string(circuit.length()) +
                      " exceeds grid depth " + std::to_string(depth));
  }
  const int q_count = circuit.num_qubits();
  TokenGrid grid(q_count, depth, vocab.pad_token());
  for (int t = 0; t < circuit.length(); ++t) {
    for (int q = 0; q < q_count; ++q) grid.set(q, t, vocab.idle_token());
    for (const auto& op : circuit.moments()[static_cast<std::size_t>(t)]) {
      auto token = vocab.token_of(op.kind);
      if (!token) {
        throw VocabError("gate '" + std::string(gate_name(op.kind)) + "' not in vocabulary");
      }
      if (op.arity() == 2) {
        if (op.target != op.qubit + 1) {
          throw VocabError("two-qubit gate must act on neighbours with the lower qubit as "
                           "control (got " + std::to_string(op.qubit) + ">" +
                           std::to_string(op.target) + ")");
        }
        grid.set(op.target, t, *token);
      }
      grid.set(op.qubit, t, *token);
    }
  }
  return grid;
}

Circuit detokenize(const TokenGrid& grid, const GateVocab& vocab) {
  const int q_count = grid.num_qubits();
  const int pad = vocab.pad_token();

  // Length is where padding starts; every row must pad from the same column.
  int length = grid.depth();
  for (int t = 0; t < grid.depth(); ++t) {
    if (grid.at(0, t) == pad) {
      length = t;
      break;
    }
  }
  for (int q = 0; q < q_count; ++q) {
    for (int t = 0; t < grid.depth(); ++t) {
      const int token = grid.at(q, t);
      if (!vocab.valid_token(token)) {
        throw VocabError("token " + std::to_string(token) + " outside vocabulary");
      }
      if ((t < length) == (token == pad)) {
        throw StructureError("padding is not a common suffix (row " + std::to_string(q) +
                             ", column " + std::to_string(t) + ")");
      }
    }
  }

  Circuit circuit(q_count);
  for (int t = 0; t < length; ++t) {
    Moment moment;
    for (int q = 0; q < q_count; ++q) {
      const auto& e = vocab.entry(grid.at(q, t));
      if (e.role == TokenRole::Idle) continue;
      if (e.arity == 1) {
        moment.push_back({e.kind, q});
        continue;
      }
      // Two-qubit tokens pair with the next row carrying the same token.
      if (q + 1 >= q_count || grid.at(q + 1, t) != e.token_id) {
        throw StructureError("unpaired two-qubit token at row " + std::to_string(q) +
                             ", column " + std::to_string(t));
      }
      moment.push_back({e.kind, q, q + 1});
      ++q;
    }
    circuit.add_moment(std::move(moment));
  }
  return circuit;
}

}  // namespace qmlc::circuit
