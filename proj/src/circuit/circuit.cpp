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

#include "qmlc/circuit/circuit.hpp"

#include <string>

#include "qmlc/common/errors.hpp"

namespace qmlc::circuit {

Circuit::Circuit(int num_qubits) : num_qubits_(num_qubits) {
  if (num_qubits < 1) throw DimensionError("circuit needs at least one qubit");
}

Circuit::Circuit(int num_qubits, std::vector<Moment> moments) : Circuit(num_qubits) {
  for (auto& m : moments) add_moment(std::move(m));
}

Moment Circuit::validated(Moment moment) const {
  std::vector<bool> used(static_cast<std::size_t>(num_qubits_), false);
  auto claim = [&](int q) {
    if (q < 0 || q >= num_qubits_) {
      throw StructureError("qubit " + std::to_string(q) + " out of range for " +
                           std::to_string(num_qubits_) + "-qubit circuit");
    }
    if (used[static_cast<std::size_t>(q)]) {
      throw StructureError("qubit " + std::to_string(q) + " used twice in one moment");
    }
    used[static_cast<std::size_t>(q)] = true;
  };
  for (const auto& op : moment) {
    const auto& info = gate_info(op.kind);
    if (info.role != TokenRole::Gate) {
      throw StructureError("'" + std::string(info.name) + "' is a grid symbol, not a gate");
    }
    if (info.arity != op.arity()) {
      throw StructureError("gate '" + std::string(info.name) + "' has arity " +
                           std::to_string(info.arity));
    }
    claim(op.qubit);
    if (op.target >= 0) claim(op.target);
  }
  std::sort(moment.begin(), moment.end(),
            [](const GateOp& a, const GateOp& b) { return a.min_qubit() < b.min_qubit(); });
  return moment;
}

void Circuit::add_moment(Moment moment) { moments_.push_back(validated(std::move(moment))); }

void Circuit::append(const GateOp& op) {
  // Earliest slot strictly after the last moment touching any of op's qubits.
  int slot = 0;
  for (int i = length() - 1; i >= 0; --i) {
    bool busy = false;
    for (const auto& other : moments_[static_cast<std::size_t>(i)]) {
      if (other.touches(op.qubit) || (op.target >= 0 && other.touches(op.target))) busy = true;
    }
    if (busy) {
      slot = i + 1;
      break;
    }
  }
  if (slot == length()) {
    add_moment({op});
    return;
  }
  Moment m = moments_[static_cast<std::size_t>(slot)];
  m.push_back(op);
  moments_[static_cast<std::size_t>(slot)] = validated(std::move(m));
}

Circuit Circuit::repeated(int times) const {
  Circuit out(num_qubits_);
  for (int r = 0; r < times; ++r) {
    for (const auto& m : moments_) out.moments_.push_back(m);
  }
  return out;
}

std::vector<GateKind> Circuit::gate_kinds() const {
  std::vector<GateKind> kinds;
  for (const auto& m : moments_) {
    for (const auto& op : m) {
      if (std::find(kinds.begin(), kinds.end(), op.kind) == kinds.end()) kinds.push_back(op.kind);
    }
  }
  std::sort(kinds.begin(), kinds.end());
  return kinds;
}

Circuit random_circuit(int num_qubits, int depth, std::span<const GateKind> gates, Rng& rng,
                       double idle_prob, bool random_orientation) {
  if (gates.empty()) throw VocabError("random_circuit needs a non-empty gate set");
  std::uniform_int_distribution<std::size_t> pick(0, gates.size() - 1);
  std::bernoulli_distribution idle(idle_prob);
  std::bernoulli_distribution flip(0.5);
  Circuit c(num_qubits);
  for (int d = 0; d < depth; ++d) {
    Moment m;
    for (int q = 0; q < num_qubits; ++q) {
      if (idle_prob > 0.0 && idle(rng)) continue;
      GateKind kind = gates[pick(rng)];
      if (gate_info(kind).arity == 2) {
        if (q + 1 >= num_qubits) {
          // No neighbour left: fall back to a single-qubit gate when possible.
          std::vector<GateKind> singles;
          for (auto g : gates) {
            if (gate_info(g).arity == 1) singles.push_back(g);
          }
          if (singles.empty()) continue;
          std::uniform_int_distribution<std::size_t> ps(0, singles.size() - 1);
          m.push_back({singles[ps(rng)], q});
          continue;
        }
        const bool reverse = random_orientation && flip(rng);
        m.push_back(reverse ? GateOp{kind, q + 1, q} : GateOp{kind, q, q + 1});
        ++q;
        continue;
      }
      m.push_back({kind, q});
    }
    c.add_moment(std::move(m));
  }
  return c;
}

}  // namespace qmlc::circuit
