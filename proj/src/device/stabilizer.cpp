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

#include "qmlc/device/stabilizer.hpp"

#include <string>

#include "qmlc/common/errors.hpp"
#include "qmlc/device/density_matrix.hpp"

namespace qmlc::device {

using circuit::GateKind;

StabilizerTableau::StabilizerTableau(int num_qubits)
    : n_(num_qubits),
      x_(static_cast<std::size_t>((2 * num_qubits + 1) * num_qubits), 0),
      z_(static_cast<std::size_t>((2 * num_qubits + 1) * num_qubits), 0),
      r_(static_cast<std::size_t>(2 * num_qubits + 1), 0) {
  for (int i = 0; i < n_; ++i) {
    x(i, i) = 1;
    z(i + n_, i) = 1;
  }
}

void StabilizerTableau::h(int q) {
  for (int i = 0; i < 2 * n_; ++i) {
    r_[static_cast<std::size_t>(i)] ^= xv(i, q) & zv(i, q);
    std::swap(x(i, q), z(i, q));
  }
}

void StabilizerTableau::s(int q) {
  for (int i = 0; i < 2 * n_; ++i) {
    r_[static_cast<std::size_t>(i)] ^= xv(i, q) & zv(i, q);
    z(i, q) ^= xv(i, q);
  }
}

void StabilizerTableau::cx(int c, int t) {
  for (int i = 0; i < 2 * n_; ++i) {
    r_[static_cast<std::size_t>(i)] ^= xv(i, c) & zv(i, t) & (xv(i, t) ^ zv(i, c) ^ 1);
    x(i, t) ^= xv(i, c);
    z(i, c) ^= zv(i, t);
  }
}

void StabilizerTableau::pauli_x(int q) {
  for (int i = 0; i < 2 * n_; ++i) r_[static_cast<std::size_t>(i)] ^= zv(i, q);
}

void StabilizerTableau::pauli_z(int q) {
  for (int i = 0; i < 2 * n_; ++i) r_[static_cast<std::size_t>(i)] ^= xv(i, q);
}

void StabilizerTableau::pauli_y(int q) {
  for (int i = 0; i < 2 * n_; ++i) r_[static_cast<std::size_t>(i)] ^= xv(i, q) ^ zv(i, q);
}

void StabilizerTableau::apply(const circuit::GateOp& op) {
  const int q = op.qubit;
  switch (op.kind) {
    case GateKind::Id:
      break;
    case GateKind::X:
      pauli_x(q);
      break;
    case GateKind::Y:
      pauli_y(q);
      break;
    case GateKind::Z:
      pauli_z(q);
      break;
    case GateKind::H:
      h(q);
      break;
    case GateKind::S:
      s(q);
      break;
    case GateKind::X90:  // H S H
      h(q);
      s(q);
      h(q);
      break;
    case GateKind::Y90:  // S H S H S^dagger, S^dagger applied first
      s(q);
      s(q);
      s(q);
      h(q);
      s(q);
      h(q);
      s(q);
      break;
    case GateKind::CX:
      cx(op.qubit, op.target);
      break;
    default:
      throw GateError("'" + std::string(circuit::gate_name(op.kind)) + "' is not a Clifford gate");
  }
}

void StabilizerTableau::rowsum(int h, int i) {
  auto g = [](int x1, int z1, int x2, int z2) {
    if (x1 == 0 && z1 == 0) return 0;
    if (x1 == 1 && z1 == 1) return z2 - x2;
    if (x1 == 1) return z2 * (2 * x2 - 1);
    return x2 * (1 - 2 * z2);
  };
  int sum = 2 * r_[static_cast<std::size_t>(h)] + 2 * r_[static_cast<std::size_t>(i)];
  for (int j = 0; j < n_; ++j) {
    sum += g(xv(i, j), zv(i, j), xv(h, j), zv(h, j));
    x(h, j) ^= xv(i, j);
    z(h, j) ^= zv(i, j);
  }
  sum = ((sum % 4) + 4) % 4;
  r_[static_cast<std::size_t>(h)] = sum == 0 ? 0 : 1;
}

std::optional<int> StabilizerTableau::deterministic_outcome(int q) const {
  for (int p = n_; p < 2 * n_; ++p) {
    if (xv(p, q)) return std::nullopt;
  }
  StabilizerTableau copy = *this;
  const int scratch = 2 * n_;
  for (int j = 0; j < n_; ++j) {
    copy.x(scratch, j) = 0;
    copy.z(scratch, j) = 0;
  }
  copy.r_[static_cast<std::size_t>(scratch)] = 0;
  for (int i = 0; i < n_; ++i) {
    if (xv(i, q)) copy.rowsum(scratch, i + n_);
  }
  return copy.r_[static_cast<std::size_t>(scratch)];
}

int StabilizerTableau::measure(int q, int outcome) {
  int p = -1;
  for (int i = n_; i < 2 * n_; ++i) {
    if (xv(i, q)) {
      p = i;
      break;
    }
  }
  if (p < 0) return *deterministic_outcome(q);
  for (int i = 0; i < 2 * n_; ++i) {
    if (i != p && xv(i, q)) rowsum(i, p);
  }
  for (int j = 0; j < n_; ++j) {
    x(p - n_, j) = xv(p, j);
    z(p - n_, j) = zv(p, j);
    x(p, j) = 0;
    z(p, j) = 0;
  }
  r_[static_cast<std::size_t>(p - n_)] = r_[static_cast<std::size_t>(p)];
  z(p, q) = 1;
  r_[static_cast<std::size_t>(p)] = static_cast<std::uint8_t>(outcome & 1);
  return outcome & 1;
}

namespace {

void enumerate_outcomes(StabilizerTableau& tab, int qubit, int index, double weight,
                        RealVector& out) {
  const int n = tab.num_qubits();
  if (qubit == n) {
    out(index) += weight;
    return;
  }
  if (auto det = tab.deterministic_outcome(qubit)) {
    tab.measure(qubit, *det);
    enumerate_outcomes(tab, qubit + 1, (index << 1) | *det, weight, out);
    return;
  }
  for (int outcome = 0; outcome < 2; ++outcome) {
    StabilizerTableau branch = tab;
    branch.measure(qubit, outcome);
    enumerate_outcomes(branch, qubit + 1, (index << 1) | outcome, 0.5 * weight, out);
  }
}

}  // namespace

RealVector ideal_clifford_distribution(const circuit::Circuit& circuit) {
  StabilizerTableau tab(circuit.num_qubits());
  for (const auto& moment : circuit.moments()) {
    for (const auto& op : moment) tab.apply(op);
  }
  RealVector out = RealVector::Zero(Eigen::Index{1} << circuit.num_qubits());
  enumerate_outcomes(tab, 0, 0, 1.0, out);
  return out;
}

}  // namespace qmlc::device
