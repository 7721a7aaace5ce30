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

#include "qmlc/device/noise_model.hpp"

#include <cmath>
#include <string>

#include "qmlc/common/errors.hpp"

namespace qmlc::device {

namespace {

void check_rate(double v, const std::string& what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ValidationError(what + " = " + std::to_string(v) + " outside [0, 1]");
  }
}

const ComplexMatrix& pauli(int which) {
  static const std::array<ComplexMatrix, 4> paulis = [] {
    std::array<ComplexMatrix, 4> p;
    for (auto& m : p) m = ComplexMatrix::Zero(2, 2);
    p[0] << 1, 0, 0, 1;
    p[1] << 0, 1, 1, 0;
    p[2] << 0, Complex(0, -1), Complex(0, 1), 0;
    p[3] << 1, 0, 0, -1;
    return p;
  }();
  return paulis[static_cast<std::size_t>(which)];
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

ReadoutConfusion symmetric_readout(double flip) {
  return {{{1.0 - flip, flip}, {flip, 1.0 - flip}}};
}

double NoiseModel::pair_rate(int a, int b) const {
  const auto key = std::make_pair(std::min(a, b), std::max(a, b));
  auto it = pair_overrides.find(key);
  return it == pair_overrides.end() ? two_qubit_depolarizing : it->second;
}

bool NoiseModel::has_readout_error() const {
  for (const auto& c : readout) {
    if (c[0][0] != 1.0 || c[1][1] != 1.0) return true;
  }
  return false;
}

void NoiseModel::validate() const {
  for (std::size_t q = 0; q < qubits.size(); ++q) {
    const auto tag = "qubit " + std::to_string(q);
    check_rate(qubits[q].depolarizing, tag + " depolarizing");
    check_rate(qubits[q].amplitude_damping, tag + " amplitude_damping");
    check_rate(qubits[q].dephasing, tag + " dephasing");
  }
  check_rate(two_qubit_depolarizing, "two_qubit_depolarizing");
  for (const auto& [pair, rate] : pair_overrides) {
    check_rate(rate, "pair " + std::to_string(pair.first) + "-" + std::to_string(pair.second));
  }
  if (readout.size() != qubits.size()) {
    throw ValidationError("readout needs one confusion matrix per qubit");
  }
  for (std::size_t q = 0; q < readout.size(); ++q) {
    for (const auto& row : readout[q]) {
      check_rate(row[0], "readout entry");
      check_rate(row[1], "readout entry");
      if (std::abs(row[0] + row[1] - 1.0) > 1e-12) {
        throw ValidationError("readout row for qubit " + std::to_string(q) +
                              " does not sum to 1");
      }
    }
  }
}

NoiseModel NoiseModel::ideal(int num_qubits) { return uniform(num_qubits, {}, 0.0, 0.0, "ideal"); }

NoiseModel NoiseModel::uniform(int num_qubits, QubitNoise per_qubit, double two_qubit,
                               double readout_flip, std::string name) {
  NoiseModel nm;
  nm.name = std::move(name);
  nm.qubits.assign(static_cast<std::size_t>(num_qubits), per_qubit);
  nm.two_qubit_depolarizing = two_qubit;
  nm.readout.assign(static_cast<std::size_t>(num_qubits), symmetric_readout(readout_flip));
  return nm;
}

NoiseModel NoiseModel::preset(std::string_view name, int num_qubits) {
  if (name == "ideal") return ideal(num_qubits);
  if (name == "deviceA") {
    return uniform(num_qubits, {0.005, 0.002, 0.003}, 0.02, 0.01, "deviceA");
  }
  throw ValidationError("unknown noise preset '" + std::string(name) + "'");
}

KrausSet depolarizing_kraus(double p) {
  check_rate(p, "depolarizing");
  KrausSet k;
  k.push_back(std::sqrt(1.0 - 0.75 * p) * pauli(0));
  for (int i = 1; i < 4; ++i) k.push_back(std::sqrt(p / 4.0) * pauli(i));
  return k;
}

KrausSet amplitude_damping_kraus(double gamma) {
  check_rate(gamma, "amplitude_damping");
  ComplexMatrix k0 = ComplexMatrix::Zero(2, 2);
  ComplexMatrix k1 = ComplexMatrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  k1(0, 1) = std::sqrt(gamma);
  return {k0, k1};
}

KrausSet dephasing_kraus(double p) {
  check_rate(p, "dephasing");
  return {std::sqrt(1.0 - p) * pauli(0), std::sqrt(p) * pauli(3)};
}

KrausSet two_qubit_depolarizing_kraus(double p) {
  check_rate(p, "two_qubit_depolarizing");
  KrausSet k;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const double w = (a == 0 && b == 0) ? 1.0 - 15.0 * p / 16.0 : p / 16.0;
      k.push_back(std::sqrt(w) * kron(pauli(a), pauli(b)));
    }
  }
  return k;
}

double kraus_completeness_error(const KrausSet& kraus) {
  if (kraus.empty()) return 1.0;
  const auto d = kraus.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (const auto& k : kraus) sum += k.adjoint() * k;
  return (sum - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
}

}  // namespace qmlc::device
