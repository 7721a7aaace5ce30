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

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qmlc/common/linalg.hpp"

namespace qmlc::device {

struct QubitNoise {
  double depolarizing = 0.0;       // rho -> (1 - p) rho + p I/2
  double amplitude_damping = 0.0;  // |1> -> |0> with probability gamma
  double dephasing = 0.0;          // rho -> (1 - p) rho + p Z rho Z
};

/// Row-stochastic 2x2 matrix; entry [prepared][reported].
using ReadoutConfusion = std::array<std::array<double, 2>, 2>;

ReadoutConfusion symmetric_readout(double flip);

struct NoiseModel {
  std::string name = "custom";
  std::vector<QubitNoise> qubits;
  double two_qubit_depolarizing = 0.0;  // default for every pair
  std::map<std::pair<int, int>, double> pair_overrides;
  std::vector<ReadoutConfusion> readout;

  int num_qubits() const { return static_cast<int>(qubits.size()); }
  double pair_rate(int a, int b) const;
  bool has_readout_error() const;

  /// Throws ValidationError for rates outside [0, 1] or confusion rows that
  /// do not sum to one within 1e-12.
  void validate() const;

  static NoiseModel ideal(int num_qubits);
  static NoiseModel uniform(int num_qubits, QubitNoise per_qubit, double two_qubit,
                            double readout_flip, std::string name = "custom");
  /// "ideal" or "deviceA".
  static NoiseModel preset(std::string_view name, int num_qubits);
};

using KrausSet = std::vector<ComplexMatrix>;

KrausSet depolarizing_kraus(double p);
KrausSet amplitude_damping_kraus(double gamma);
KrausSet dephasing_kraus(double p);
/// rho -> (1 - p) rho + p I/4 on a qubit pair.
KrausSet two_qubit_depolarizing_kraus(double p);

/// max |sum_i K_i^dagger K_i - I|.
double kraus_completeness_error(const KrausSet& kraus);

}  // namespace qmlc::device
