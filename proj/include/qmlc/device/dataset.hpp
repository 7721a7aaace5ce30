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
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "qmlc/circuit/circuit.hpp"
#include "qmlc/common/linalg.hpp"
#include "qmlc/device/noise_model.hpp"

namespace qmlc::device {

inline constexpr const char* kDatasetFormat = "qmlc-gst/1";

/// One (C, rho0, M, p) observation plus its shot counts.
struct GstRecord {
  circuit::Circuit circuit{1};
  std::string rho0 = "zero";
  std::string measurement = "z";
  RealVector p;
  std::vector<std::int64_t> counts;
  std::int64_t shots = 0;
  int length = 0;
  std::string noise_preset;
  std::uint64_t seed = 0;

  int num_qubits() const { return circuit.num_qubits(); }
};

struct DatasetConfig {
  int num_qubits = 1;
  std::vector<circuit::Circuit> germs;
  std::vector<int> powers;
  int max_depth = 20;
  std::int64_t shots = 1000;
  NoiseModel noise;
  std::uint64_t seed = 0;

  void validate() const;
};

struct DatasetWarning {
  std::size_t germ_index;
  int power;
  std::string message;
};

struct GstDataset {
  std::vector<GstRecord> records;
  std::vector<DatasetWarning> warnings;
};

/// Emits germ^power for every (germ, power) pair in order, skipping (with a
/// warning) repetitions longer than max_depth. Each record's sampling seed is
/// split from cfg.seed by its (germ, power) slot.
GstDataset generate_germ_dataset(const DatasetConfig& cfg);

/// Header line `qmlc-gst/1`, then one JSON object per record.
void write_dataset(std::ostream& out, const std::vector<GstRecord>& records);
std::vector<GstRecord> read_dataset(std::istream& in);

}  // namespace qmlc::device
