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
#include <string>
#include <vector>

#include "json.hpp"

namespace qmlc::cli {

struct DataSection {
  std::vector<std::string> germs;  // circuit text lines
  std::vector<int> powers;
  std::int64_t shots = 2000;

  friend bool operator==(const DataSection&, const DataSection&) = default;
};

struct LabelSection {
  std::string transform = "logit";
  double eps = 1e-6;
  int bands = 4;
  int hidden = 128;
  int depth = 5;
  double sigma = 0.02;
  int stage1_epochs = 200;
  int stage2_epochs = 200;
  int batch = 32;
  double lr = 1e-3;
  double heldout_fraction = 0.2;

  friend bool operator==(const LabelSection&, const LabelSection&) = default;
};

struct EncoderSection {
  int d_model = 128;
  int layers = 4;
  int heads = 4;
  int inducing = 32;
  int seeds = 4;
  int ff_hidden = 0;

  friend bool operator==(const EncoderSection&, const EncoderSection&) = default;
};

struct GcdSection {
  int hidden = 256;
  int depth = 3;
  int time_bands = 6;

  friend bool operator==(const GcdSection&, const GcdSection&) = default;
};

struct CtdSection {
  int layers = 2;
  int heads = 4;
  int hidden = 0;
  int time_bands = 6;

  friend bool operator==(const CtdSection&, const CtdSection&) = default;
};

struct ScheduleSection {
  double gamma_min = -10.0;
  double gamma_max = 10.0;

  friend bool operator==(const ScheduleSection&, const ScheduleSection&) = default;
};

struct TrainingSection {
  double lambda = 1.0;
  bool use_hvidl = true;
  double kappa = 0.05;
  double sigma_delta = 0.01;
  bool label_state_condition = false;
  int steps_per_stage = 300;
  int batch_sets = 2;
  double lr = 1e-3;
  double clip_norm = 10.0;
  int checkpoint_every = 0;  // 0 disables intermediate checkpoints

  friend bool operator==(const TrainingSection&, const TrainingSection&) = default;
};

struct DecoderSection {
  int epochs = 30;
  double noise = 0.1;
  double lr = 1e-3;

  friend bool operator==(const DecoderSection&, const DecoderSection&) = default;
};

struct CurriculumSection {
  int set_size = 8;
  int tau = 2;
  int max_usage = 4;
  int extra_sets = 0;
  int diversity_candidates = 1;
  std::vector<int> edges{4, 10, 20};

  friend bool operator==(const CurriculumSection&, const CurriculumSection&) = default;
};

struct SamplingSection {
  int gcd_steps = 250;
  int ctd_steps = 500;
  double clip = 1.0;  // <= 0 disables
  std::string mode = "argmax";
  std::string acceptance = "tvd";
  double threshold = 0.1;
  int max_attempts = 64;
  int max_length = 0;  // 0 means T

  friend bool operator==(const SamplingSection&, const SamplingSection&) = default;
};

struct RunConfig {
  int num_qubits = 2;
  int depth = 20;
  std::vector<std::string> vocab{"x90", "y90", "cx", "idle", "pad"};
  int d_gate = 0;  // 0 means K
  std::string noise = "deviceA";
  std::uint64_t seed = 0;
  DataSection data;
  LabelSection label;
  EncoderSection encoder;
  GcdSection gcd;
  CtdSection ctd;
  ScheduleSection schedule;
  TrainingSection training;
  DecoderSection decoder;
  CurriculumSection curriculum;
  SamplingSection sampling;

  int gate_width() const;
  int d_circuit() const { return num_qubits * depth * gate_width(); }

  /// Throws ValidationError naming the offending field.
  void validate() const;
  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
  /// Canonical serialization: sorted keys, no whitespace.
  std::string canonical() const;
  /// SHA-256 hex digest of canonical().
  std::string hash() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

RunConfig load_config(const std::string& path);
void save_config(const RunConfig& cfg, const std::string& path);

}  // namespace qmlc::cli
