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
#include <span>
#include <ostream>
#include <string>
#include <vector>

#include "qmlc/circuit/embedding.hpp"
#include "qmlc/circuit/gate_vocab.hpp"
#include "qmlc/cli/run_config.hpp"
#include "qmlc/curriculum/grouping.hpp"
#include "qmlc/device/dataset.hpp"
#include "qmlc/diffusion/networks.hpp"
#include "qmlc/diffusion/objectives.hpp"
#include "qmlc/encoder/set_encoder.hpp"
#include "qmlc/label/label_nets.hpp"
#include "qmlc/synth/synthesis.hpp"

namespace qmlc::cli {

/// Fixed sub-stream ids under the master seed.
enum class SeedStream : std::uint64_t {
  Embedding = 1, Labels, Encoder, Gcd, Ctd, Data, Grouping, Training, Decoder, Sampling, LabelTraining
};

std::uint64_t stream_seed(const RunConfig& cfg, SeedStream s);

device::DatasetConfig dataset_config(const RunConfig& cfg);
curriculum::GroupingConfig grouping_config(const RunConfig& cfg);

struct ModelBundle {
  explicit ModelBundle(const RunConfig& cfg);

  RunConfig cfg;
  circuit::GateVocab vocab;
  circuit::GateEmbedding embedding;
  label::LabelPipeline labels;
  encoder::SetEncoder encoder;
  diffusion::GcdNet gcd;
  diffusion::CtdNet ctd;
  synth::TokenDecoder decoder;

  diffusion::NoiseSchedule schedule() const;
  device::NoiseModel noise() const;
  circuit::GridEmbedding pad_grid() const;
  circuit::GridEmbedding embed(const circuit::Circuit& c) const;

  nn::StateDict state();
  void load(const nn::StateDict& state);
  /// Encoder, GCD and CTD parameters: the jointly trained set.
  std::vector<nn::Var> joint_parameters();
  synth::SynthesisModels synthesis_models() const;
};

struct CheckpointMeta {
  std::string config_hash;
  nlohmann::json config;
  long long step = 0;
  bool labels_trained = false;
  bool decoder_trained = false;
};

struct Checkpoint {
  CheckpointMeta meta;
  nn::StateDict tensors;
};

inline constexpr char kCheckpointMagic[8] = {'Q', 'M', 'L', 'C', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::string& path);
/// Throws ValidationError when the stored hash differs from cfg.hash() and
/// `force` is not set.
void check_checkpoint_hash(const Checkpoint& ckpt, const RunConfig& cfg, bool force);

struct TrainOptions {
  std::string checkpoint_out;  // empty: no checkpoint file
  std::string loss_csv;        // empty: no loss file
  std::string stage_log;       // empty: no stage log file
  std::optional<Checkpoint> resume;
  long long max_steps = -1;    // stop early once this many total steps are done
  std::ostream* log = nullptr;
};

struct TrainSummary {
  long long steps = 0;
  std::vector<diffusion::StepReport> reports;  // steps run in this call
  label::LabelTrainReport label_report;
  std::vector<double> heldout_consistency_short;  // ||T2(T3(y)) - y|| on held-out labels
  std::vector<double> heldout_consistency_long;
  std::vector<std::string> stage_events;
};

double median(std::vector<double> v);

TrainSummary train_pipeline(ModelBundle& models, const std::vector<device::GstRecord>& records,
                            const curriculum::CurriculumPlan& plan, const TrainOptions& opts);

/// Ideal output distributions reached by random Clifford circuits over `gates`,
/// deduplicated by distinctness key.
std::vector<RealVector> reachable_distributions(int num_qubits, std::span<const circuit::GateKind> gates,
                                                std::uint64_t seed);

std::vector<synth::SynthesisPrompt> reachable_prompts(const RunConfig& cfg);

}  // namespace qmlc::cli
