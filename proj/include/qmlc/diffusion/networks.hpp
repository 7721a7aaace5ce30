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

#include "qmlc/nn/layers.hpp"

namespace qmlc::diffusion {

/// Sinusoidal features of t: bands ascending, sin before cos (1 x 2 bands).
nn::Matrix time_features(double t, int bands);

struct GcdNetConfig {
  int d_ctx = 512;
  int hidden = 256;
  int depth = 3;
  int time_bands = 6;
};

/// Noise predictor for context vectors: MLP over [z_t, time features].
class GcdNet : public nn::Module {
 public:
  GcdNet() = default;
  GcdNet(const GcdNetConfig& cfg, std::uint64_t seed);

  const GcdNetConfig& config() const { return cfg_; }
  /// `z_t` is n x d_ctx; one time per row.
  nn::Var predict(const nn::Var& z_t, const std::vector<double>& t) const;

  void visit_parameters(const std::string& prefix, const nn::ParamVisitor& fn) override;

 private:
  GcdNetConfig cfg_;
  nn::Mlp mlp_;
};

struct CtdNetConfig {
  int num_qubits = 2;
  int depth = 20;
  int d_gate = 5;
  int d_model = 128;
  int d_ctx = 512;
  int layers = 2;
  int heads = 4;
  int hidden = 0;  // 0 means 4 * d_model
  int time_bands = 6;

  int cells() const { return num_qubits * depth; }
  int d_circuit() const { return cells() * d_gate; }
  int ff_hidden() const { return hidden > 0 ? hidden : 4 * d_model; }
};

/// Noise predictor for flattened grid embeddings. Each grid cell is a token;
/// three conditioning tokens (label, context, time) are prepended and their
/// sum is also added to every cell token. A linear skip maps x_t cells
/// straight to the output.
class CtdNet : public nn::Module {
 public:
  CtdNet() = default;
  CtdNet(const CtdNetConfig& cfg, std::uint64_t seed);

  const CtdNetConfig& config() const { return cfg_; }

  /// `x_t` 1 x d_circuit, `label` 1 x d_model, `context` 1 x d_ctx.
  nn::Var predict(const nn::Var& x_t, double t, const nn::Var& label, const nn::Var& context) const;

  void visit_parameters(const std::string& prefix, const nn::ParamVisitor& fn) override;

 private:
  CtdNetConfig cfg_;
  nn::Linear cell_in_;
  nn::Var cell_pos_;
  nn::Linear label_in_;
  nn::Linear context_in_;
  nn::Mlp time_in_;
  std::vector<nn::AttentionBlock> blocks_;
  nn::Linear cell_out_;
  nn::Linear skip_;
};

}  // namespace qmlc::diffusion
