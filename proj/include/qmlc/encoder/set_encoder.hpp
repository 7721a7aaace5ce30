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
#include <vector>

#include "qmlc/circuit/embedding.hpp"
#include "qmlc/nn/layers.hpp"

namespace qmlc::encoder {

struct EncoderConfig {
  int num_qubits = 2;
  int depth = 20;
  int d_gate = 5;
  int d_model = 128;
  int layers = 4;
  int heads = 4;
  int inducing = 32;
  int seeds = 4;
  int ff_hidden = 0;  // 0 means 4 * d_model

  int hidden() const { return ff_hidden > 0 ? ff_hidden : 4 * d_model; }
  int patch_rows() const { return (num_qubits + 1) / 2; }
  int patch_cols() const { return (depth + 1) / 2; }
  int num_patches() const { return patch_rows() * patch_cols(); }
  int context_dim() const { return seeds * d_model; }
  void validate() const;
};

struct PairState {
  nn::Var lrn;  // 1 x d_model
  nn::Var lbl;  // 1 x d_model
};

struct EncoderInput {
  circuit::GridEmbedding grid;
  RealVector h_short;
};

class SetEncoder : public nn::Module {
 public:
  SetEncoder() = default;
  /// `pad_row` is the gate embedding of the padding token, used to fill odd grids.
  SetEncoder(const EncoderConfig& cfg, RealVector pad_row, std::uint64_t seed);

  const EncoderConfig& config() const { return cfg_; }

  /// Flattened 2x2 patches, one row each (N_patch x 4 d_gate), before projection.
  nn::Matrix extract_patches(const circuit::GridEmbedding& grid) const;
  nn::Var patch_embed(const circuit::GridEmbedding& grid) const;

  /// Runs the ViT over [LRN, LBL, patches]. With `mask_label`, no token may
  /// attend to the [LBL] position.
  PairState encode_pair(const circuit::GridEmbedding& grid, const nn::Var& h_short,
                        bool mask_label = false) const;

  /// Two ISAB layers then PMA: n x d_model -> seeds x d_model.
  nn::Var pool_set(const nn::Var& rows) const;

  /// Pools the [LRN] states of every record; returns 1 x (seeds * d_model).
  nn::Var encode_miniset(const std::vector<EncoderInput>& records) const;

  void visit_parameters(const std::string& prefix, const nn::ParamVisitor& fn) override;

 private:
  EncoderConfig cfg_;
  RealVector pad_row_;
  nn::Linear patch_proj_;
  nn::Var lrn_token_;
  nn::Var positions_;
  std::vector<nn::AttentionBlock> blocks_;
  nn::InducedSetAttention isab0_, isab1_;
  nn::AttentionPooling pma_;
};

}  // namespace qmlc::encoder
