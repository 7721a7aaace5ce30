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

namespace qmlc::synth {

enum class DecodeMode { Argmax, Sample };

/// Per-cell linear map from d_gate to vocabulary logits, softmax on top.
class TokenDecoder : public nn::Module {
 public:
  TokenDecoder() = default;
  /// Weight starts as the transposed embedding table, bias at zero.
  explicit TokenDecoder(const circuit::GateEmbedding& embedding);

  int vocab_size() const { return static_cast<int>(weight_.cols()); }
  int width() const { return static_cast<int>(weight_.rows()); }

  nn::Var logits(const nn::Var& cells) const;  // N x d_gate -> N x K
  /// Row-stochastic N x K probabilities for a flattened grid.
  RealMatrix probabilities(const RealVector& x0) const;

  void visit_parameters(const std::string& prefix, const nn::ParamVisitor& fn) override;

 private:
  nn::Var weight_;  // d_gate x K
  nn::Var bias_;    // 1 x K
};

/// Argmax ties resolve to the lowest token id.
circuit::TokenGrid decode_tokens(const RealVector& x0, const TokenDecoder& decoder, int num_qubits, int depth,
                                 DecodeMode mode = DecodeMode::Argmax, std::uint64_t seed = 0);

struct DecoderTrainConfig {
  int epochs = 50;
  int batch = 32;
  double lr = 1e-3;
  double noise = 0.1;  // Gaussian jitter on clean embeddings
  std::uint64_t seed = 0;
};

/// Cross-entropy fine-tuning on (jittered) cell embeddings; returns the mean loss per epoch.
std::vector<double> fine_tune_decoder(TokenDecoder& decoder, const std::vector<circuit::GridEmbedding>& grids,
                                      const std::vector<circuit::TokenGrid>& tokens,
                                      const DecoderTrainConfig& cfg);

}  // namespace qmlc::synth
