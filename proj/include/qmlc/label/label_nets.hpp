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

#include "qmlc/label/transforms.hpp"
#include "qmlc/nn/layers.hpp"

namespace qmlc::label {

inline constexpr double kCovarianceFloor = 1e-4;

/// diag(H_y): softplus of the long embedding, rescaled to mean one with every
/// entry at least kCovarianceFloor. Throws NumericError on non-finite input.
RealVector build_covariance(const RealVector& h_long, double floor = kCovarianceFloor);

struct LabelNetConfig {
  int grid_dim = 0;   // flattened grid embedding width (d_circuit)
  int label_dim = 0;  // 2^Q
  int embed_dim = 0;  // output width of T1 and T3
  int hidden = 128;
  int depth = 5;      // hidden layers per network
  TransformConfig transform;
};

/// T1: grid -> embedding, T2: embedding -> label (softmax), T3: transformed label -> embedding.
class LabelChain : public nn::Module {
 public:
  LabelChain() = default;
  LabelChain(const LabelNetConfig& cfg, Rng& rng);

  const LabelNetConfig& config() const { return cfg_; }

  nn::Var t1(const nn::Var& grids) const { return t1_.forward(grids); }
  nn::Var t2(const nn::Var& embeddings) const { return nn::softmax_rows(t2_.forward(embeddings)); }
  nn::Var t3(const nn::Var& transformed) const { return t3_.forward(transformed); }

  /// Embedding of an already transformed label.
  RealVector embed(const RealVector& transformed) const;
  /// T2(T3(T(y))) for a label on the simplex.
  RealVector reconstruct(const RealVector& y) const;

  nn::Mlp& net1() { return t1_; }
  nn::Mlp& net2() { return t2_; }
  nn::Mlp& net3() { return t3_; }

  void visit_parameters(const std::string& prefix, const nn::ParamVisitor& fn) override;

 private:
  LabelNetConfig cfg_;
  nn::Mlp t1_, t2_, t3_;
};

struct LabelCondition {
  RealVector y;        // projected label
  RealVector h_short;  // d_model
  RealVector h_long;   // d_circuit
  RealVector cov;      // diag(H_y), d_circuit
};

class LabelPipeline : public nn::Module {
 public:
  LabelPipeline() = default;
  LabelPipeline(int grid_dim, int label_dim, int d_model, int hidden, int depth,
                TransformConfig transform, std::uint64_t seed);

  const TransformConfig& transform() const { return short_.config().transform; }
  int label_dim() const { return short_.config().label_dim; }
  int d_model() const { return short_.config().embed_dim; }
  int d_circuit() const { return long_.config().embed_dim; }

  RealVector embed_short(const RealVector& transformed) const { return short_.embed(transformed); }
  RealVector embed_long(const RealVector& transformed) const { return long_.embed(transformed); }

  /// Projects `y` onto the simplex and evaluates both embeddings and H_y.
  LabelCondition condition(const RealVector& y) const;

  LabelChain& short_chain() { return short_; }
  LabelChain& long_chain() { return long_; }
  const LabelChain& short_chain() const { return short_; }
  const LabelChain& long_chain() const { return long_; }

  void visit_parameters(const std::string& prefix, const nn::ParamVisitor& fn) override;

 private:
  LabelChain short_;
  LabelChain long_;
};

struct LabelSample {
  RealVector grid;  // flattened grid embedding
  RealVector y;
};

struct LabelTrainConfig {
  double sigma = 0.02;
  int stage1_epochs = 200;
  int stage2_epochs = 200;
  int batch = 32;
  double lr = 1e-3;
  std::uint64_t seed = 0;
};

struct LabelTrainReport {
  std::vector<double> stage1_loss;  // per epoch, summed over both chains
  std::vector<double> stage2_loss;
};

/// Stage 1 fits T2(T1(x)) to y; stage 2 freezes T1/T2 and fits T3 through the
/// consistency loss with noisy labels. Throws TrainingError on a NaN loss.
LabelTrainReport train_label_consistency(LabelPipeline& pipeline,
                                         const std::vector<LabelSample>& data,
                                         const LabelTrainConfig& cfg);

}  // namespace qmlc::label
