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

#include <functional>
#include <vector>

#include "qmlc/diffusion/networks.hpp"
#include "qmlc/diffusion/schedule.hpp"
#include "qmlc/encoder/set_encoder.hpp"
#include "qmlc/label/label_nets.hpp"
#include "qmlc/nn/optim.hpp"

namespace qmlc::diffusion {

struct NoiseDraw {
  double t;
  RealVector eps;
};

/// Draws t ~ U(t_min, 1 - t_min) and eps ~ N(0, I).
NoiseDraw draw_noise(int dim, Rng& rng, double t_min = 1e-3);

/// Mean over rows of gamma'(t)/2 * ||eps_hat - eps||^2 with z_t built from `z0`
/// (n x d_ctx) inside the graph. NumericError on a non-finite prediction.
nn::Var gcd_loss(const GcdNet& net, const nn::Var& z0, const std::vector<NoiseDraw>& draws,
                 const NoiseSchedule& sched);

/// Maps a label condition to the CTD label input. The default uses h_short.
using ConditionFn = std::function<nn::Var(const label::LabelCondition&)>;

struct CtdTerm {
  RealVector x0;                 // flattened clean grid embedding
  label::LabelCondition cond;    // label, embeddings and diag(H_y)
  NoiseDraw draw;
};

/// Mean over terms of gamma'(t)/2 * ||(eps_hat - eps) / sqrt(diag H)||^2.
nn::Var ctd_loss_whitened(const CtdNet& net, const std::vector<CtdTerm>& terms, const nn::Var& context,
                          const NoiseSchedule& sched, const ConditionFn& condition = {});

struct HvidlConfig {
  double kappa = 0.05;
  double sigma_delta = 0.01;

  void validate() const;
};

struct HvidlStats {
  int gated_out = 0;
  int used = 0;
};

/// Whitened loss with each label replaced by y' = y + delta. Terms with
/// ||delta|| > kappa are left out of the graph and count as zero in the mean;
/// kept terms use the conditioning and H_{y'} recomputed from y'.
nn::Var hvidl_loss(const CtdNet& net, const std::vector<CtdTerm>& terms, const nn::Var& context,
                   const label::LabelPipeline& labels, const HvidlConfig& cfg, const NoiseSchedule& sched,
                   Rng& rng, const ConditionFn& condition = {}, HvidlStats* stats = nullptr);

struct MinisetExample {
  std::vector<encoder::EncoderInput> inputs;
  std::vector<RealVector> x0;
  std::vector<label::LabelCondition> conds;
};

struct JointModels {
  encoder::SetEncoder& encoder;
  GcdNet& gcd;
  CtdNet& ctd;
  const label::LabelPipeline& labels;
};

struct JointConfig {
  double lambda = 1.0;
  bool use_hvidl = true;
  HvidlConfig hvidl;
  bool label_state_condition = false;
};

struct StepReport {
  double total = 0.0;
  double gcd = 0.0;
  double ctd = 0.0;
  double grad_norm = 0.0;
  double lr = 0.0;
  bool skipped = false;
  int gated_out = 0;
};

/// Label conditioning from the encoder's [LBL] state on an all-padding grid.
ConditionFn label_state_condition(const encoder::SetEncoder& encoder, const circuit::GridEmbedding& pad_grid);

/// Teacher-forced step: z = E(S); L = L_GCD(z) + lambda L_CTD(x, z); one
/// backward pass through encoder and both denoisers. On a non-finite loss or
/// gradient the update is skipped and the learning rate halved.
StepReport joint_train_step(const std::vector<MinisetExample>& batch, JointModels& models,
                            const JointConfig& cfg, nn::Adam& opt, const NoiseSchedule& sched, Rng& rng,
                            const circuit::GridEmbedding* pad_grid = nullptr);

}  // namespace qmlc::diffusion
