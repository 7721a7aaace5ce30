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
#include <map>
#include <string>
#include <vector>

#include "qmlc/common/rng.hpp"
#include "qmlc/nn/autograd.hpp"

namespace qmlc::nn {

using ParamVisitor = std::function<void(const std::string& name, Var& param)>;

class Module {
 public:
  virtual ~Module() = default;
  virtual void visit_parameters(const std::string& prefix, const ParamVisitor& fn) = 0;

  std::vector<Var> parameters();
  std::size_t num_parameters();
};

using StateDict = std::map<std::string, Matrix>;

StateDict state_dict(Module& module, const std::string& prefix = "");
/// Copies matching tensors into `module`; throws IoError on a missing name or
/// a shape mismatch.
void load_state_dict(Module& module, const StateDict& state, const std::string& prefix = "");

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double stddev, Rng& rng);

enum class Activation { Gelu, Silu, Tanh };

Var activate(const Var& x, Activation act);

class Linear : public Module {
 public:
  Linear() = default;
  Linear(int in, int out, Rng& rng, bool bias = true);

  Var forward(const Var& x) const;
  void visit_parameters(const std::string& prefix, const ParamVisitor& fn) override;

  int in_features() const { return static_cast<int>(weight_.rows()); }
  int out_features() const { return static_cast<int>(weight_.cols()); }
  Var& weight() { return weight_; }
  Var& bias() { return bias_; }

 private:
  Var weight_;  // in x out
  Var bias_;    // 1 x out, undefined when disabled
};

class LayerNorm : public Module {
 public:
  LayerNorm() = default;
  explicit LayerNorm(int width);

  Var forward(const Var& x) const { return layer_norm_rows(x, gain_, bias_); }
  void visit_parameters(const std::string& prefix, const ParamVisitor& fn) override;

 private:
  Var gain_;
  Var bias_;
};

/// Fully connected stack; `dims` lists input, hidden widths, output.
class Mlp : public Module {
 public:
  Mlp() = default;
  Mlp(const std::vector<int>& dims, Activation act, Rng& rng);

  Var forward(const Var& x) const;
  void visit_parameters(const std::string& prefix, const ParamVisitor& fn) override;

  int in_features() const { return layers_.front().in_features(); }
  int out_features() const { return layers_.back().out_features(); }
  int hidden_layers() const { return static_cast<int>(layers_.size()) - 1; }

 private:
  std::vector<Linear> layers_;
  Activation act_ = Activation::Gelu;
};

/// Row-wise feed-forward: d -> hidden (GELU) -> d.
class RowFeedForward : public Module {
 public:
  RowFeedForward() = default;
  RowFeedForward(int width, int hidden, Rng& rng);

  Var forward(const Var& x) const { return fc2_.forward(gelu(fc1_.forward(x))); }
  void visit_parameters(const std::string& prefix, const ParamVisitor& fn) override;

 private:
  Linear fc1_;
  Linear fc2_;
};

class MultiHeadAttention : public Module {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(int width, int heads, Rng& rng);

  /// `mask`, when given, is added to the (queries x keys) scores of every head.
  Var forward(const Var& queries, const Var& keys, const Matrix* mask = nullptr) const;
  void visit_parameters(const std::string& prefix, const ParamVisitor& fn) override;

 private:
  int heads_ = 1;
  Linear wq_, wk_, wv_, wo_;
};

/// Post-norm attention block: H = LN(X + Attn(X, Y)), out = LN(H + rFF(H)).
/// With Y = X this is a transformer encoder block.
class AttentionBlock : public Module {
 public:
  AttentionBlock() = default;
  AttentionBlock(int width, int heads, int hidden, Rng& rng);

  Var forward(const Var& x, const Var& y, const Matrix* mask = nullptr) const;
  Var forward(const Var& x, const Matrix* mask = nullptr) const { return forward(x, x, mask); }
  void visit_parameters(const std::string& prefix, const ParamVisitor& fn) override;

 private:
  MultiHeadAttention attn_;
  LayerNorm ln1_, ln2_;
  RowFeedForward ff_;
};

class InducedSetAttention : public Module {
 public:
  InducedSetAttention() = default;
  InducedSetAttention(int width, int heads, int inducing, int hidden, Rng& rng);

  Var forward(const Var& x) const;
  void visit_parameters(const std::string& prefix, const ParamVisitor& fn) override;

  int inducing_points() const { return static_cast<int>(inducing_.rows()); }

 private:
  Var inducing_;
  AttentionBlock to_inducing_;
  AttentionBlock from_inducing_;
};

class AttentionPooling : public Module {
 public:
  AttentionPooling() = default;
  AttentionPooling(int width, int heads, int seeds, int hidden, Rng& rng);

  Var forward(const Var& x) const;
  void visit_parameters(const std::string& prefix, const ParamVisitor& fn) override;

 private:
  Var seeds_;
  RowFeedForward pre_;
  AttentionBlock block_;
};

}  // namespace qmlc::nn
