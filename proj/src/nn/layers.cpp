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

#include "qmlc/nn/layers.hpp"

#include <cmath>

#include "qmlc/common/errors.hpp"

namespace qmlc::nn {

std::vector<Var> Module::parameters() {
  std::vector<Var> out;
  visit_parameters("", [&](const std::string&, Var& p) { out.push_back(p); });
  return out;
}

std::size_t Module::num_parameters() {
  std::size_t n = 0;
  visit_parameters("", [&](const std::string&, Var& p) { n += static_cast<std::size_t>(p.value().size()); });
  return n;
}

StateDict state_dict(Module& module, const std::string& prefix) {
  StateDict out;
  module.visit_parameters(prefix, [&](const std::string& name, Var& p) { out[name] = p.value(); });
  return out;
}

void load_state_dict(Module& module, const StateDict& state, const std::string& prefix) {
  module.visit_parameters(prefix, [&](const std::string& name, Var& p) {
    auto it = state.find(name);
    if (it == state.end()) throw IoError("missing tensor '" + name + "'");
    if (it->second.rows() != p.rows() || it->second.cols() != p.cols()) {
      throw IoError("shape mismatch for tensor '" + name + "'");
    }
    p.mutable_value() = it->second;
  });
}

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double stddev, Rng& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

Var activate(const Var& x, Activation act) {
  switch (act) {
    case Activation::Gelu: return gelu(x);
    case Activation::Silu: return silu(x);
    case Activation::Tanh: return tanh(x);
  }
  return x;
}

Linear::Linear(int in, int out, Rng& rng, bool bias) {
  const double stddev = std::sqrt(2.0 / static_cast<double>(in + out));
  weight_ = leaf(gaussian_matrix(in, out, stddev, rng));
  if (bias) bias_ = leaf(Matrix::Zero(1, out));
}

Var Linear::forward(const Var& x) const {
  Var y = matmul(x, weight_);
  return bias_.defined() ? add_row(y, bias_) : y;
}

void Linear::visit_parameters(const std::string& prefix, const ParamVisitor& fn) {
  fn(prefix + "weight", weight_);
  if (bias_.defined()) fn(prefix + "bias", bias_);
}

LayerNorm::LayerNorm(int width)
    : gain_(leaf(Matrix::Ones(1, width))), bias_(leaf(Matrix::Zero(1, width))) {}

void LayerNorm::visit_parameters(const std::string& prefix, const ParamVisitor& fn) {
  fn(prefix + "gain", gain_);
  fn(prefix + "bias", bias_);
}

Mlp::Mlp(const std::vector<int>& dims, Activation act, Rng& rng) : act_(act) {
  if (dims.size() < 2) throw DimensionError("Mlp needs at least input and output widths");
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) layers_.emplace_back(dims[i], dims[i + 1], rng);
}

Var Mlp::forward(const Var& x) const {
  if (x.cols() != in_features()) {
    throw DimensionError("Mlp input width " + std::to_string(x.cols()) + " != " +
                         std::to_string(in_features()));
  }
  Var h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    h = layers_[i].forward(h);
    if (i + 1 < layers_.size()) h = activate(h, act_);
  }
  return h;
}

void Mlp::visit_parameters(const std::string& prefix, const ParamVisitor& fn) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    layers_[i].visit_parameters(prefix + "l" + std::to_string(i) + ".", fn);
  }
}

RowFeedForward::RowFeedForward(int width, int hidden, Rng& rng)
    : fc1_(width, hidden, rng), fc2_(hidden, width, rng) {}

void RowFeedForward::visit_parameters(const std::string& prefix, const ParamVisitor& fn) {
  fc1_.visit_parameters(prefix + "fc1.", fn);
  fc2_.visit_parameters(prefix + "fc2.", fn);
}

MultiHeadAttention::MultiHeadAttention(int width, int heads, Rng& rng)
    : heads_(heads), wq_(width, width, rng), wk_(width, width, rng), wv_(width, width, rng),
      wo_(width, width, rng) {
  if (heads < 1 || width % heads != 0) throw DimensionError("width must be divisible by heads");
}

Var MultiHeadAttention::forward(const Var& queries, const Var& keys, const Matrix* mask) const {
  const Var q = wq_.forward(queries);
  const Var k = wk_.forward(keys);
  const Var v = wv_.forward(keys);
  const Eigen::Index dh = q.cols() / heads_;
  const double scale_factor = 1.0 / std::sqrt(static_cast<double>(dh));
  if (mask && (mask->rows() != q.rows() || mask->cols() != k.rows())) {
    throw DimensionError("attention mask shape mismatch");
  }
  std::vector<Var> outs;
  outs.reserve(static_cast<std::size_t>(heads_));
  for (int h = 0; h < heads_; ++h) {
    const Var qh = heads_ == 1 ? q : slice_cols(q, h * dh, dh);
    const Var kh = heads_ == 1 ? k : slice_cols(k, h * dh, dh);
    const Var vh = heads_ == 1 ? v : slice_cols(v, h * dh, dh);
    Var scores = scale(matmul(qh, transpose(kh)), scale_factor);
    if (mask) scores = add(scores, constant(*mask));
    outs.push_back(matmul(softmax_rows(scores), vh));
  }
  return wo_.forward(heads_ == 1 ? outs.front() : concat_cols(outs));
}

void MultiHeadAttention::visit_parameters(const std::string& prefix, const ParamVisitor& fn) {
  wq_.visit_parameters(prefix + "wq.", fn);
  wk_.visit_parameters(prefix + "wk.", fn);
  wv_.visit_parameters(prefix + "wv.", fn);
  wo_.visit_parameters(prefix + "wo.", fn);
}

AttentionBlock::AttentionBlock(int width, int heads, int hidden, Rng& rng)
    : attn_(width, heads, rng), ln1_(width), ln2_(width), ff_(width, hidden, rng) {}

Var AttentionBlock::forward(const Var& x, const Var& y, const Matrix* mask) const {
  const Var h = ln1_.forward(add(x, attn_.forward(x, y, mask)));
  return ln2_.forward(add(h, ff_.forward(h)));
}

void AttentionBlock::visit_parameters(const std::string& prefix, const ParamVisitor& fn) {
  attn_.visit_parameters(prefix + "attn.", fn);
  ln1_.visit_parameters(prefix + "ln1.", fn);
  ln2_.visit_parameters(prefix + "ln2.", fn);
  ff_.visit_parameters(prefix + "ff.", fn);
}

InducedSetAttention::InducedSetAttention(int width, int heads, int inducing, int hidden, Rng& rng)
    : inducing_(leaf(gaussian_matrix(inducing, width, 1.0 / std::sqrt(static_cast<double>(width)), rng))),
      to_inducing_(width, heads, hidden, rng),
      from_inducing_(width, heads, hidden, rng) {}

Var InducedSetAttention::forward(const Var& x) const {
  const Var h = to_inducing_.forward(inducing_, x);
  return from_inducing_.forward(x, h);
}

void InducedSetAttention::visit_parameters(const std::string& prefix, const ParamVisitor& fn) {
  fn(prefix + "inducing", inducing_);
  to_inducing_.visit_parameters(prefix + "mab0.", fn);
  from_inducing_.visit_parameters(prefix + "mab1.", fn);
}

AttentionPooling::AttentionPooling(int width, int heads, int seeds, int hidden, Rng& rng)
    : seeds_(leaf(gaussian_matrix(seeds, width, 1.0 / std::sqrt(static_cast<double>(width)), rng))),
      pre_(width, hidden, rng),
      block_(width, heads, hidden, rng) {}

Var AttentionPooling::forward(const Var& x) const { return block_.forward(seeds_, pre_.forward(x)); }

void AttentionPooling::visit_parameters(const std::string& prefix, const ParamVisitor& fn) {
  fn(prefix + "seeds", seeds_);
  pre_.visit_parameters(prefix + "rff.", fn);
  block_.visit_parameters(prefix + "mab.", fn);
}

}  // namespace qmlc::nn
