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

#include "qmlc/diffusion/networks.hpp"

#include <cmath>
#include <numbers>

#include "qmlc/common/errors.hpp"

namespace qmlc::diffusion {

nn::Matrix time_features(double t, int bands) {
  nn::Matrix f(1, 2 * bands);
  double freq = std::numbers::pi;
  for (int j = 0; j < bands; ++j) {
    f(0, 2 * j) = std::sin(freq * t);
    f(0, 2 * j + 1) = std::cos(freq * t);
    freq *= 2.0;
  }
  return f;
}

GcdNet::GcdNet(const GcdNetConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  Rng rng = make_rng(seed, 0);
  std::vector<int> dims{cfg.d_ctx + 2 * cfg.time_bands};
  for (int i = 0; i < cfg.depth; ++i) dims.push_back(cfg.hidden);
  dims.push_back(cfg.d_ctx);
  mlp_ = nn::Mlp(dims, nn::Activation::Silu, rng);
}

nn::Var GcdNet::predict(const nn::Var& z_t, const std::vector<double>& t) const {
  if (z_t.cols() != cfg_.d_ctx) throw DimensionError("GcdNet input width != d_ctx");
  if (static_cast<Eigen::Index>(t.size()) != z_t.rows()) throw DimensionError("GcdNet needs one time per row");
  nn::Matrix tf(z_t.rows(), 2 * cfg_.time_bands);
  for (Eigen::Index r = 0; r < z_t.rows(); ++r) tf.row(r) = time_features(t[static_cast<std::size_t>(r)], cfg_.time_bands);
  return mlp_.forward(nn::concat_cols({z_t, nn::constant(tf)}));
}

void GcdNet::visit_parameters(const std::string& prefix, const nn::ParamVisitor& fn) {
  mlp_.visit_parameters(prefix + "mlp.", fn);
}

CtdNet::CtdNet(const CtdNetConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  Rng rng = make_rng(seed, 0);
  const int d = cfg.d_model;
  cell_in_ = nn::Linear(cfg.d_gate, d, rng);
  cell_pos_ = nn::leaf(nn::gaussian_matrix(cfg.cells(), d, 0.02, rng));
  label_in_ = nn::Linear(d, d, rng);
  context_in_ = nn::Linear(cfg.d_ctx, d, rng);
  time_in_ = nn::Mlp({2 * cfg.time_bands, d, d}, nn::Activation::Silu, rng);
  for (int l = 0; l < cfg.layers; ++l) blocks_.emplace_back(d, cfg.heads, cfg.ff_hidden(), rng);
  cell_out_ = nn::Linear(d, cfg.d_gate, rng);
  skip_ = nn::Linear(cfg.d_gate, cfg.d_gate, rng, false);
}

nn::Var CtdNet::predict(const nn::Var& x_t, double t, const nn::Var& label, const nn::Var& context) const {
  if (x_t.rows() != 1 || x_t.cols() != cfg_.d_circuit()) throw DimensionError("CtdNet input must be 1 x d_circuit");
  if (label.cols() != cfg_.d_model) throw DimensionError("CtdNet label conditioning must be d_model wide");
  if (context.cols() != cfg_.d_ctx) throw DimensionError("CtdNet context conditioning must be d_ctx wide");
  const nn::Var cells = nn::reshape(x_t, cfg_.cells(), cfg_.d_gate);
  const nn::Var c_label = label_in_.forward(label);
  const nn::Var c_ctx = context_in_.forward(context);
  const nn::Var c_time = time_in_.forward(nn::constant(time_features(t, cfg_.time_bands)));
  const nn::Var cond = nn::add(nn::add(c_label, c_ctx), c_time);
  const nn::Var tokens = nn::add_row(nn::add(cell_in_.forward(cells), cell_pos_), cond);
  nn::Var h = nn::concat_rows({c_label, c_ctx, c_time, tokens});
  for (const auto& b : blocks_) h = b.forward(h);
  const nn::Var out =
      nn::add(cell_out_.forward(nn::slice_rows(h, 3, cfg_.cells())), skip_.forward(cells));
  return nn::reshape(out, 1, cfg_.d_circuit());
}

void CtdNet::visit_parameters(const std::string& prefix, const nn::ParamVisitor& fn) {
  cell_in_.visit_parameters(prefix + "cell_in.", fn);
  fn(prefix + "cell_pos", cell_pos_);
  label_in_.visit_parameters(prefix + "label_in.", fn);
  context_in_.visit_parameters(prefix + "context_in.", fn);
  time_in_.visit_parameters(prefix + "time_in.", fn);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    blocks_[i].visit_parameters(prefix + "block" + std::to_string(i) + ".", fn);
  }
  cell_out_.visit_parameters(prefix + "cell_out.", fn);
  skip_.visit_parameters(prefix + "skip.", fn);
}

}  // namespace qmlc::diffusion
