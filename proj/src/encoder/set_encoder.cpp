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

#include "qmlc/encoder/set_encoder.hpp"

#include <limits>

#include "qmlc/common/errors.hpp"

namespace qmlc::encoder {

void EncoderConfig::validate() const {
  if (num_qubits < 1 || depth < 1) throw ValidationError("encoder grid must be non-empty");
  if (d_gate < 1 || d_model < 1) throw ValidationError("encoder widths must be positive");
  if (layers < 0) throw ValidationError("encoder layer count must be >= 0");
  if (heads < 1 || d_model % heads != 0) throw ValidationError("d_model must be divisible by heads");
  if (inducing < 1) throw ValidationError("inducing point count m must be >= 1");
  if (seeds < 1) throw ValidationError("seed count k must be >= 1");
}

SetEncoder::SetEncoder(const EncoderConfig& cfg, RealVector pad_row, std::uint64_t seed)
    : cfg_(cfg), pad_row_(std::move(pad_row)) {
  cfg_.validate();
  if (pad_row_.size() != cfg_.d_gate) throw DimensionError("pad embedding width != d_gate");
  Rng rng = make_rng(seed, 0);
  const int d = cfg_.d_model;
  patch_proj_ = nn::Linear(4 * cfg_.d_gate, d, rng);
  lrn_token_ = nn::leaf(nn::gaussian_matrix(1, d, 0.02, rng));
  positions_ = nn::leaf(nn::gaussian_matrix(cfg_.num_patches() + 2, d, 0.02, rng));
  for (int l = 0; l < cfg_.layers; ++l) blocks_.emplace_back(d, cfg_.heads, cfg_.hidden(), rng);
  isab0_ = nn::InducedSetAttention(d, cfg_.heads, cfg_.inducing, cfg_.hidden(), rng);
  isab1_ = nn::InducedSetAttention(d, cfg_.heads, cfg_.inducing, cfg_.hidden(), rng);
  pma_ = nn::AttentionPooling(d, cfg_.heads, cfg_.seeds, cfg_.hidden(), rng);
}

nn::Matrix SetEncoder::extract_patches(const circuit::GridEmbedding& grid) const {
  if (grid.num_qubits != cfg_.num_qubits || grid.depth != cfg_.depth || grid.width() != cfg_.d_gate) {
    throw DimensionError("grid embedding shape does not match the encoder");
  }
  const int dg = cfg_.d_gate;
  nn::Matrix patches(cfg_.num_patches(), 4 * dg);
  int row = 0;
  for (int pq = 0; pq < cfg_.patch_rows(); ++pq) {
    for (int pt = 0; pt < cfg_.patch_cols(); ++pt, ++row) {
      int slot = 0;
      for (int dq = 0; dq < 2; ++dq) {
        for (int dt = 0; dt < 2; ++dt, ++slot) {
          const int q = 2 * pq + dq;
          const int t = 2 * pt + dt;
          auto dst = patches.block(row, slot * dg, 1, dg);
          if (q < grid.num_qubits && t < grid.depth) {
            dst = grid.cells.row(q * grid.depth + t);
          } else {
            dst = pad_row_.transpose();
          }
        }
      }
    }
  }
  return patches;
}

nn::Var SetEncoder::patch_embed(const circuit::GridEmbedding& grid) const {
  return patch_proj_.forward(nn::constant(extract_patches(grid)));
}

PairState SetEncoder::encode_pair(const circuit::GridEmbedding& grid, const nn::Var& h_short,
                                  bool mask_label) const {
  if (h_short.rows() != 1 || h_short.cols() != cfg_.d_model) {
    throw DimensionError("short label embedding must be 1 x d_model");
  }
  nn::Var x = nn::concat_rows({lrn_token_, h_short, patch_embed(grid)});
  x = nn::add(x, positions_);
  nn::Matrix mask;
  if (mask_label) {
    mask = nn::Matrix::Zero(x.rows(), x.rows());
    mask.col(1).setConstant(-std::numeric_limits<double>::infinity());
  }
  for (const auto& block : blocks_) x = block.forward(x, mask_label ? &mask : nullptr);
  return {nn::slice_rows(x, 0, 1), nn::slice_rows(x, 1, 1)};
}

nn::Var SetEncoder::pool_set(const nn::Var& rows) const {
  if (rows.rows() == 0) throw EmptySetError("cannot pool an empty set");
  if (rows.cols() != cfg_.d_model) throw DimensionError("pool_set rows must be d_model wide");
  return pma_.forward(isab1_.forward(isab0_.forward(rows)));
}

nn::Var SetEncoder::encode_miniset(const std::vector<EncoderInput>& records) const {
  if (records.empty()) throw EmptySetError("mini-set is empty");
  std::vector<nn::Var> rows;
  rows.reserve(records.size());
  for (const auto& r : records) {
    if (r.grid.num_qubits != records.front().grid.num_qubits) {
      throw SetError("records in a mini-set must share the qubit count");
    }
    rows.push_back(encode_pair(r.grid, nn::constant(r.h_short.transpose())).lrn);
  }
  const nn::Var ctx = pool_set(nn::concat_rows(rows));
  return nn::reshape(ctx, 1, ctx.rows() * ctx.cols());
}

void SetEncoder::visit_parameters(const std::string& prefix, const nn::ParamVisitor& fn) {
  patch_proj_.visit_parameters(prefix + "patch.", fn);
  fn(prefix + "lrn", lrn_token_);
  fn(prefix + "pos", positions_);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    blocks_[i].visit_parameters(prefix + "block" + std::to_string(i) + ".", fn);
  }
  isab0_.visit_parameters(prefix + "isab0.", fn);
  isab1_.visit_parameters(prefix + "isab1.", fn);
  pma_.visit_parameters(prefix + "pma.", fn);
}

}  // namespace qmlc::encoder
