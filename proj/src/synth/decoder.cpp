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

#include "qmlc/synth/decoder.hpp"

#include <algorithm>
#include <numeric>

#include "qmlc/common/errors.hpp"
#include "qmlc/nn/optim.hpp"

namespace qmlc::synth {

TokenDecoder::TokenDecoder(const circuit::GateEmbedding& embedding)
    : weight_(nn::leaf(embedding.table().transpose())),
      bias_(nn::leaf(nn::Matrix::Zero(1, embedding.vocab_size()))) {}

nn::Var TokenDecoder::logits(const nn::Var& cells) const {
  if (cells.cols() != width()) throw DimensionError("decoder input width != d_gate");
  return nn::add_row(nn::matmul(cells, weight_), bias_);
}

RealMatrix TokenDecoder::probabilities(const RealVector& x0) const {
  if (x0.size() % width() != 0) throw DimensionError("flattened grid length is not a multiple of d_gate");
  nn::NoGradGuard guard;
  const nn::Matrix cells = Eigen::Map<const nn::Matrix>(x0.data(), x0.size() / width(), width());
  return nn::softmax_rows(logits(nn::constant(cells))).value();
}

void TokenDecoder::visit_parameters(const std::string& prefix, const nn::ParamVisitor& fn) {
  fn(prefix + "weight", weight_);
  fn(prefix + "bias", bias_);
}

circuit::TokenGrid decode_tokens(const RealVector& x0, const TokenDecoder& decoder, int num_qubits, int depth,
                                 DecodeMode mode, std::uint64_t seed) {
  if (x0.size() != static_cast<Eigen::Index>(num_qubits) * depth * decoder.width()) {
    throw DimensionError("decode_tokens: x0 length != Q * T * d_gate");
  }
  const RealMatrix probs = decoder.probabilities(x0);
  circuit::TokenGrid grid(num_qubits, depth, 1);
  Rng rng = make_rng(seed, 0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int q = 0; q < num_qubits; ++q) {
    for (int t = 0; t < depth; ++t) {
      const auto row = probs.row(q * depth + t);
      Eigen::Index pick = 0;
      if (mode == DecodeMode::Argmax) {
        for (Eigen::Index k = 1; k < row.size(); ++k) {
          if (row(k) > row(pick)) pick = k;
        }
      } else {
        double r = u(rng);
        pick = row.size() - 1;
        for (Eigen::Index k = 0; k < row.size(); ++k) {
          r -= row(k);
          if (r < 0.0) {
            pick = k;
            break;
          }
        }
      }
      grid.set(q, t, static_cast<int>(pick) + 1);
    }
  }
  return grid;
}

std::vector<double> fine_tune_decoder(TokenDecoder& decoder, const std::vector<circuit::GridEmbedding>& grids,
                                      const std::vector<circuit::TokenGrid>& tokens,
                                      const DecoderTrainConfig& cfg) {
  if (grids.size() != tokens.size()) throw DimensionError("decoder data: grids and tokens differ in count");
  std::vector<double> losses;
  if (grids.empty()) return losses;
  nn::Matrix cells;
  std::vector<int> labels;
  {
    Eigen::Index total = 0;
    for (const auto& g : grids) total += g.cells.rows();
    cells.resize(total, decoder.width());
    Eigen::Index at = 0;
    for (std::size_t i = 0; i < grids.size(); ++i) {
      cells.middleRows(at, grids[i].cells.rows()) = grids[i].cells;
      at += grids[i].cells.rows();
      for (int tok : tokens[i].cells()) labels.push_back(tok - 1);
    }
  }
  Rng rng = make_rng(cfg.seed, 0);
  std::normal_distribution<double> jitter(0.0, cfg.noise);
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  nn::Adam opt(decoder.parameters(), {.lr = cfg.lr});
  const std::size_t batch = static_cast<std::size_t>(std::max(1, cfg.batch));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t n = std::min(batch, order.size() - start);
      nn::Matrix x(static_cast<Eigen::Index>(n), decoder.width());
      nn::Matrix onehot = nn::Matrix::Zero(static_cast<Eigen::Index>(n), decoder.vocab_size());
      for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        x.row(r) = cells.row(static_cast<Eigen::Index>(order[start + i]));
        for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) += jitter(rng);
        onehot(r, labels[order[start + i]]) = 1.0;
      }
      opt.zero_grad();
      const nn::Var logp = nn::log_softmax_rows(decoder.logits(nn::constant(x)));
      const nn::Var loss = nn::scale(nn::sum(nn::mul(logp, nn::constant(onehot))), -1.0 / static_cast<double>(n));
      nn::backward(loss);
      opt.step();
      total += loss.scalar();
      ++batches;
    }
    losses.push_back(total / batches);
  }
  return losses;
}

}  // namespace qmlc::synth
