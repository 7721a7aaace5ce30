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

#include "qmlc/circuit/embedding.hpp"

#include <random>
#include <string>

#include "qmlc/common/errors.hpp"
#include "qmlc/common/rng.hpp"

namespace qmlc::circuit {

GateEmbedding::GateEmbedding(RealMatrix table) : table_(std::move(table)) {
  if (table_.rows() < 1 || table_.cols() < table_.rows()) {
    throw DimensionError("embedding table needs d_gate >= K >= 1");
  }
}

GateEmbedding make_orthonormal_embedding(int vocab_size, int d_gate, std::uint64_t seed) {
  if (vocab_size < 1) throw DimensionError("vocabulary size must be positive");
  if (d_gate < vocab_size) {
    throw DimensionError("d_gate (" + std::to_string(d_gate) + ") < K (" +
                         std::to_string(vocab_size) + ")");
  }
  if (d_gate == vocab_size) {
    return GateEmbedding(RealMatrix::Identity(vocab_size, vocab_size));
  }
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd gaussian(d_gate, vocab_size);
  for (int i = 0; i < d_gate; ++i) {
    for (int j = 0; j < vocab_size; ++j) gaussian(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d_gate, vocab_size);
  return GateEmbedding(q.transpose());
}

RealMatrix GridEmbedding::flattened() const {
  return Eigen::Map<const RealMatrix>(cells.data(), 1, cells.size());
}

GridEmbedding GridEmbedding::from_flat(const RealMatrix& flat, int num_qubits, int depth,
                                       int width) {
  const auto expected = static_cast<Eigen::Index>(num_qubits) * depth * width;
  if (flat.size() != expected) {
    throw DimensionError("flat grid has " + std::to_string(flat.size()) + " entries, expected " +
                         std::to_string(expected));
  }
  RealMatrix cells = Eigen::Map<const RealMatrix>(
      flat.data(), static_cast<Eigen::Index>(num_qubits) * depth, width);
  return {num_qubits, depth, std::move(cells)};
}

GridEmbedding embed_grid(const TokenGrid& grid, const GateEmbedding& embedding) {
  GridEmbedding out{grid.num_qubits(), grid.depth(),
                    RealMatrix(static_cast<Eigen::Index>(grid.num_qubits()) * grid.depth(),
                               embedding.width())};
  for (int q = 0; q < grid.num_qubits(); ++q) {
    for (int t = 0; t < grid.depth(); ++t) {
      const int token = grid.at(q, t);
      if (token < 1 || token > embedding.vocab_size()) {
        throw VocabError("token " + std::to_string(token) + " has no embedding row");
      }
      out.cells.row(static_cast<Eigen::Index>(q) * grid.depth() + t) = embedding.row(token);
    }
  }
  return out;
}

}  // namespace qmlc::circuit
