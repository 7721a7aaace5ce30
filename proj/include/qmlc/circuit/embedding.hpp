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

#include "qmlc/circuit/token_grid.hpp"
#include "qmlc/common/linalg.hpp"

namespace qmlc::circuit {

/// K x d_gate table with orthonormal rows; row `token_id - 1` embeds a token.
class GateEmbedding {
 public:
  explicit GateEmbedding(RealMatrix table);

  int vocab_size() const { return static_cast<int>(table_.rows()); }
  int width() const { return static_cast<int>(table_.cols()); }
  const RealMatrix& table() const { return table_; }
  auto row(int token_id) const { return table_.row(token_id - 1); }

 private:
  RealMatrix table_;
};

/// Identity rows when d_gate == K, otherwise the first K columns of the Q
/// factor of a seeded Gaussian d_gate x K matrix.
GateEmbedding make_orthonormal_embedding(int vocab_size, int d_gate, std::uint64_t seed);

/// Q x T x d tensor stored as a (Q*T) x d matrix, cell (q, t) in row q*T + t.
struct GridEmbedding {
  int num_qubits;
  int depth;
  RealMatrix cells;

  int width() const { return static_cast<int>(cells.cols()); }
  /// Row-major flattening, length Q*T*d.
  RealMatrix flattened() const;
  static GridEmbedding from_flat(const RealMatrix& flat, int num_qubits, int depth, int width);
};

GridEmbedding embed_grid(const TokenGrid& grid, const GateEmbedding& embedding);

}  // namespace qmlc::circuit
