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

#include "qmlc/common/linalg.hpp"
#include "qmlc/encoder/set_encoder.hpp"

namespace qmlc::oracles {

/// Counts of k-dimensional affine subspaces of F_2^n, k = 0..n, found by
/// testing every subset of the 2^n points for affine closure (n <= 4).
std::vector<std::uint64_t> enumerate_affine_subspaces(int n);
/// Counts of k-dimensional linear subspaces (affine subspaces through 0).
std::vector<std::uint64_t> enumerate_linear_subspaces(int n);

struct SaturationResult {
  std::size_t distinct = 0;
  std::size_t circuits = 0;
  std::size_t first_hit_of_last = 0;  // circuit index at which the final count was reached
};

/// Distinct ideal output distributions over random Clifford circuits drawn
/// from {x90, y90, cx}.
SaturationResult clifford_saturation(int num_qubits, std::size_t circuits, int depth, std::uint64_t seed);

struct AgreementResult {
  std::size_t circuits = 0;
  double max_tvd = 0.0;
};

/// Zero-noise density-matrix output against the stabilizer tableau on random
/// Clifford circuits with depth uniform in [0, max_depth].
AgreementResult stabilizer_agreement(int num_qubits, std::size_t circuits, int max_depth, std::uint64_t seed);

/// Largest max-abs deviation of encode_miniset over the supplied orderings
/// relative to the identity ordering.
double permutation_deviation(const encoder::SetEncoder& encoder, const std::vector<encoder::EncoderInput>& inputs,
                             const std::vector<std::vector<std::size_t>>& orderings);

/// All n! orderings of 0..n-1 in lexicographic order.
std::vector<std::vector<std::size_t>> all_orderings(std::size_t n);

}  // namespace qmlc::oracles
