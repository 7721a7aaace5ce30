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

#include "qmlc/oracles/oracles.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <set>

#include "qmlc/circuit/circuit.hpp"
#include "qmlc/common/errors.hpp"
#include "qmlc/curriculum/grouping.hpp"
#include "qmlc/device/density_matrix.hpp"
#include "qmlc/device/noise_model.hpp"
#include "qmlc/device/stabilizer.hpp"

namespace qmlc::oracles {

namespace {

bool affine_closed(std::uint32_t subset, int points) {
  for (int a = 0; a < points; ++a) {
    if (!((subset >> a) & 1U)) continue;
    for (int b = 0; b < points; ++b) {
      if (!((subset >> b) & 1U)) continue;
      for (int c = 0; c < points; ++c) {
        if (!((subset >> c) & 1U)) continue;
        if (!((subset >> (a ^ b ^ c)) & 1U)) return false;
      }
    }
  }
  return true;
}

std::vector<std::uint64_t> enumerate(int n, bool through_origin) {
  if (n < 0 || n > 4) throw DomainError("brute-force subspace enumeration supports 0 <= n <= 4");
  const int points = 1 << n;
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n + 1), 0);
  const std::uint64_t subsets = std::uint64_t{1} << points;
  for (std::uint64_t s = 1; s < subsets; ++s) {
    const auto subset = static_cast<std::uint32_t>(s);
    if (through_origin && !(subset & 1U)) continue;
    const int size = std::popcount(subset);
    if (!std::has_single_bit(static_cast<unsigned>(size))) continue;
    if (!affine_closed(subset, points)) continue;
    counts[static_cast<std::size_t>(std::countr_zero(static_cast<unsigned>(size)))]++;
  }
  return counts;
}

const circuit::GateKind kClifford[] = {circuit::GateKind::X90, circuit::GateKind::Y90, circuit::GateKind::CX};

}  // namespace

std::vector<std::uint64_t> enumerate_affine_subspaces(int n) { return enumerate(n, false); }
std::vector<std::uint64_t> enumerate_linear_subspaces(int n) { return enumerate(n, true); }

SaturationResult clifford_saturation(int num_qubits, std::size_t circuits, int depth, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0);
  std::set<std::vector<long long>> seen;
  SaturationResult r;
  r.circuits = circuits;
  for (std::size_t i = 0; i < circuits; ++i) {
    const auto c = circuit::random_circuit(num_qubits, depth, kClifford, rng);
    const auto p = device::ideal_clifford_distribution(c);
    if (seen.insert(curriculum::distinctness_key(p, num_qubits)).second) r.first_hit_of_last = i;
  }
  r.distinct = seen.size();
  return r;
}

AgreementResult stabilizer_agreement(int num_qubits, std::size_t circuits, int max_depth, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0);
  std::uniform_int_distribution<int> depth(0, max_depth);
  const auto ideal = device::NoiseModel::ideal(num_qubits);
  AgreementResult r;
  r.circuits = circuits;
  for (std::size_t i = 0; i < circuits; ++i) {
    const auto c = circuit::random_circuit(num_qubits, depth(rng), kClifford, rng);
    const RealVector a = device::apply_circuit(c, ideal);
    const RealVector b = device::ideal_clifford_distribution(c);
    r.max_tvd = std::max(r.max_tvd, 0.5 * (a - b).cwiseAbs().sum());
  }
  return r;
}

double permutation_deviation(const encoder::SetEncoder& encoder, const std::vector<encoder::EncoderInput>& inputs,
                             const std::vector<std::vector<std::size_t>>& orderings) {
  nn::NoGradGuard guard;
  const nn::Matrix base = encoder.encode_miniset(inputs).value();
  double worst = 0.0;
  for (const auto& order : orderings) {
    std::vector<encoder::EncoderInput> permuted;
    permuted.reserve(order.size());
    for (auto i : order) permuted.push_back(inputs.at(i));
    const nn::Matrix out = encoder.encode_miniset(permuted).value();
    worst = std::max(worst, (out - base).cwiseAbs().maxCoeff());
  }
  return worst;
}

std::vector<std::vector<std::size_t>> all_orderings(std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<std::size_t>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

}  // namespace qmlc::oracles
