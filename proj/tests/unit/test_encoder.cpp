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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "gradcheck.hpp"
#include "qmlc/circuit/circuit.hpp"
#include "qmlc/circuit/embedding.hpp"
#include "qmlc/circuit/token_grid.hpp"
#include "qmlc/common/errors.hpp"
#include "qmlc/common/rng.hpp"
#include "qmlc/encoder/set_encoder.hpp"

using namespace qmlc;
using namespace qmlc::encoder;

namespace {

struct Fixture {
  circuit::GateVocab vocab = circuit::GateVocab::standard();
  circuit::GateEmbedding emb = circuit::make_orthonormal_embedding(5, 5, 3);

  EncoderConfig config(int q, int t, int d = 16) const {
    EncoderConfig c;
    c.num_qubits = q;
    c.depth = t;
    c.d_gate = 5;
    c.d_model = d;
    c.layers = 2;
    c.heads = 2;
    c.inducing = 8;
    c.seeds = 4;
    return c;
  }

  SetEncoder encoder(int q, int t, std::uint64_t seed = 1) const {
    return SetEncoder(config(q, t), emb.row(vocab.pad_token()).transpose(), seed);
  }

  std::vector<EncoderInput> inputs(int q, int t, int n, std::uint64_t seed) const {
    const circuit::GateKind gates[] = {circuit::GateKind::X90, circuit::GateKind::Y90, circuit::GateKind::CX};
    Rng rng = make_rng(seed, 0);
    std::vector<EncoderInput> out;
    for (int i = 0; i < n; ++i) {
      const auto c = circuit::random_circuit(q, 1 + static_cast<int>(rng() % static_cast<unsigned>(t)), gates, rng);
      RealVector h = RealVector::NullaryExpr(16, [&] { return std::normal_distribution<double>()(rng); });
      out.push_back({circuit::embed_grid(circuit::tokenize_circuit(c, vocab, t), emb), h});
    }
    return out;
  }
};

nn::Var row_var(const RealVector& v) { return nn::constant(v.transpose()); }

double max_abs(const nn::Matrix& a, const nn::Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("patch counts and shapes") {
  Fixture f;
  CHECK(f.config(2, 20).num_patches() == 10);
  CHECK(f.config(2, 2).num_patches() == 1);
  CHECK(f.config(3, 5).num_patches() == 6);
  const auto enc = f.encoder(2, 20);
  const auto in = f.inputs(2, 20, 1, 4);
  const auto tokens = enc.patch_embed(in[0].grid);
  CHECK(tokens.rows() == 10);
  CHECK(tokens.cols() == 16);
}

TEST_CASE("patches flatten qubit-major then time, padding odd grids") {
  Fixture f;
  const auto enc = f.encoder(1, 3);
  circuit::TokenGrid g(1, 3, f.vocab.pad_token());
  g.set(0, 0, 1);
  g.set(0, 1, 2);
  g.set(0, 2, 3);
  const auto grid = circuit::embed_grid(g, f.emb);
  const nn::Matrix p = enc.extract_patches(grid);
  REQUIRE(p.rows() == 2);
  REQUIRE(p.cols() == 20);
  const RealVector pad = f.emb.row(5).transpose();
  CHECK(max_abs(p.block(0, 0, 1, 5), f.emb.row(1)) == 0.0);
  CHECK(max_abs(p.block(0, 5, 1, 5), f.emb.row(2)) == 0.0);
  CHECK(max_abs(p.block(0, 10, 1, 5), pad.transpose()) == 0.0);
  CHECK(max_abs(p.block(1, 0, 1, 5), f.emb.row(3)) == 0.0);
  CHECK(max_abs(p.block(1, 5, 1, 5), pad.transpose()) == 0.0);
}

TEST_CASE("encode_pair shape, determinism, label flow") {
  Fixture f;
  const auto enc = f.encoder(2, 6);
  const auto in = f.inputs(2, 6, 1, 5)[0];
  const auto a = enc.encode_pair(in.grid, row_var(in.h_short));
  CHECK(a.lrn.cols() == 16);
  CHECK(a.lbl.cols() == 16);
  CHECK(enc.encode_pair(in.grid, row_var(in.h_short)).lrn.value() == a.lrn.value());
  const auto masked = enc.encode_pair(in.grid, row_var(in.h_short), true);
  CHECK(max_abs(masked.lrn.value(), a.lrn.value()) > 1e-6);
  const auto other = enc.encode_pair(in.grid, row_var(in.h_short * 2.0 + RealVector::Ones(16)));
  CHECK(max_abs(other.lrn.value(), a.lrn.value()) > 1e-6);
  CHECK_THROWS_AS(enc.encode_pair(in.grid, nn::constant(nn::Matrix::Zero(1, 7))), DimensionError);
}

TEST_CASE("pool_set contracts") {
  Fixture f;
  const auto enc = f.encoder(2, 4);
  Rng rng = make_rng(6, 0);
  const nn::Matrix h = nn::gaussian_matrix(9, 16, 1.0, rng);
  const auto out = enc.pool_set(nn::constant(h));
  CHECK(out.rows() == 4);
  CHECK(out.cols() == 16);
  nn::Matrix hp = h;
  std::vector<int> perm(9);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  for (int i = 0; i < 9; ++i) hp.row(i) = h.row(perm[static_cast<std::size_t>(i)]);
  CHECK(max_abs(enc.pool_set(nn::constant(hp)).value(), out.value()) < 1e-5);
  CHECK(enc.pool_set(nn::constant(h.topRows(1))).value().allFinite());
  CHECK_THROWS_AS(enc.pool_set(nn::constant(nn::Matrix::Zero(0, 16))), EmptySetError);
}

TEST_CASE("encode_miniset: exhaustive permutations for n <= 5") {
  Fixture f;
  const auto enc = f.encoder(2, 6);
  for (int n = 1; n <= 5; ++n) {
    const auto in = f.inputs(2, 6, n, 10 + static_cast<std::uint64_t>(n));
    const nn::Matrix base = enc.encode_miniset(in).value();
    CHECK(base.cols() == 4 * 16);
    std::vector<std::size_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    double worst = 0.0;
    do {
      std::vector<EncoderInput> shuffled;
      for (auto i : order) shuffled.push_back(in[i]);
      worst = std::max(worst, max_abs(enc.encode_miniset(shuffled).value(), base));
    } while (std::next_permutation(order.begin(), order.end()));
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("encode_miniset: random permutations for n = 64, multiset semantics, errors") {
  Fixture f;
  const auto enc = f.encoder(1, 4);
  const auto in = f.inputs(1, 4, 64, 20);
  const nn::Matrix base = enc.encode_miniset(in).value();
  Rng rng = make_rng(21, 0);
  for (int r = 0; r < 5; ++r) {
    auto shuffled = in;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(max_abs(enc.encode_miniset(shuffled).value(), base) < 1e-5);
  }
  const std::vector<EncoderInput> one{in[0]};
  const std::vector<EncoderInput> two{in[0], in[0]};
  const std::vector<EncoderInput> mixed{in[0], in[1]};
  const std::vector<EncoderInput> weighted{in[0], in[0], in[1]};
  // Multiplicities matter unless every element is repeated equally often.
  CHECK(max_abs(enc.encode_miniset(mixed).value(), enc.encode_miniset(weighted).value()) > 1e-9);
  CHECK(max_abs(enc.encode_miniset(one).value(), enc.encode_miniset(two).value()) < 1e-9);
  CHECK_THROWS_AS(enc.encode_miniset({}), EmptySetError);
  const auto q2 = f.inputs(2, 4, 1, 22);
  CHECK_THROWS_AS(enc.encode_miniset({in[0], q2[0]}), SetError);
}

TEST_CASE("encode_miniset gradients match finite differences") {
  Fixture f;
  auto enc = f.encoder(2, 4);
  const auto in = f.inputs(2, 4, 3, 30);
  Rng rng = make_rng(31, 0);
  const nn::Matrix w = nn::gaussian_matrix(1, 64, 1.0, rng);
  const auto res = qmlc::testing::grad_check(
      enc.parameters(), [&] { return nn::sum(nn::mul(enc.encode_miniset(in), nn::constant(w))); }, 10, 32);
  CHECK(res.checked == 10);
  CHECK(res.max_rel_err <= 1e-3);
}

TEST_CASE("ISAB cost grows linearly in n") {
  Rng rng = make_rng(40, 0);
  const nn::InducedSetAttention isab(32, 4, 32, 64, rng);
  const std::vector<int> ns{32, 64, 128, 256};
  std::vector<double> times;
  for (int n : ns) {
    const nn::Var x = nn::constant(nn::gaussian_matrix(n, 32, 1.0, rng));
    double best = 1e9;
    for (int rep = 0; rep < 7; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      nn::NoGradGuard guard;
      for (int k = 0; k < 5; ++k) (void)isab.forward(x);
      const auto t1 = std::chrono::steady_clock::now();
      best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    times.push_back(best);
  }
  // Least-squares fit t = a + b n; every point within 30% of the line.
  const double mx = std::accumulate(ns.begin(), ns.end(), 0.0) / 4.0;
  const double my = std::accumulate(times.begin(), times.end(), 0.0) / 4.0;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    sxy += (ns[i] - mx) * (times[i] - my);
    sxx += (ns[i] - mx) * (ns[i] - mx);
  }
  const double b = sxy / sxx, a = my - b * mx;
  CHECK(b > 0.0);
  for (std::size_t i = 0; i < 4; ++i) {
    CAPTURE(ns[i]);
    CAPTURE(times[i]);
    CHECK(std::abs(times[i] - (a + b * ns[i])) <= 0.3 * times[i]);
  }
  CHECK(times[3] / times[2] <= 2.0 * 1.3);
}
