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

#include <cmath>
#include <limits>

#include "gradcheck.hpp"
#include "qmlc/common/errors.hpp"
#include "qmlc/common/rng.hpp"
#include "qmlc/nn/autograd.hpp"
#include "qmlc/nn/layers.hpp"
#include "qmlc/nn/optim.hpp"

using namespace qmlc;
using namespace qmlc::nn;
using qmlc::testing::grad_check;

namespace {

Matrix randn(int r, int c, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0);
  return gaussian_matrix(r, c, 1.0, rng);
}

// Random fixed projection so every output coordinate matters.
Var probe(const Var& y, std::uint64_t seed) {
  return sum(mul(y, constant(randn(static_cast<int>(y.rows()), static_cast<int>(y.cols()), seed))));
}

}  // namespace

TEST_CASE("elementwise and matrix ops match finite differences") {
  Var a = leaf(randn(3, 4, 1));
  Var b = leaf(randn(4, 2, 2));
  Var c = leaf(randn(3, 4, 3));
  Var row = leaf(randn(1, 4, 4));
  const std::vector<std::pair<const char*, std::function<Var()>>> cases = {
      {"matmul", [&] { return probe(matmul(a, b), 10); }},
      {"add_sub", [&] { return probe(a + c - 0.5 * a, 11); }},
      {"add_row", [&] { return probe(add_row(a, row), 12); }},
      {"mul", [&] { return probe(mul(a, c), 13); }},
      {"transpose", [&] { return probe(transpose(a), 14); }},
      {"gelu", [&] { return probe(gelu(a), 15); }},
      {"silu", [&] { return probe(silu(a), 16); }},
      {"tanh", [&] { return probe(qmlc::nn::tanh(a), 17); }},
      {"softplus", [&] { return probe(softplus(a), 18); }},
      {"softmax", [&] { return probe(softmax_rows(a), 19); }},
      {"log_softmax", [&] { return probe(log_softmax_rows(a), 20); }},
      {"layer_norm", [&] { return probe(layer_norm_rows(a, row, c.rows() ? slice_rows(c, 0, 1) : c), 21); }},
      {"mean_sumsq", [&] { return mean(a) + sum_squares(c); }},
      {"concat_slice",
       [&] { return probe(slice_cols(concat_rows({a, c}), 1, 2), 22) + probe(concat_cols({a, c}), 23); }},
      {"reshape", [&] { return probe(reshape(a, 2, 6), 24); }},
  };
  for (const auto& [name, fn] : cases) {
    CAPTURE(name);
    const auto r = grad_check({a, b, c, row}, fn, 12, 99);
    CHECK(r.max_rel_err <= 1e-5);
  }
}

TEST_CASE("softmax masking with -inf") {
  Matrix m(2, 3);
  const double inf = std::numeric_limits<double>::infinity();
  m << 1.0, -inf, 2.0, -inf, -inf, -inf;
  const Matrix s = softmax_rows(constant(m)).value();
  CHECK(s(0, 1) == 0.0);
  CHECK(std::abs(s.row(0).sum() - 1.0) <= 1e-12);
  CHECK(std::abs(s(1, 0) - 1.0 / 3.0) <= 1e-12);
}

TEST_CASE("gradients: interior freed, leaves accumulate") {
  Var w = leaf(randn(2, 2, 5));
  nn::backward(sum(w));
  nn::backward(sum(w));
  CHECK((w.grad().array() == 2.0).all());
  w.zero_grad();
  CHECK((w.grad().array() == 0.0).all());
  {
    NoGradGuard guard;
    CHECK_FALSE(grad_enabled());
    Var y = sum(w);
    CHECK_FALSE(y.requires_grad());
  }
  CHECK(grad_enabled());
}

TEST_CASE("layers match finite differences") {
  Rng rng = make_rng(6, 0);
  Linear lin(5, 3, rng);
  Mlp mlp({5, 8, 8, 3}, Activation::Silu, rng);
  MultiHeadAttention mha(8, 2, rng);
  AttentionBlock blk(8, 2, 16, rng);
  InducedSetAttention isab(8, 2, 4, 16, rng);
  AttentionPooling pma(8, 2, 3, 16, rng);
  const Var x5 = constant(randn(4, 5, 7));
  const Var x8 = constant(randn(6, 8, 8));
  const Var y8 = constant(randn(3, 8, 9));
  CHECK(grad_check(lin.parameters(), [&] { return probe(lin.forward(x5), 30); }, 10, 1).max_rel_err <= 1e-5);
  CHECK(grad_check(mlp.parameters(), [&] { return probe(mlp.forward(x5), 31); }, 10, 2).max_rel_err <= 1e-5);
  CHECK(grad_check(mha.parameters(), [&] { return probe(mha.forward(x8, y8), 32); }, 10, 3).max_rel_err <= 1e-4);
  CHECK(grad_check(blk.parameters(), [&] { return probe(blk.forward(x8), 33); }, 10, 4).max_rel_err <= 1e-4);
  CHECK(grad_check(isab.parameters(), [&] { return probe(isab.forward(x8), 34); }, 10, 5).max_rel_err <= 1e-4);
  CHECK(grad_check(pma.parameters(), [&] { return probe(pma.forward(x8), 35); }, 10, 6).max_rel_err <= 1e-4);
  CHECK(pma.forward(x8).rows() == 3);
  CHECK_THROWS_AS(Mlp({5, 8}, Activation::Gelu, rng).forward(constant(randn(1, 4, 1))), DimensionError);
}

TEST_CASE("attention mask blocks keys") {
  Rng rng = make_rng(7, 0);
  MultiHeadAttention mha(4, 2, rng);
  const Matrix q = randn(2, 4, 1);
  Matrix k = randn(3, 4, 2);
  Matrix mask = Matrix::Zero(2, 3);
  mask.col(2).setConstant(-std::numeric_limits<double>::infinity());
  const Matrix a = mha.forward(constant(q), constant(k), &mask).value();
  k.row(2) = randn(1, 4, 3);
  const Matrix b = mha.forward(constant(q), constant(k), &mask).value();
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pooling is permutation invariant") {
  Rng rng = make_rng(8, 0);
  InducedSetAttention isab(8, 2, 4, 16, rng);
  AttentionPooling pma(8, 2, 2, 16, rng);
  const Matrix x = randn(7, 8, 9);
  Matrix xp = x;
  xp.row(0).swap(xp.row(5));
  xp.row(2).swap(xp.row(6));
  const Matrix a = pma.forward(isab.forward(constant(x))).value();
  const Matrix b = pma.forward(isab.forward(constant(xp))).value();
  CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("state dict round trip and errors") {
  Rng rng = make_rng(9, 0);
  Mlp a({3, 4, 2}, Activation::Gelu, rng);
  Mlp b({3, 4, 2}, Activation::Gelu, rng);
  const Var x = constant(randn(2, 3, 1));
  CHECK_FALSE(a.forward(x).value() == b.forward(x).value());
  load_state_dict(b, state_dict(a));
  CHECK(a.forward(x).value() == b.forward(x).value());
  auto sd = state_dict(a, "m.");
  CHECK(sd.count("m.l0.weight") == 1);
  CHECK_THROWS_AS(load_state_dict(b, sd), IoError);
  Mlp c({3, 5, 2}, Activation::Gelu, rng);
  CHECK_THROWS_AS(load_state_dict(c, state_dict(a)), IoError);
  CHECK(a.num_parameters() == 3 * 4 + 4 + 4 * 2 + 2);
}

TEST_CASE("adam reduces a quadratic and rejects non-finite gradients") {
  Var w = leaf(randn(1, 3, 10));
  Adam opt({w}, {0.05, 0.9, 0.999, 1e-8, 0.0});
  const double start = w.value().squaredNorm();
  for (int i = 0; i < 200; ++i) {
    opt.zero_grad();
    nn::backward(sum_squares(w));
    opt.step();
  }
  CHECK(w.value().squaredNorm() < 1e-3 * start);
  opt.zero_grad();
  w.mutable_grad()(0, 0) = std::nan("");
  const Matrix before = w.value();
  CHECK(std::isnan(opt.step()));
  CHECK(w.value() == before);
}

TEST_CASE("adam clips the global norm") {
  Var w = leaf(Matrix::Zero(1, 2));
  Adam opt({w}, {1.0, 0.0, 0.0, 0.0, 1.0});
  w.mutable_grad() = Matrix::Constant(1, 2, 30.0);
  const double norm = opt.step();
  CHECK(std::abs(norm - std::sqrt(2.0) * 30.0) <= 1e-9);
  CHECK(std::abs(global_grad_norm({w}) - std::sqrt(2.0) * 30.0) <= 1e-9);
}
