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
#include <cmath>

#include "qmlc/circuit/circuit_text.hpp"
#include "qmlc/circuit/embedding.hpp"
#include "qmlc/circuit/token_grid.hpp"
#include "qmlc/common/errors.hpp"
#include "qmlc/common/rng.hpp"
#include "qmlc/device/dataset.hpp"
#include "qmlc/device/stabilizer.hpp"
#include "qmlc/label/label_nets.hpp"
#include "qmlc/label/transforms.hpp"

using namespace qmlc;
using namespace qmlc::label;

namespace {

RealVector vec(std::initializer_list<double> v) {
  RealVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

double max_abs(const RealVector& a, const RealVector& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Toy 1-qubit corpus of (grid, noisy label) pairs.
std::vector<LabelSample> toy_corpus(int depth, const circuit::GateVocab& vocab, const circuit::GateEmbedding& emb) {
  device::DatasetConfig cfg;
  cfg.num_qubits = 1;
  cfg.germs = {circuit::parse_circuit("Q=1;x90@0"), circuit::parse_circuit("Q=1;y90@0"),
               circuit::parse_circuit("Q=1;_"), circuit::parse_circuit("Q=1;x90@0;y90@0")};
  cfg.powers = {1, 2, 3, 4, 5, 6, 7, 8};
  cfg.max_depth = depth;
  cfg.noise = device::NoiseModel::preset("deviceA", 1);
  cfg.shots = 2000;
  cfg.seed = 5;
  std::vector<LabelSample> out;
  for (const auto& r : device::generate_germ_dataset(cfg).records) {
    const auto g = circuit::embed_grid(circuit::tokenize_circuit(r.circuit, vocab, depth), emb);
    out.push_back({g.flattened().row(0).transpose(), normalize_counts(r.counts)});
  }
  return out;
}

}  // namespace

TEST_CASE("normalize_counts") {
  CHECK(max_abs(normalize_counts({5, 5, 0, 0}), vec({0.5, 0.5, 0, 0})) == 0.0);
  CHECK(max_abs(normalize_counts({100, 0}), vec({1, 0})) == 0.0);
  CHECK(max_abs(normalize_counts({1, 2, 3, 4}), vec({0.1, 0.2, 0.3, 0.4})) <= 1e-15);
  CHECK_THROWS_AS(normalize_counts({0, 0}), EmptyCountsError);
}

TEST_CASE("transform_logit") {
  const RealVector t = transform_logit(vec({0.5, 0.0, 1.0}));
  CHECK(t(0) == 0.0);
  const double expect = std::log(1e-6 / (1.0 + 1e-6));
  CHECK(std::abs(t(1) - expect) <= 1e-12);
  CHECK(std::abs(t(1) + 13.8155) <= 1e-4);
  CHECK(std::abs(t(2) + t(1)) <= 1e-12);
  Rng rng = make_rng(1, 0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    double a = u(rng), b = u(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    CHECK(transform_logit(vec({a}))(0) < transform_logit(vec({b}))(0));
  }
}

TEST_CASE("transform_wht") {
  CHECK(max_abs(transform_wht(vec({0.5, 0.5})), vec({1, 0})) <= 1e-15);
  CHECK(max_abs(transform_wht(vec({1, 0})), vec({1, 1})) <= 1e-15);
  CHECK(max_abs(transform_wht(vec({0.25, 0.25, 0.25, 0.25})), vec({1, 0, 0, 0})) <= 1e-15);
  CHECK_THROWS_AS(transform_wht(vec({0.2, 0.3, 0.5})), DimensionError);
  Rng rng = make_rng(2, 0);
  for (int i = 0; i < 50; ++i) {
    RealVector y = RealVector::NullaryExpr(8, [&] { return std::uniform_real_distribution<double>(0, 1)(rng); });
    y /= y.sum();
    CHECK(max_abs(transform_wht(transform_wht(y)), 8.0 * y) <= 1e-9);
    CHECK(std::abs(transform_wht(y)(0) - 1.0) <= 1e-12);
  }
}

TEST_CASE("wht parity on ideal clifford outputs") {
  const circuit::GateKind gates[] = {circuit::GateKind::X90, circuit::GateKind::Y90, circuit::GateKind::CX};
  Rng rng = make_rng(3, 0);
  for (int q = 1; q <= 3; ++q) {
    for (int i = 0; i < 60; ++i) {
      const RealVector w = transform_wht(device::ideal_clifford_distribution(circuit::random_circuit(q, 12, gates, rng)));
      for (double v : w) CHECK(std::min({std::abs(v - 1.0), std::abs(v), std::abs(v + 1.0)}) <= 1e-9);
    }
  }
}

TEST_CASE("transform_fourier") {
  const RealVector t = transform_fourier(vec({0.0, 0.5, 1.0}), 3);
  REQUIRE(t.size() == 2 * 3 * 3);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(t(2 * j)) <= 1e-15);
    CHECK(std::abs(t(2 * j + 1) - 1.0) <= 1e-15);
  }
  CHECK(std::abs(t(6) - 1.0) <= 1e-15);
  CHECK(std::abs(t(7)) <= 1e-15);
  CHECK(std::abs(t(12 + 2)) <= 1e-12);
  CHECK(std::abs(t(12 + 3) - 1.0) <= 1e-12);
  CHECK(transformed_dim(4, {TransformKind::Fourier, 1e-6, 3}) == 24);
  CHECK(transformed_dim(4, {TransformKind::Wht, 1e-6, 3}) == 4);
  CHECK(transform_from_name("wht") == TransformKind::Wht);
  CHECK_THROWS_AS(transform_from_name("haar"), ValidationError);
}

TEST_CASE("project_to_simplex") {
  CHECK(max_abs(project_to_simplex(vec({0.6, -0.1, 0.5})), vec({0.6 / 1.1, 0.0, 0.5 / 1.1})) <= 1e-15);
  CHECK(max_abs(project_to_simplex(vec({-1, -2})), vec({0.5, 0.5})) == 0.0);
}

TEST_CASE("build_covariance") {
  const RealVector zero = build_covariance(RealVector::Zero(12));
  CHECK(max_abs(zero, RealVector::Ones(12)) <= 1e-12);
  Rng rng = make_rng(4, 0);
  for (int i = 0; i < 100; ++i) {
    const RealVector h = 20.0 * RealVector::NullaryExpr(40, [&] { return std::normal_distribution<double>()(rng); });
    const RealVector c = build_covariance(h);
    CHECK(c.minCoeff() >= kCovarianceFloor);
    CHECK(std::abs(c.mean() - 1.0) <= 1e-9);
  }
  RealVector bad = RealVector::Zero(3);
  bad(1) = std::nan("");
  CHECK_THROWS_AS(build_covariance(bad), NumericError);
}

TEST_CASE("label embeddings: shape, determinism, boundaries") {
  const int d_circuit = 1 * 6 * 4, d_model = 16;
  LabelPipeline p(d_circuit, 2, d_model, 32, 5, {}, 7);
  const RealVector y = vec({1.0, 0.0});
  const auto c = p.condition(y);
  CHECK(c.h_short.size() == d_model);
  CHECK(c.h_long.size() == d_circuit);
  CHECK(c.cov.size() == d_circuit);
  CHECK(c.h_long.allFinite());
  CHECK(c.h_short.allFinite());
  CHECK(p.condition(y).h_short == c.h_short);
  CHECK(p.condition(y).h_long == c.h_long);
  CHECK_THROWS_AS(p.embed_short(vec({0.1, 0.2, 0.3})), DimensionError);
  CHECK(p.short_chain().net1().hidden_layers() >= 5);
  CHECK(p.long_chain().net3().hidden_layers() >= 5);
}

TEST_CASE("label consistency training on a toy 1-qubit corpus") {
  const int depth = 8;
  const auto vocab = circuit::GateVocab::from_names({"x90", "y90", "idle", "pad"});
  const auto emb = circuit::make_orthonormal_embedding(4, 4, 1);
  auto data = toy_corpus(depth, vocab, emb);
  std::vector<LabelSample> held;
  for (std::size_t i = 0; i < data.size(); i += 5) held.push_back(data[i]);
  std::vector<LabelSample> train;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (i % 5) train.push_back(data[i]);
  }
  LabelPipeline p(depth * 4, 2, 16, 48, 5, {}, 3);
  LabelTrainConfig cfg;
  cfg.stage1_epochs = 150;
  cfg.stage2_epochs = 150;
  cfg.batch = 8;
  cfg.lr = 2e-3;
  cfg.seed = 11;
  const auto rep = train_label_consistency(p, train, cfg);
  REQUIRE(rep.stage2_loss.size() == 150);
  auto head_tail = [](const std::vector<double>& v) {
    double a = 0, b = 0;
    for (std::size_t i = 0; i < 20; ++i) a += v[i], b += v[v.size() - 1 - i];
    return std::make_pair(a, b);
  };
  CHECK(head_tail(rep.stage1_loss).second < head_tail(rep.stage1_loss).first);
  CHECK(head_tail(rep.stage2_loss).second < head_tail(rep.stage2_loss).first);
  std::vector<double> err;
  for (const auto& s : held) {
    const RealVector y = project_to_simplex(s.y);
    err.push_back((p.short_chain().reconstruct(y) - y).norm());
  }
  std::sort(err.begin(), err.end());
  CHECK(err[err.size() / 2] < 0.05);

  // The logit transform stretches coordinates near the simplex boundary.
  const double delta = 1e-3;
  const double near_zero = (p.condition(vec({delta, 1 - delta})).h_short - p.condition(vec({0, 1})).h_short).norm();
  const double near_half =
      (p.condition(vec({0.5 + delta, 0.5 - delta})).h_short - p.condition(vec({0.5, 0.5})).h_short).norm();
  CHECK(near_zero > near_half);
}

TEST_CASE("sigma zero trains on clean reconstruction") {
  const auto vocab = circuit::GateVocab::from_names({"x90", "y90", "idle", "pad"});
  const auto emb = circuit::make_orthonormal_embedding(4, 4, 1);
  const auto data = toy_corpus(4, vocab, emb);
  LabelTrainConfig cfg;
  cfg.sigma = 0.0;
  cfg.stage1_epochs = 5;
  cfg.stage2_epochs = 5;
  LabelPipeline a(16, 2, 8, 16, 5, {}, 3);
  LabelPipeline b(16, 2, 8, 16, 5, {}, 3);
  cfg.seed = 1;
  const auto ra = train_label_consistency(a, data, cfg);
  const auto rb = train_label_consistency(b, data, cfg);
  CHECK(ra.stage2_loss == rb.stage2_loss);
  for (double v : ra.stage2_loss) CHECK(std::isfinite(v));
}
