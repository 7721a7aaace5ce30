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

#include "gradcheck.hpp"
#include "qmlc/circuit/circuit.hpp"
#include "qmlc/circuit/embedding.hpp"
#include "qmlc/circuit/token_grid.hpp"
#include "qmlc/common/errors.hpp"
#include "qmlc/common/rng.hpp"
#include "qmlc/device/stabilizer.hpp"
#include "qmlc/diffusion/networks.hpp"
#include "qmlc/diffusion/objectives.hpp"
#include "qmlc/diffusion/sampler.hpp"
#include "qmlc/diffusion/schedule.hpp"
#include "qmlc/label/transforms.hpp"

using namespace qmlc;
using namespace qmlc::diffusion;
using qmlc::testing::grad_check;

namespace {

const NoiseSchedule kSched{};

RealVector randn(int n, Rng& rng) {
  return RealVector::NullaryExpr(n, [&] { return std::normal_distribution<double>()(rng); });
}

void zero_parameters(nn::Module& m) {
  for (auto& p : m.parameters()) p.mutable_value().setZero();
}

double variance(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

// Small 1-qubit setup shared by the CTD and joint tests.
struct Toy {
  static constexpr int kQ = 1, kT = 4, kGate = 4, kModel = 8, kSeeds = 2;
  circuit::GateVocab vocab = circuit::GateVocab::from_names({"x90", "y90", "idle", "pad"});
  circuit::GateEmbedding emb = circuit::make_orthonormal_embedding(4, kGate, 2);
  label::LabelPipeline labels{kQ * kT * kGate, 2, kModel, 16, 5, {}, 3};
  encoder::SetEncoder encoder{make_encoder_config(), emb.row(4).transpose(), 4};
  GcdNet gcd{{kSeeds * kModel, 32, 2, 3}, 5};
  CtdNet ctd{{kQ, kT, kGate, kModel, kSeeds * kModel, 1, 2, 16, 3}, 6};

  static encoder::EncoderConfig make_encoder_config() {
    encoder::EncoderConfig c;
    c.num_qubits = kQ;
    c.depth = kT;
    c.d_gate = kGate;
    c.d_model = kModel;
    c.layers = 1;
    c.heads = 2;
    c.inducing = 4;
    c.seeds = kSeeds;
    return c;
  }

  std::vector<MinisetExample> batch(int sets, int size, std::uint64_t seed) const {
    const circuit::GateKind gates[] = {circuit::GateKind::X90, circuit::GateKind::Y90};
    Rng rng = make_rng(seed, 0);
    std::vector<MinisetExample> out;
    for (int s = 0; s < sets; ++s) {
      MinisetExample ex;
      for (int i = 0; i < size; ++i) {
        const auto c = circuit::random_circuit(kQ, 1 + static_cast<int>(rng() % kT), gates, rng);
        const auto grid = circuit::embed_grid(circuit::tokenize_circuit(c, vocab, kT), emb);
        const auto cond = labels.condition(device::ideal_clifford_distribution(c));
        ex.inputs.push_back({grid, cond.h_short});
        ex.x0.push_back(grid.flattened().row(0).transpose());
        ex.conds.push_back(cond);
      }
      out.push_back(std::move(ex));
    }
    return out;
  }

  std::vector<CtdTerm> terms(int n, std::uint64_t seed) const {
    auto b = batch(1, n, seed);
    Rng rng = make_rng(seed, 1);
    std::vector<CtdTerm> out;
    for (int i = 0; i < n; ++i) {
      out.push_back({b[0].x0[static_cast<std::size_t>(i)], b[0].conds[static_cast<std::size_t>(i)],
                     draw_noise(kQ * kT * kGate, rng)});
    }
    return out;
  }

  nn::Var context(std::uint64_t seed) const {
    Rng rng = make_rng(seed, 2);
    return nn::constant(randn(kSeeds * kModel, rng).transpose());
  }
};

}  // namespace

TEST_CASE("schedule values") {
  const auto mid = schedule_eval(0.5, kSched);
  CHECK(mid.gamma == 0.0);
  CHECK(mid.sigma2 == 0.5);
  CHECK(mid.alpha2 == 0.5);
  const auto end = schedule_eval(1.0, kSched);
  CHECK(std::abs(end.sigma2 - 1.0 / (1.0 + std::exp(-10.0))) <= 1e-15);
  CHECK(std::abs(end.sigma2 - 0.9999546) <= 1e-7);
  CHECK(end.dgamma == 20.0);
  Rng rng = make_rng(1, 0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double prev = -1e9;
  for (int i = 0; i < 1000; ++i) {
    const auto v = schedule_eval(u(rng), kSched);
    CHECK(std::abs(v.alpha2 + v.sigma2 - 1.0) <= 1e-12);
  }
  for (int i = 0; i <= 100; ++i) {
    const auto v = schedule_eval(i / 100.0, kSched);
    CHECK(v.gamma > prev);
    prev = v.gamma;
  }
  CHECK_THROWS_AS(schedule_eval(1.01, kSched), DomainError);
  CHECK_THROWS_AS(schedule_eval(-0.1, kSched), DomainError);
  CHECK_THROWS_AS((NoiseSchedule{1.0, -1.0}).validate(), ValidationError);
}

TEST_CASE("gcd_forward") {
  Rng rng = make_rng(2, 0);
  const RealVector z0 = randn(16, rng);
  const auto s = schedule_eval(0.3, kSched);
  CHECK((gcd_forward(z0, 0.3, RealVector::Zero(16), kSched) - s.alpha * z0).norm() == 0.0);
  const RealVector eps = randn(16, rng);
  const auto e = schedule_eval(1.0, kSched);
  CHECK(std::abs(e.alpha - 0.0067) <= 1e-4);
  CHECK((gcd_forward(z0, 1.0, eps, kSched) - eps).norm() <= e.alpha * z0.norm() + (1.0 - e.sigma) * eps.norm() + 1e-15);
  std::vector<double> samples;
  for (int i = 0; i < 10000; ++i) samples.push_back(gcd_forward(z0, 0.4, randn(16, rng), kSched)(3));
  CHECK(std::abs(variance(samples) / schedule_eval(0.4, kSched).sigma2 - 1.0) <= 0.03);
}

TEST_CASE("ctd_forward") {
  Rng rng = make_rng(3, 0);
  const RealVector x0 = randn(6, rng), eps = randn(6, rng);
  CHECK(ctd_forward(x0, 0.6, eps, RealVector::Ones(6), kSched) == gcd_forward(x0, 0.6, eps, kSched));
  RealVector cov = RealVector::Ones(6);
  cov(2) = 4.0;
  RealVector unit = RealVector::Zero(6);
  unit(2) = 1.0;
  const auto s = schedule_eval(0.6, kSched);
  CHECK(std::abs(ctd_forward(RealVector::Zero(6), 0.6, unit, cov, kSched)(2) - 2.0 * s.sigma) <= 1e-15);
  cov(4) = 0.0;
  CHECK_THROWS_AS(ctd_forward(x0, 0.6, eps, cov, kSched), CovarianceError);
}

TEST_CASE("forward variance preservation with anisotropic covariance") {
  Rng rng = make_rng(4, 0);
  RealVector cov(4);
  cov << 0.25, 1.0, 2.0, 3.5;
  RealVector x_sd(4);
  x_sd << 1.0, 0.5, 2.0, 0.1;
  for (double t : {0.25, 0.5, 0.9}) {
    std::vector<std::vector<double>> cols(4);
    for (int i = 0; i < 10000; ++i) {
      const RealVector x0 = x_sd.cwiseProduct(randn(4, rng));
      const RealVector xt = ctd_forward(x0, t, randn(4, rng), cov, kSched);
      for (int c = 0; c < 4; ++c) cols[static_cast<std::size_t>(c)].push_back(xt(c));
    }
    const auto s = schedule_eval(t, kSched);
    for (int c = 0; c < 4; ++c) {
      const double expect = s.alpha2 * x_sd(c) * x_sd(c) + s.sigma2 * cov(c);
      CAPTURE(t);
      CAPTURE(c);
      CHECK(std::abs(variance(cols[static_cast<std::size_t>(c)]) / expect - 1.0) <= 0.05);
    }
  }
}

TEST_CASE("gcd_loss closed forms") {
  GcdNet net({6, 8, 1, 2}, 1);
  zero_parameters(net);
  Rng rng = make_rng(5, 0);
  const nn::Matrix z0 = randn(6, rng).transpose();
  std::vector<NoiseDraw> draws{draw_noise(6, rng)};
  const double expect = 0.5 * (kSched.gamma_max - kSched.gamma_min) * draws[0].eps.squaredNorm();
  CHECK(std::abs(gcd_loss(net, nn::constant(z0), draws, kSched).scalar() - expect) <= 1e-12);
  draws[0].eps.setZero();
  CHECK(gcd_loss(net, nn::constant(z0), draws, kSched).scalar() == 0.0);
  // Mean of 0.5 * gamma' * ||eps||^2 tends to 0.5 * gamma' * d.
  std::vector<NoiseDraw> many;
  for (int i = 0; i < 4000; ++i) many.push_back(draw_noise(6, rng));
  const nn::Matrix zs = nn::Matrix::Zero(4000, 6);
  CHECK(std::abs(gcd_loss(net, nn::constant(zs), many, kSched).scalar() / (0.5 * 20.0 * 6.0) - 1.0) <= 0.03);
  GcdNet live({6, 8, 2, 2}, 2);
  for (int i = 0; i < 20; ++i) {
    std::vector<NoiseDraw> d{draw_noise(6, rng)};
    CHECK(gcd_loss(live, nn::constant(z0), d, kSched).scalar() >= 0.0);
  }
}

TEST_CASE("linear gaussian oracle minimises the gcd objective") {
  // x0 ~ N(0, 1) in one dimension at fixed t: E[eps | x_t] = sigma_t x_t.
  const double t = 0.5;
  const auto s = schedule_eval(t, kSched);
  Rng rng = make_rng(6, 0);
  const int n = 20000;
  nn::Matrix z0(n, 1);
  std::vector<NoiseDraw> draws;
  for (int i = 0; i < n; ++i) {
    z0(i, 0) = std::normal_distribution<double>()(rng);
    draws.push_back({t, randn(1, rng)});
  }
  GcdNet net({1, 1, 0, 1}, 3);
  auto loss_at = [&](double c) {
    zero_parameters(net);
    net.parameters()[0].mutable_value()(0, 0) = c * s.sigma;
    return gcd_loss(net, nn::constant(z0), draws, kSched).scalar();
  };
  const double best = loss_at(1.0);
  for (double c : {0.5, 0.8, 0.9, 0.95, 1.05, 1.1, 1.2, 1.5}) CHECK(best <= loss_at(c));
}

TEST_CASE("whitened loss closed forms") {
  Toy toy;
  zero_parameters(toy.ctd);
  auto terms = toy.terms(3, 7);
  const auto ctx = toy.context(1);
  for (auto& t : terms) t.cond.cov = RealVector::Ones(t.x0.size());
  NoiseSchedule sched;
  double expect = 0.0;
  for (const auto& t : terms) expect += 0.5 * 20.0 * t.draw.eps.squaredNorm();
  expect /= 3.0;
  const double iso = ctd_loss_whitened(toy.ctd, terms, ctx, sched).scalar();
  CHECK(std::abs(iso - expect) <= 1e-9);
  for (auto& t : terms) t.cond.cov = RealVector::Constant(t.x0.size(), 4.0);
  CHECK(std::abs(ctd_loss_whitened(toy.ctd, terms, ctx, sched).scalar() - iso / 4.0) <= 1e-9);
  for (auto& t : terms) t.draw.eps.setZero();
  CHECK(ctd_loss_whitened(toy.ctd, terms, ctx, sched).scalar() == 0.0);
}

TEST_CASE("whitened loss with H = I equals the isotropic residual") {
  Toy toy;
  auto terms = toy.terms(2, 8);
  for (auto& t : terms) t.cond.cov = RealVector::Ones(t.x0.size());
  const auto ctx = toy.context(2);
  double expect = 0.0;
  for (const auto& t : terms) {
    const RealVector xt = gcd_forward(t.x0, t.draw.t, t.draw.eps, kSched);
    const RealVector eh = toy.ctd.predict(nn::constant(xt.transpose()), t.draw.t,
                                          nn::constant(t.cond.h_short.transpose()), ctx)
                              .value()
                              .row(0)
                              .transpose();
    expect += 0.5 * schedule_eval(t.draw.t, kSched).dgamma * (eh - t.draw.eps).squaredNorm();
  }
  expect /= 2.0;
  CHECK(std::abs(ctd_loss_whitened(toy.ctd, terms, ctx, kSched).scalar() - expect) <= 1e-10 * expect);
}

TEST_CASE("hvidl reductions and gating") {
  Toy toy;
  const auto terms = toy.terms(6, 9);
  const auto ctx = toy.context(3);
  Rng r0 = make_rng(1, 0);
  HvidlStats st;
  const double whitened = ctd_loss_whitened(toy.ctd, terms, ctx, kSched).scalar();
  CHECK(hvidl_loss(toy.ctd, terms, ctx, toy.labels, {0.05, 0.0}, kSched, r0, {}, &st).scalar() == whitened);
  CHECK(st.used == 6);
  Rng r1 = make_rng(2, 0);
  HvidlStats all_out;
  const double gated = hvidl_loss(toy.ctd, terms, ctx, toy.labels, {1e-12, 0.05}, kSched, r1, {}, &all_out).scalar();
  CHECK(gated == 0.0);
  CHECK(all_out.gated_out == 6);
  CHECK_THROWS_AS((HvidlConfig{0.0, 0.01}).validate(), ValidationError);
  CHECK_THROWS_AS((HvidlConfig{0.1, -0.01}).validate(), ValidationError);
}

TEST_CASE("gated-out terms contribute exactly nothing") {
  Toy toy;
  const auto terms = toy.terms(8, 10);
  const auto ctx = toy.context(4);
  const HvidlConfig cfg{0.02, 0.015};
  auto run = [&](const std::vector<CtdTerm>& ts, HvidlStats* st) {
    Rng rng = make_rng(77, 0);
    return hvidl_loss(toy.ctd, ts, ctx, toy.labels, cfg, kSched, rng, {}, st).scalar();
  };
  HvidlStats st;
  const double base = run(terms, &st);
  REQUIRE(st.gated_out > 0);
  REQUIRE(st.used > 0);
  int unchanged = 0;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    auto moved = terms;
    moved[j].x0 = moved[j].x0 * 1.5 + RealVector::Constant(moved[j].x0.size(), 0.3);
    if (run(moved, nullptr) == base) ++unchanged;
  }
  CHECK(unchanged == st.gated_out);

  // All terms gated: zero gradient everywhere, confirmed by differences.
  const HvidlConfig closed{1e-12, 0.05};
  auto params = toy.ctd.parameters();
  for (auto& p : params) p.zero_grad();
  Rng rng = make_rng(5, 0);
  nn::backward(hvidl_loss(toy.ctd, terms, ctx, toy.labels, closed, kSched, rng));
  for (auto& p : params) CHECK((p.grad().size() == 0 || p.grad().cwiseAbs().maxCoeff() == 0.0));
  const auto fd = grad_check(params, [&] {
    Rng g = make_rng(5, 0);
    return hvidl_loss(toy.ctd, terms, ctx, toy.labels, closed, kSched, g);
  }, 10, 6);
  CHECK(fd.max_rel_err == 0.0);
}

TEST_CASE("loss gradients match finite differences") {
  Toy toy;
  Rng rng = make_rng(11, 0);
  const nn::Matrix z0 = nn::Matrix::NullaryExpr(3, Toy::kSeeds * Toy::kModel,
                                                [&] { return std::normal_distribution<double>()(rng); });
  std::vector<NoiseDraw> draws;
  for (int i = 0; i < 3; ++i) draws.push_back(draw_noise(Toy::kSeeds * Toy::kModel, rng));
  const auto g = grad_check(toy.gcd.parameters(), [&] { return gcd_loss(toy.gcd, nn::constant(z0), draws, kSched); },
                            10, 1);
  CHECK(g.max_rel_err <= 1e-3);
  const auto terms = toy.terms(3, 12);
  const auto ctx = toy.context(5);
  const auto w = grad_check(toy.ctd.parameters(), [&] { return ctd_loss_whitened(toy.ctd, terms, ctx, kSched); }, 10,
                            2);
  CHECK(w.max_rel_err <= 1e-3);
  const auto h = grad_check(toy.ctd.parameters(), [&] {
    Rng r = make_rng(9, 0);
    return hvidl_loss(toy.ctd, terms, ctx, toy.labels, {0.5, 0.01}, kSched, r);
  }, 10, 3);
  CHECK(h.max_rel_err <= 1e-3);
}

TEST_CASE("joint step bookkeeping and lambda = 0") {
  Toy toy;
  const auto batch = toy.batch(2, 3, 13);
  JointModels models{toy.encoder, toy.gcd, toy.ctd, toy.labels};
  std::vector<nn::Var> params = toy.encoder.parameters();
  for (auto& p : toy.gcd.parameters()) params.push_back(p);
  for (auto& p : toy.ctd.parameters()) params.push_back(p);
  nn::Adam opt(params, {});
  JointConfig cfg;
  cfg.lambda = 0.7;
  Rng rng = make_rng(14, 0);
  const auto rep = joint_train_step(batch, models, cfg, opt, kSched, rng);
  CHECK(rep.total == rep.gcd + 0.7 * rep.ctd);
  CHECK_FALSE(rep.skipped);

  std::vector<nn::Matrix> before;
  for (auto& p : toy.ctd.parameters()) before.push_back(p.value());
  const nn::Matrix enc_before = toy.encoder.parameters()[0].value();
  cfg.lambda = 0.0;
  nn::Adam fresh(params, {});
  const auto zero = joint_train_step(batch, models, cfg, fresh, kSched, rng);
  CHECK(zero.total == zero.gcd);
  auto after = toy.ctd.parameters();
  for (std::size_t i = 0; i < after.size(); ++i) CHECK(after[i].value() == before[i]);
  CHECK_FALSE(toy.encoder.parameters()[0].value() == enc_before);
}

TEST_CASE("joint training reduces the smoothed loss on a frozen toy set") {
  Toy toy;
  const auto batch = toy.batch(2, 3, 15);
  JointModels models{toy.encoder, toy.gcd, toy.ctd, toy.labels};
  std::vector<nn::Var> params = toy.encoder.parameters();
  for (auto& p : toy.gcd.parameters()) params.push_back(p);
  for (auto& p : toy.ctd.parameters()) params.push_back(p);
  nn::Adam opt(params, {3e-3, 0.9, 0.999, 1e-8, 10.0});
  JointConfig cfg;
  std::vector<double> totals;
  for (int step = 0; step < 200; ++step) {
    Rng rng = make_rng(16, static_cast<std::uint64_t>(step));
    totals.push_back(joint_train_step(batch, models, cfg, opt, kSched, rng).total);
  }
  double head = 0.0, tail = 0.0;
  for (int i = 0; i < 40; ++i) head += totals[static_cast<std::size_t>(i)], tail += totals[totals.size() - 1 - static_cast<std::size_t>(i)];
  CAPTURE(head / 40.0);
  CAPTURE(tail / 40.0);
  CHECK(tail <= 0.7 * head);
}

TEST_CASE("samplers: shape, determinism, isotropic reduction") {
  Toy toy;
  SamplerOptions opts{20, 3, 1.0};
  const RealVector z = sample_context(toy.gcd, kSched, opts);
  CHECK(z.size() == Toy::kSeeds * Toy::kModel);
  CHECK(sample_context(toy.gcd, kSched, opts) == z);
  const auto cond = toy.labels.condition(label::normalize_counts({3, 1}));
  const RealVector x = sample_tokens(toy.ctd, cond.h_short, z, cond.cov, kSched, opts);
  CHECK(x.size() == Toy::kQ * Toy::kT * Toy::kGate);
  CHECK(sample_tokens(toy.ctd, cond.h_short, z, cond.cov, kSched, opts) == x);
  const EpsPredictor pred = [](const RealVector& v, double t) { return RealVector(0.3 * v * t); };
  const RealVector ones = RealVector::Ones(5);
  const RealVector iso = ancestral_sample(5, pred, kSched, opts);
  CHECK(ancestral_sample(5, pred, kSched, opts, &ones) == iso);
  const RealVector ctd_iso = sample_tokens(toy.ctd, cond.h_short, z, RealVector::Ones(x.size()), kSched, opts);
  const EpsPredictor ctd_pred = [&](const RealVector& v, double t) -> RealVector {
    nn::NoGradGuard guard;
    return toy.ctd.predict(nn::constant(v.transpose()), t, nn::constant(cond.h_short.transpose()),
                           nn::constant(z.transpose()))
        .value()
        .row(0)
        .transpose();
  };
  CHECK(ancestral_sample(static_cast<int>(x.size()), ctd_pred, kSched, opts) == ctd_iso);
}

TEST_CASE("sampler recovers N(0, I) with the optimal predictor") {
  const EpsPredictor oracle = [](const RealVector& v, double t) {
    return RealVector(schedule_eval(t, kSched).sigma * v);
  };
  const int n = 10000;
  Eigen::MatrixXd samples(n, 2);
  for (int i = 0; i < n; ++i) {
    samples.row(i) = ancestral_sample(2, oracle, kSched, {1000, static_cast<std::uint64_t>(i), std::nullopt}).transpose();
  }
  const Eigen::RowVectorXd mean = samples.colwise().mean();
  const Eigen::MatrixXd centered = samples.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / (n - 1);
  CHECK(mean.cwiseAbs().maxCoeff() <= 0.05);
  CHECK(std::abs(cov(0, 0) - 1.0) <= 0.05);
  CHECK(std::abs(cov(1, 1) - 1.0) <= 0.05);
  CHECK(std::abs(cov(0, 1)) <= 0.05);
}
