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

#include "qmlc/label/label_nets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qmlc/common/errors.hpp"
#include "qmlc/nn/optim.hpp"

namespace qmlc::label {

RealVector build_covariance(const RealVector& h_long, double floor) {
  if (!h_long.allFinite()) throw NumericError("build_covariance: non-finite label embedding");
  RealVector d = h_long.unaryExpr([](double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); });
  const double m = d.mean();
  if (!(m > 0.0)) return RealVector::Ones(h_long.size());
  return (d / m).array() * (1.0 - floor) + floor;
}

namespace {

std::vector<int> mlp_dims(int in, int hidden, int depth, int out) {
  std::vector<int> dims{in};
  for (int i = 0; i < depth; ++i) dims.push_back(hidden);
  dims.push_back(out);
  return dims;
}

nn::Matrix as_row(const RealVector& v) { return v.transpose(); }

}  // namespace

LabelChain::LabelChain(const LabelNetConfig& cfg, Rng& rng)
    : cfg_(cfg),
      t1_(mlp_dims(cfg.grid_dim, cfg.hidden, cfg.depth, cfg.embed_dim), nn::Activation::Gelu, rng),
      t2_(mlp_dims(cfg.embed_dim, cfg.hidden, cfg.depth, cfg.label_dim), nn::Activation::Gelu, rng),
      t3_(mlp_dims(transformed_dim(cfg.label_dim, cfg.transform), cfg.hidden, cfg.depth, cfg.embed_dim),
          nn::Activation::Gelu, rng) {}

RealVector LabelChain::embed(const RealVector& transformed) const {
  nn::NoGradGuard guard;
  return t3_.forward(nn::constant(as_row(transformed))).value().row(0).transpose();
}

RealVector LabelChain::reconstruct(const RealVector& y) const {
  nn::NoGradGuard guard;
  const auto h = t3(nn::constant(as_row(apply_transform(y, cfg_.transform))));
  return t2(h).value().row(0).transpose();
}

void LabelChain::visit_parameters(const std::string& prefix, const nn::ParamVisitor& fn) {
  t1_.visit_parameters(prefix + "t1.", fn);
  t2_.visit_parameters(prefix + "t2.", fn);
  t3_.visit_parameters(prefix + "t3.", fn);
}

LabelPipeline::LabelPipeline(int grid_dim, int label_dim, int d_model, int hidden, int depth,
                             TransformConfig transform, std::uint64_t seed) {
  Rng rng_short = make_rng(seed, 0);
  Rng rng_long = make_rng(seed, 1);
  short_ = LabelChain({grid_dim, label_dim, d_model, hidden, depth, transform}, rng_short);
  long_ = LabelChain({grid_dim, label_dim, grid_dim, hidden, depth, transform}, rng_long);
}

LabelCondition LabelPipeline::condition(const RealVector& y) const {
  if (y.size() != label_dim()) throw DimensionError("label length does not match the pipeline");
  LabelCondition c;
  c.y = project_to_simplex(y);
  const RealVector t = apply_transform(c.y, transform());
  c.h_short = short_.embed(t);
  c.h_long = long_.embed(t);
  c.cov = build_covariance(c.h_long);
  return c;
}

void LabelPipeline::visit_parameters(const std::string& prefix, const nn::ParamVisitor& fn) {
  short_.visit_parameters(prefix + "short.", fn);
  long_.visit_parameters(prefix + "long.", fn);
}

namespace {

std::vector<nn::Var> chain_params(LabelChain& c, bool stage1) {
  std::vector<nn::Var> out;
  if (stage1) {
    for (auto& p : c.net1().parameters()) out.push_back(p);
    for (auto& p : c.net2().parameters()) out.push_back(p);
  } else {
    for (auto& p : c.net3().parameters()) out.push_back(p);
  }
  return out;
}

void check_finite(double loss, const char* stage, int epoch, std::size_t batch_start) {
  if (!std::isfinite(loss)) {
    throw TrainingError(std::string("label consistency ") + stage + " diverged at epoch " +
                        std::to_string(epoch) + ", batch starting at sample " +
                        std::to_string(batch_start));
  }
}

}  // namespace

LabelTrainReport train_label_consistency(LabelPipeline& pipeline,
                                         const std::vector<LabelSample>& data,
                                         const LabelTrainConfig& cfg) {
  if (data.empty()) throw TrainingError("label consistency training needs data");
  const int grid_dim = pipeline.d_circuit();
  const int label_dim = pipeline.label_dim();
  for (const auto& s : data) {
    if (s.grid.size() != grid_dim || s.y.size() != label_dim) {
      throw DimensionError("label training sample has the wrong shape");
    }
  }
  LabelTrainReport report;
  Rng rng = make_rng(cfg.seed, 7);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = static_cast<std::size_t>(std::max(1, cfg.batch));
  LabelChain* chains[2] = {&pipeline.short_chain(), &pipeline.long_chain()};
  const TransformConfig tcfg = pipeline.transform();

  auto gather = [&](std::size_t start, std::size_t count, bool grids) {
    nn::Matrix m(static_cast<Eigen::Index>(count), grids ? grid_dim : label_dim);
    for (std::size_t i = 0; i < count; ++i) {
      const auto& s = data[order[start + i]];
      const RealVector v = grids ? s.grid : project_to_simplex(s.y);
      m.row(static_cast<Eigen::Index>(i)) = v.transpose();
    }
    return m;
  };

  {
    std::vector<nn::Var> params;
    for (auto* c : chains) {
      for (auto& p : chain_params(*c, true)) params.push_back(p);
    }
    nn::Adam opt(params, {.lr = cfg.lr});
    for (int epoch = 0; epoch < cfg.stage1_epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      double total = 0.0;
      int batches = 0;
      for (std::size_t start = 0; start < order.size(); start += batch) {
        const std::size_t count = std::min(batch, order.size() - start);
        const nn::Var x = nn::constant(gather(start, count, true));
        const nn::Var y = nn::constant(gather(start, count, false));
        opt.zero_grad();
        nn::Var loss;
        for (auto* c : chains) {
          nn::Var part = nn::scale(nn::sum_squares(nn::sub(c->t2(c->t1(x)), y)),
                                   1.0 / static_cast<double>(count));
          loss = loss.defined() ? nn::add(loss, part) : part;
        }
        check_finite(loss.scalar(), "stage 1", epoch, start);
        nn::backward(loss);
        opt.step();
        total += loss.scalar();
        ++batches;
      }
      report.stage1_loss.push_back(total / batches);
    }
  }

  {
    std::vector<nn::Var> params;
    for (auto* c : chains) {
      for (auto& p : chain_params(*c, false)) params.push_back(p);
    }
    nn::Adam opt(params, {.lr = cfg.lr});
    std::normal_distribution<double> noise(0.0, cfg.sigma);
    for (int epoch = 0; epoch < cfg.stage2_epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      double total = 0.0;
      int batches = 0;
      for (std::size_t start = 0; start < order.size(); start += batch) {
        const std::size_t count = std::min(batch, order.size() - start);
        nn::Matrix target(static_cast<Eigen::Index>(count), label_dim);
        nn::Matrix input(static_cast<Eigen::Index>(count), transformed_dim(label_dim, tcfg));
        for (std::size_t i = 0; i < count; ++i) {
          RealVector y = data[order[start + i]].y;
          if (cfg.sigma > 0.0) {
            for (Eigen::Index j = 0; j < y.size(); ++j) y(j) += noise(rng);
          }
          y = project_to_simplex(y);
          target.row(static_cast<Eigen::Index>(i)) = y.transpose();
          input.row(static_cast<Eigen::Index>(i)) = apply_transform(y, tcfg).transpose();
        }
        const nn::Var x = nn::constant(input);
        const nn::Var y = nn::constant(target);
        opt.zero_grad();
        nn::Var loss;
        for (auto* c : chains) {
          nn::Var part = nn::scale(nn::sum_squares(nn::sub(c->t2(c->t3(x)), y)),
                                   1.0 / static_cast<double>(count));
          loss = loss.defined() ? nn::add(loss, part) : part;
        }
        check_finite(loss.scalar(), "stage 2", epoch, start);
        nn::backward(loss);
        opt.step();
        total += loss.scalar();
        ++batches;
      }
      report.stage2_loss.push_back(total / batches);
    }
  }
  return report;
}

}  // namespace qmlc::label
