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

#include "qmlc/diffusion/objectives.hpp"

#include <cmath>

#include "qmlc/common/errors.hpp"

namespace qmlc::diffusion {

NoiseDraw draw_noise(int dim, Rng& rng, double t_min) {
  std::uniform_real_distribution<double> ut(t_min, 1.0 - t_min);
  std::normal_distribution<double> normal(0.0, 1.0);
  NoiseDraw d{ut(rng), RealVector(dim)};
  for (int i = 0; i < dim; ++i) d.eps(i) = normal(rng);
  return d;
}

namespace {

void check_prediction(const nn::Var& pred, const char* what) {
  if (!pred.value().allFinite()) throw NumericError(std::string(what) + ": non-finite model prediction");
}

nn::Matrix row_of(const RealVector& v) { return v.transpose(); }

// gamma'(t)/2 * ||(eps_hat - eps) / sqrt(cov)||^2 for one record.
nn::Var whitened_term(const CtdNet& net, const RealVector& x0, const label::LabelCondition& cond,
                      const NoiseDraw& draw, const nn::Var& context, const NoiseSchedule& sched,
                      const ConditionFn& condition) {
  if (x0.size() != cond.cov.size() || x0.size() != draw.eps.size()) {
    throw DimensionError("CTD term: x0, eps and covariance differ in length");
  }
  const auto s = schedule_eval(draw.t, sched);
  const RealVector x_t = ctd_forward(x0, draw.t, draw.eps, cond.cov, sched);
  const nn::Var label = condition ? condition(cond) : nn::constant(row_of(cond.h_short));
  const nn::Var pred = net.predict(nn::constant(row_of(x_t)), draw.t, label, context);
  check_prediction(pred, "ctd");
  const nn::Matrix inv_sqrt = row_of(cond.cov.array().sqrt().inverse().matrix());
  const nn::Var resid = nn::mul(nn::sub(pred, nn::constant(row_of(draw.eps))), nn::constant(inv_sqrt));
  return nn::scale(nn::sum_squares(resid), 0.5 * s.dgamma);
}

nn::Var accumulate_mean(const std::vector<nn::Var>& parts, std::size_t count) {
  nn::Var total;
  for (const auto& p : parts) total = total.defined() ? nn::add(total, p) : p;
  if (!total.defined()) return nn::constant(nn::Matrix::Zero(1, 1));
  return nn::scale(total, 1.0 / static_cast<double>(count));
}

}  // namespace

nn::Var gcd_loss(const GcdNet& net, const nn::Var& z0, const std::vector<NoiseDraw>& draws,
                 const NoiseSchedule& sched) {
  if (static_cast<Eigen::Index>(draws.size()) != z0.rows()) throw DimensionError("gcd_loss needs one draw per row");
  std::vector<nn::Var> parts;
  for (Eigen::Index r = 0; r < z0.rows(); ++r) {
    const auto& d = draws[static_cast<std::size_t>(r)];
    if (d.eps.size() != z0.cols()) throw DimensionError("gcd_loss: eps width != d_ctx");
    const auto s = schedule_eval(d.t, sched);
    const nn::Var row = z0.rows() == 1 ? z0 : nn::slice_rows(z0, r, 1);
    const nn::Var z_t = nn::add(nn::scale(row, s.alpha), nn::constant(row_of(s.sigma * d.eps)));
    const nn::Var pred = net.predict(z_t, {d.t});
    check_prediction(pred, "gcd");
    parts.push_back(nn::scale(nn::sum_squares(nn::sub(pred, nn::constant(row_of(d.eps)))), 0.5 * s.dgamma));
  }
  return accumulate_mean(parts, draws.size());
}

nn::Var ctd_loss_whitened(const CtdNet& net, const std::vector<CtdTerm>& terms, const nn::Var& context,
                          const NoiseSchedule& sched, const ConditionFn& condition) {
  if (terms.empty()) throw DimensionError("ctd_loss_whitened needs at least one term");
  std::vector<nn::Var> parts;
  for (const auto& term : terms) {
    parts.push_back(whitened_term(net, term.x0, term.cond, term.draw, context, sched, condition));
  }
  return accumulate_mean(parts, terms.size());
}

void HvidlConfig::validate() const {
  if (!(kappa > 0.0)) throw ValidationError("HVIDL kappa must be > 0");
  if (!(sigma_delta >= 0.0)) throw ValidationError("HVIDL sigma_delta must be >= 0");
}

nn::Var hvidl_loss(const CtdNet& net, const std::vector<CtdTerm>& terms, const nn::Var& context,
                   const label::LabelPipeline& labels, const HvidlConfig& cfg, const NoiseSchedule& sched,
                   Rng& rng, const ConditionFn& condition, HvidlStats* stats) {
  cfg.validate();
  if (terms.empty()) throw DimensionError("hvidl_loss needs at least one term");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<nn::Var> parts;
  HvidlStats local;
  for (const auto& term : terms) {
    if (cfg.sigma_delta == 0.0) {
      parts.push_back(whitened_term(net, term.x0, term.cond, term.draw, context, sched, condition));
      ++local.used;
      continue;
    }
    RealVector delta(term.cond.y.size());
    for (Eigen::Index i = 0; i < delta.size(); ++i) delta(i) = cfg.sigma_delta * normal(rng);
    if (delta.norm() > cfg.kappa) {
      ++local.gated_out;
      continue;
    }
    const label::LabelCondition vicinal = labels.condition(term.cond.y + delta);
    parts.push_back(whitened_term(net, term.x0, vicinal, term.draw, context, sched, condition));
    ++local.used;
  }
  if (stats) *stats = local;
  return accumulate_mean(parts, terms.size());
}

ConditionFn label_state_condition(const encoder::SetEncoder& encoder, const circuit::GridEmbedding& pad_grid) {
  return [&encoder, pad_grid](const label::LabelCondition& cond) {
    return encoder.encode_pair(pad_grid, nn::constant(cond.h_short.transpose())).lbl;
  };
}

StepReport joint_train_step(const std::vector<MinisetExample>& batch, JointModels& models,
                            const JointConfig& cfg, nn::Adam& opt, const NoiseSchedule& sched, Rng& rng,
                            const circuit::GridEmbedding* pad_grid) {
  if (batch.empty()) throw SetError("joint_train_step needs at least one mini-set");
  StepReport report;
  report.lr = opt.config().lr;
  ConditionFn condition;
  if (cfg.label_state_condition) {
    if (!pad_grid) throw ValidationError("label-state conditioning needs the padding grid");
    condition = label_state_condition(models.encoder, *pad_grid);
  }
  opt.zero_grad();
  nn::Var gcd_total, ctd_total;
  const int d_ctx = models.gcd.config().d_ctx;
  const int d_circ = models.ctd.config().d_circuit();
  try {
    for (const auto& ex : batch) {
      if (ex.x0.size() != ex.inputs.size() || ex.conds.size() != ex.inputs.size()) {
        throw DimensionError("mini-set example fields differ in length");
      }
      const nn::Var z = models.encoder.encode_miniset(ex.inputs);
      const nn::Var g = gcd_loss(models.gcd, z, {draw_noise(d_ctx, rng)}, sched);
      std::vector<CtdTerm> terms;
      for (std::size_t i = 0; i < ex.inputs.size(); ++i) {
        terms.push_back({ex.x0[i], ex.conds[i], draw_noise(d_circ, rng)});
      }
      nn::Var c;
      if (cfg.use_hvidl) {
        HvidlStats st;
        c = hvidl_loss(models.ctd, terms, z, models.labels, cfg.hvidl, sched, rng, condition, &st);
        report.gated_out += st.gated_out;
      } else {
        c = ctd_loss_whitened(models.ctd, terms, z, sched, condition);
      }
      gcd_total = gcd_total.defined() ? nn::add(gcd_total, g) : g;
      ctd_total = ctd_total.defined() ? nn::add(ctd_total, c) : c;
    }
  } catch (const NumericError&) {
    report.skipped = true;
    report.total = report.gcd = report.ctd = std::nan("");
    opt.config().lr *= 0.5;
    return report;
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  const nn::Var gcd_mean = nn::scale(gcd_total, inv);
  const nn::Var ctd_mean = nn::scale(ctd_total, inv);
  const nn::Var total = nn::add(gcd_mean, nn::scale(ctd_mean, cfg.lambda));
  report.gcd = gcd_mean.scalar();
  report.ctd = ctd_mean.scalar();
  report.total = total.scalar();
  if (!std::isfinite(report.total)) {
    report.skipped = true;
    opt.config().lr *= 0.5;
    return report;
  }
  nn::backward(total);
  report.grad_norm = opt.step();
  if (!std::isfinite(report.grad_norm)) {
    report.skipped = true;
    opt.config().lr *= 0.5;
  }
  return report;
}

}  // namespace qmlc::diffusion
