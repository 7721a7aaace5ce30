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

#include "qmlc/diffusion/sampler.hpp"

#include <cmath>

#include "qmlc/common/errors.hpp"
#include "qmlc/common/rng.hpp"

namespace qmlc::diffusion {

RealVector ancestral_sample(int dim, const EpsPredictor& predict, const NoiseSchedule& sched,
                            const SamplerOptions& opts, const RealVector* cov) {
  if (opts.steps < 1) throw ValidationError("sampler needs at least one step");
  RealVector scale = RealVector::Ones(dim);
  if (cov) {
    if (cov->size() != dim) throw DimensionError("sampler covariance length != dim");
    check_covariance(*cov);
    scale = cov->array().sqrt();
  }
  Rng rng = make_rng(opts.seed, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto noise = [&] {
    RealVector e(dim);
    for (int i = 0; i < dim; ++i) e(i) = normal(rng);
    return RealVector(scale.cwiseProduct(e));
  };
  const auto top = schedule_eval(1.0, sched);
  RealVector x = top.sigma * noise();
  for (int i = opts.steps; i >= 1; --i) {
    const double t = static_cast<double>(i) / opts.steps;
    const double s_time = static_cast<double>(i - 1) / opts.steps;
    const auto st = schedule_eval(t, sched);
    const auto ss = schedule_eval(s_time, sched);
    const RealVector eps_hat = predict(x, t);
    RealVector x0_hat = (x - st.sigma * scale.cwiseProduct(eps_hat)) / st.alpha;
    if (opts.clip) x0_hat = x0_hat.cwiseMax(-*opts.clip).cwiseMin(*opts.clip);
    if (i == 1) {
      x = x0_hat;
      break;
    }
    const double alpha_ts = st.alpha / ss.alpha;
    const double sigma2_ts = -std::expm1(ss.gamma - st.gamma) * st.sigma2;
    const double c_x = alpha_ts * ss.sigma2 / st.sigma2;
    const double c_0 = ss.alpha * sigma2_ts / st.sigma2;
    const double std_post = std::sqrt(sigma2_ts * ss.sigma2 / st.sigma2);
    x = c_x * x + c_0 * x0_hat + std_post * noise();
  }
  return x;
}

RealVector sample_context(const GcdNet& net, const NoiseSchedule& sched, const SamplerOptions& opts) {
  nn::NoGradGuard guard;
  const EpsPredictor f = [&net](const RealVector& z, double t) {
    return RealVector(net.predict(nn::constant(z.transpose()), {t}).value().row(0).transpose());
  };
  return ancestral_sample(net.config().d_ctx, f, sched, opts);
}

RealVector sample_tokens(const CtdNet& net, const RealVector& label_input, const RealVector& context,
                         const RealVector& cov, const NoiseSchedule& sched, const SamplerOptions& opts) {
  nn::NoGradGuard guard;
  const nn::Var label = nn::constant(label_input.transpose());
  const nn::Var ctx = nn::constant(context.transpose());
  const EpsPredictor f = [&](const RealVector& x, double t) {
    return RealVector(net.predict(nn::constant(x.transpose()), t, label, ctx).value().row(0).transpose());
  };
  return ancestral_sample(net.config().d_circuit(), f, sched, opts, &cov);
}

}  // namespace qmlc::diffusion
