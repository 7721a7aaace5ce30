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
#include <functional>
#include <optional>

#include "qmlc/diffusion/networks.hpp"
#include "qmlc/diffusion/schedule.hpp"

namespace qmlc::diffusion {

/// eps-prediction for state x at time t.
using EpsPredictor = std::function<RealVector(const RealVector& x, double t)>;

struct SamplerOptions {
  int steps = 250;
  std::uint64_t seed = 0;
  std::optional<double> clip;  // clamp the x0 estimate to [-clip, clip]
};

/// Ancestral sampling from t = 1 to t = 0 over `steps` uniform intervals.
/// With `cov`, prior and every noise injection are scaled by sqrt(diag H) and
/// the x0 estimate uses the matching eps scaling; without it the chain is
/// isotropic. The posterior of step t -> s is
///   mean = (alpha_{t|s} sigma_s^2 / sigma_t^2) x_t + (alpha_s sigma_{t|s}^2 / sigma_t^2) x0_hat,
///   var  = sigma_{t|s}^2 sigma_s^2 / sigma_t^2 * H.
RealVector ancestral_sample(int dim, const EpsPredictor& predict, const NoiseSchedule& sched,
                            const SamplerOptions& opts, const RealVector* cov = nullptr);

RealVector sample_context(const GcdNet& net, const NoiseSchedule& sched, const SamplerOptions& opts);

/// Reverse anisotropic diffusion over flattened grids for one label/context.
RealVector sample_tokens(const CtdNet& net, const RealVector& label_input, const RealVector& context,
                         const RealVector& cov, const NoiseSchedule& sched, const SamplerOptions& opts);

}  // namespace qmlc::diffusion
