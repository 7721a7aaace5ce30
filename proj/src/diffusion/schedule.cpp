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

#include "qmlc/diffusion/schedule.hpp"

#include <cmath>
#include <string>

#include "qmlc/common/errors.hpp"

namespace qmlc::diffusion {

namespace {

double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace

void NoiseSchedule::validate() const {
  if (!(gamma_max > gamma_min)) throw ValidationError("schedule needs gamma_max > gamma_min");
  if (!std::isfinite(gamma_min) || !std::isfinite(gamma_max)) throw ValidationError("schedule must be finite");
}

ScheduleValue schedule_eval(double t, const NoiseSchedule& sched) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("schedule time " + std::to_string(t) + " outside [0, 1]");
  ScheduleValue v{};
  v.gamma = sched.gamma_min + (sched.gamma_max - sched.gamma_min) * t;
  v.dgamma = sched.gamma_max - sched.gamma_min;
  v.sigma2 = sigmoid(v.gamma);
  v.alpha2 = sigmoid(-v.gamma);
  v.alpha = std::sqrt(v.alpha2);
  v.sigma = std::sqrt(v.sigma2);
  return v;
}

RealVector gcd_forward(const RealVector& z0, double t, const RealVector& eps, const NoiseSchedule& sched) {
  if (z0.size() != eps.size()) throw DimensionError("gcd_forward: z0 and eps differ in length");
  const auto s = schedule_eval(t, sched);
  return s.alpha * z0 + s.sigma * eps;
}

void check_covariance(const RealVector& cov) {
  for (Eigen::Index i = 0; i < cov.size(); ++i) {
    if (!(cov(i) > 0.0) || !std::isfinite(cov(i))) {
      throw CovarianceError("covariance diagonal entry " + std::to_string(i) + " is not positive");
    }
  }
}

RealVector ctd_forward(const RealVector& x0, double t, const RealVector& eps, const RealVector& cov,
                       const NoiseSchedule& sched) {
  if (x0.size() != eps.size() || x0.size() != cov.size()) {
    throw DimensionError("ctd_forward: x0, eps and covariance differ in length");
  }
  check_covariance(cov);
  const auto s = schedule_eval(t, sched);
  return s.alpha * x0 + s.sigma * (cov.array().sqrt() * eps.array()).matrix();
}

}  // namespace qmlc::diffusion
