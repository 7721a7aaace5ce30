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

#include "qmlc/common/linalg.hpp"

namespace qmlc::diffusion {

/// Linear schedule for gamma = -log SNR, increasing in t, so that
/// sigma_t^2 = sigmoid(gamma_t) rises from nearly 0 to nearly 1.
struct NoiseSchedule {
  double gamma_min = -10.0;
  double gamma_max = 10.0;

  void validate() const;
};

struct ScheduleValue {
  double gamma;
  double dgamma;  // d gamma / dt
  double alpha2;
  double sigma2;
  double alpha;
  double sigma;
};

/// Throws DomainError for t outside [0, 1].
ScheduleValue schedule_eval(double t, const NoiseSchedule& sched);

/// z_t = alpha_t z0 + sigma_t eps.
RealVector gcd_forward(const RealVector& z0, double t, const RealVector& eps, const NoiseSchedule& sched);

/// x_t = alpha_t x0 + sigma_t sqrt(H) eps, elementwise; CovarianceError for a
/// non-positive or non-finite diagonal entry.
RealVector ctd_forward(const RealVector& x0, double t, const RealVector& eps, const RealVector& cov,
                       const NoiseSchedule& sched);

void check_covariance(const RealVector& cov);

}  // namespace qmlc::diffusion
