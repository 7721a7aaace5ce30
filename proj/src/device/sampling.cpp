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

#include "qmlc/device/sampling.hpp"

#include <cmath>
#include <random>
#include <string>

#include "qmlc/common/errors.hpp"
#include "qmlc/common/rng.hpp"

namespace qmlc::device {

std::vector<std::int64_t> sample_counts(const RealVector& p, std::int64_t shots,
                                        std::uint64_t seed) {
  if (shots <= 0) throw ProbabilityError("shots must be positive");
  std::vector<double> probs(static_cast<std::size_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) < -1e-12 || !std::isfinite(p(i))) {
      throw ProbabilityError("probability entry " + std::to_string(i) + " = " +
                             std::to_string(p(i)));
    }
    probs[static_cast<std::size_t>(i)] = std::max(p(i), 0.0);
  }
  // Sequential conditional binomials.
  Rng rng(seed);
  std::vector<std::int64_t> counts(probs.size(), 0);
  std::int64_t remaining = shots;
  for (std::size_t i = 0; i + 1 < probs.size() && remaining > 0; ++i) {
    double tail = 0.0;
    for (std::size_t j = i; j < probs.size(); ++j) tail += probs[j];
    const double q = tail > 0.0 ? std::min(1.0, probs[i] / tail) : 0.0;
    std::binomial_distribution<std::int64_t> draw(remaining, q);
    counts[i] = draw(rng);
    remaining -= counts[i];
  }
  counts.back() += remaining;
  return counts;
}

}  // namespace qmlc::device
