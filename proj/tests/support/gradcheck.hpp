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

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "qmlc/common/rng.hpp"
#include "qmlc/nn/autograd.hpp"

namespace qmlc::testing {

struct GradCheckResult {
  double max_rel_err = 0.0;
  int checked = 0;
  double worst_fd = 0.0;  // the entry behind max_rel_err
  double worst_bp = 0.0;
};

/// Central differences on `samples` randomly chosen scalar entries across
/// `params`, compared with one backward pass of `loss`. The loss must be a
/// deterministic function of the parameter values.
inline GradCheckResult grad_check(std::vector<nn::Var> params, const std::function<nn::Var()>& loss, int samples,
                                  std::uint64_t seed, double h = 1e-6) {
  for (auto& p : params) p.zero_grad();
  nn::backward(loss());
  std::vector<nn::Matrix> grads;
  for (auto& p : params) {
    grads.push_back(p.grad().size() == 0 ? nn::Matrix::Zero(p.rows(), p.cols()) : p.grad());
  }
  Eigen::Index total = 0;
  for (auto& p : params) total += p.value().size();
  Rng rng = make_rng(seed, 0);
  std::uniform_int_distribution<Eigen::Index> pick(0, total - 1);
  GradCheckResult res;
  for (int s = 0; s < samples; ++s) {
    Eigen::Index flat = pick(rng);
    std::size_t which = 0;
    while (flat >= params[which].value().size()) flat -= params[which].value().size(), ++which;
    double& x = params[which].mutable_value().data()[flat];
    const double orig = x;
    double fd;
    {
      nn::NoGradGuard guard;
      x = orig + h;
      const double up = loss().scalar();
      x = orig - h;
      const double down = loss().scalar();
      x = orig;
      fd = (up - down) / (2.0 * h);
    }
    const double bp = grads[which].data()[flat];
    const double rel = std::abs(fd - bp) / std::max({std::abs(fd), std::abs(bp), 1e-6});
    if (rel >= res.max_rel_err) {
      res.max_rel_err = rel;
      res.worst_fd = fd;
      res.worst_bp = bp;
    }
    ++res.checked;
  }
  for (auto& p : params) p.zero_grad();
  return res;
}

}  // namespace qmlc::testing
