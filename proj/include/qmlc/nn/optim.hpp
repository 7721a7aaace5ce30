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

#include <vector>

#include "qmlc/nn/autograd.hpp"

namespace qmlc::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip_norm = 1.0;  // global gradient norm; <= 0 disables
};

class Adam {
 public:
  Adam(std::vector<Var> params, AdamConfig cfg);

  /// Returns the pre-clipping global gradient norm. Returns NaN and leaves the
  /// parameters untouched when any gradient is non-finite.
  double step();
  void zero_grad();

  AdamConfig& config() { return cfg_; }
  long long steps() const { return t_; }

 private:
  std::vector<Var> params_;
  std::vector<Matrix> m_, v_;
  AdamConfig cfg_;
  long long t_ = 0;
};

double global_grad_norm(const std::vector<Var>& params);

}  // namespace qmlc::nn
