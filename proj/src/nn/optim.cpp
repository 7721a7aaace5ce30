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

#include "qmlc/nn/optim.hpp"

#include <cmath>
#include <limits>

namespace qmlc::nn {

double global_grad_norm(const std::vector<Var>& params) {
  double sq = 0.0;
  for (const auto& p : params) {
    if (p.grad().size() != 0) sq += p.grad().squaredNorm();
  }
  return std::sqrt(sq);
}

Adam::Adam(std::vector<Var> params, AdamConfig cfg) : params_(std::move(params)), cfg_(cfg) {
  for (const auto& p : params_) {
    m_.push_back(Matrix::Zero(p.rows(), p.cols()));
    v_.push_back(Matrix::Zero(p.rows(), p.cols()));
  }
}

void Adam::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

double Adam::step() {
  const double norm = global_grad_norm(params_);
  if (!std::isfinite(norm)) return std::numeric_limits<double>::quiet_NaN();
  const double clip = (cfg_.clip_norm > 0.0 && norm > cfg_.clip_norm) ? cfg_.clip_norm / norm : 1.0;
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto& p = params_[i];
    if (p.grad().size() == 0) continue;
    const Matrix g = p.grad() * clip;
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
    p.mutable_value().array() -=
        cfg_.lr * (m_[i].array() / bc1) / ((v_[i].array() / bc2).sqrt() + cfg_.eps);
  }
  return norm;
}

}  // namespace qmlc::nn
