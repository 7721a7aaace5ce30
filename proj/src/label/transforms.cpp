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

#include "qmlc/label/transforms.hpp"

#include <cmath>
#include <numbers>

#include "qmlc/common/errors.hpp"

namespace qmlc::label {

std::string_view transform_name(TransformKind kind) {
  switch (kind) {
    case TransformKind::Logit: return "logit";
    case TransformKind::Wht: return "wht";
    case TransformKind::Fourier: return "fourier";
  }
  return "logit";
}

TransformKind transform_from_name(std::string_view name) {
  if (name == "logit") return TransformKind::Logit;
  if (name == "wht") return TransformKind::Wht;
  if (name == "fourier") return TransformKind::Fourier;
  throw ValidationError("unknown label transform '" + std::string(name) + "'");
}

RealVector normalize_counts(const std::vector<std::int64_t>& counts) {
  std::int64_t total = 0;
  for (auto c : counts) {
    if (c < 0) throw EmptyCountsError("negative count");
    total += c;
  }
  if (total <= 0) throw EmptyCountsError("counts sum to zero");
  RealVector y(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t i = 0; i < counts.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  return y;
}

RealVector transform_logit(const RealVector& y, double eps) {
  return y.unaryExpr([eps](double v) { return std::log((v + eps) / (1.0 - v + eps)); });
}

RealVector transform_wht(const RealVector& y) {
  const Eigen::Index n = y.size();
  if (n < 1 || (n & (n - 1)) != 0) throw DimensionError("WHT length must be a power of two");
  RealVector out = y;
  for (Eigen::Index h = 1; h < n; h *= 2) {
    for (Eigen::Index i = 0; i < n; i += 2 * h) {
      for (Eigen::Index j = i; j < i + h; ++j) {
        const double a = out(j);
        const double b = out(j + h);
        out(j) = a + b;
        out(j + h) = a - b;
      }
    }
  }
  return out;
}

RealVector transform_fourier(const RealVector& y, int bands) {
  if (bands < 1) throw DimensionError("Fourier transform needs at least one band");
  RealVector out(2 * bands * y.size());
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    double freq = std::numbers::pi;
    for (int j = 0; j < bands; ++j) {
      out(k++) = std::sin(freq * y(i));
      out(k++) = std::cos(freq * y(i));
      freq *= 2.0;
    }
  }
  return out;
}

RealVector apply_transform(const RealVector& y, const TransformConfig& cfg) {
  switch (cfg.kind) {
    case TransformKind::Logit: return transform_logit(y, cfg.eps);
    case TransformKind::Wht: return transform_wht(y);
    case TransformKind::Fourier: return transform_fourier(y, cfg.bands);
  }
  return y;
}

int transformed_dim(int label_dim, const TransformConfig& cfg) {
  return cfg.kind == TransformKind::Fourier ? 2 * cfg.bands * label_dim : label_dim;
}

RealVector project_to_simplex(const RealVector& y) {
  RealVector out = y.cwiseMax(0.0);
  const double s = out.sum();
  if (!(s > 0.0) || !std::isfinite(s)) {
    return RealVector::Constant(y.size(), 1.0 / static_cast<double>(y.size()));
  }
  return out / s;
}

}  // namespace qmlc::label
