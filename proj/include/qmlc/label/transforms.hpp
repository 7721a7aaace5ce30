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
#include <string>
#include <string_view>
#include <vector>

#include "qmlc/common/linalg.hpp"

namespace qmlc::label {

enum class TransformKind { Logit, Wht, Fourier };

std::string_view transform_name(TransformKind kind);
TransformKind transform_from_name(std::string_view name);  // ValidationError if unknown

struct TransformConfig {
  TransformKind kind = TransformKind::Logit;
  double eps = 1e-6;
  int bands = 4;  // Fourier frequency bands
};

RealVector normalize_counts(const std::vector<std::int64_t>& counts);

RealVector transform_logit(const RealVector& y, double eps = 1e-6);
/// Unnormalized +-1 Walsh matrix applied Q times; entry 0 is the total mass.
RealVector transform_wht(const RealVector& y);
/// Per entry: bands j = 0..L-1 ascending, sin(2^j pi y) before cos(2^j pi y).
RealVector transform_fourier(const RealVector& y, int bands);

RealVector apply_transform(const RealVector& y, const TransformConfig& cfg);
int transformed_dim(int label_dim, const TransformConfig& cfg);

/// Clips negatives and renormalizes; a vector with no positive mass maps to uniform.
RealVector project_to_simplex(const RealVector& y);

}  // namespace qmlc::label
