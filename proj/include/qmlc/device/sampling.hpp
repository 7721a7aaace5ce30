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
#include <vector>

#include "qmlc/common/linalg.hpp"

namespace qmlc::device {

/// Multinomial shot counts. Entries of `p` below -1e-12 raise
/// ProbabilityError; smaller negative round-off is treated as zero.
std::vector<std::int64_t> sample_counts(const RealVector& p, std::int64_t shots,
                                        std::uint64_t seed);

}  // namespace qmlc::device
