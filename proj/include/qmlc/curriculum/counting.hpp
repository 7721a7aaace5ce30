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

#include <boost/multiprecision/cpp_int.hpp>

namespace qmlc::curriculum {

using BigInt = boost::multiprecision::cpp_int;

/// Number of k-dimensional subspaces of F_2^n; zero when k > n.
BigInt gaussian_binomial(int n, int k);
/// Number of k-dimensional affine subspaces of F_2^n.
BigInt count_affine_subspaces(int n, int k);
/// Number of distinct computational-basis distributions of n-qubit stabilizer states.
BigInt count_clifford_distributions(int n);

}  // namespace qmlc::curriculum
