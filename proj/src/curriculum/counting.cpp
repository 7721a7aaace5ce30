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

#include "qmlc/curriculum/counting.hpp"

#include "qmlc/common/errors.hpp"

namespace qmlc::curriculum {

BigInt gaussian_binomial(int n, int k) {
  if (n < 0 || k < 0) throw DomainError("gaussian_binomial needs n, k >= 0");
  if (k > n) return 0;
  BigInt num = 1;
  BigInt den = 1;
  for (int i = 0; i < k; ++i) {
    num *= (BigInt(1) << (n - i)) - 1;
    den *= (BigInt(1) << (i + 1)) - 1;
  }
  return num / den;
}

BigInt count_affine_subspaces(int n, int k) {
  if (k > n) return 0;
  return (BigInt(1) << (n - k)) * gaussian_binomial(n, k);
}

BigInt count_clifford_distributions(int n) {
  if (n < 0) throw DomainError("count_clifford_distributions needs n >= 0");
  BigInt total = 0;
  for (int k = 0; k <= n; ++k) total += count_affine_subspaces(n, k);
  return total;
}

}  // namespace qmlc::curriculum
