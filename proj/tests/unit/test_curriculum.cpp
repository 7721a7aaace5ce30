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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <sstream>

#include "qmlc/circuit/circuit_text.hpp"
#include "qmlc/common/errors.hpp"
#include "qmlc/common/rng.hpp"
#include "qmlc/curriculum/counting.hpp"
#include "qmlc/curriculum/grouping.hpp"
#include "qmlc/device/stabilizer.hpp"
#include "qmlc/oracles/oracles.hpp"

using namespace qmlc;
using namespace qmlc::curriculum;

namespace {

device::GstRecord record(int q, int length, RealVector p) {
  device::GstRecord r;
  r.circuit = circuit::Circuit(q);
  for (int i = 0; i < length; ++i) r.circuit.add_moment({});
  r.length = length;
  r.p = std::move(p);
  r.shots = 100;
  r.counts.assign(static_cast<std::size_t>(r.p.size()), 0);
  return r;
}

GroupingConfig grouping(int set_size, int tau, std::uint64_t seed = 0) {
  GroupingConfig g;
  g.set_size = set_size;
  g.tau = tau;
  g.seed = seed;
  return g;
}

}  // namespace

TEST_CASE("gaussian binomial") {
  for (int n = 0; n < 6; ++n) CHECK(gaussian_binomial(n, 0) == 1);
  CHECK(gaussian_binomial(2, 1) == 3);
  CHECK(gaussian_binomial(4, 2) == 35);
  CHECK(gaussian_binomial(2, 3) == 0);
  CHECK(gaussian_binomial(30, 15) > BigInt(1) << 200);
}

TEST_CASE("affine subspace and clifford distribution counts") {
  for (int n = 0; n < 5; ++n) CHECK(count_affine_subspaces(n, n) == 1);
  CHECK(count_affine_subspaces(2, 0) == 4);
  CHECK(count_affine_subspaces(2, 1) == 6);
  CHECK(count_clifford_distributions(0) == 1);
  CHECK(count_clifford_distributions(1) == 3);
  CHECK(count_clifford_distributions(2) == 11);
}

TEST_CASE("counts match brute force enumeration") {
  for (int n = 1; n <= 3; ++n) {
    const auto aff = oracles::enumerate_affine_subspaces(n);
    const auto lin = oracles::enumerate_linear_subspaces(n);
    BigInt total = 0;
    for (int k = 0; k <= n; ++k) {
      CHECK(count_affine_subspaces(n, k) == aff[static_cast<std::size_t>(k)]);
      CHECK(gaussian_binomial(n, k) == lin[static_cast<std::size_t>(k)]);
      total += aff[static_cast<std::size_t>(k)];
    }
    CHECK(count_clifford_distributions(n) == total);
  }
}

TEST_CASE("clifford distributions saturate at T(n)") {
  for (int n = 1; n <= 2; ++n) {
    const auto r = oracles::clifford_saturation(n, 4000, 30, 7);
    CHECK(count_clifford_distributions(n) == r.distinct);
  }
}

TEST_CASE("distinctness key rounds to the ideal grid") {
  RealVector a(2), b(2);
  a << 0.49, 0.51;
  b << 0.51, 0.49;
  CHECK(distinctness_key(a, 1) == distinctness_key(b, 1));
  b << 0.97, 0.03;
  CHECK_FALSE(distinctness_key(a, 1) == distinctness_key(b, 1));
}

TEST_CASE("identical distributions give no full-size sets") {
  std::vector<device::GstRecord> recs;
  for (int i = 0; i < 4; ++i) recs.push_back(record(1, 2, RealVector::Unit(2, 0)));
  const auto res = group_records(recs, grouping(2, 2));
  for (const auto& s : res.sets) CHECK(s.size() < 2);
  CHECK_FALSE(res.warnings.empty());
}

TEST_CASE("six distinct records in one band are covered") {
  std::vector<device::GstRecord> recs;
  for (int i = 0; i < 6; ++i) recs.push_back(record(3, 4, RealVector::Unit(8, i)));
  const auto res = group_records(recs, grouping(3, 0, 5));
  int full = 0;
  std::set<std::size_t> covered;
  for (const auto& s : res.sets) {
    if (s.size() == 3) ++full;
    covered.insert(s.record_ids.begin(), s.record_ids.end());
  }
  CHECK(full >= 2);
  CHECK(covered.size() == 6);
}

TEST_CASE("grouping respects tau and distinctness on random pools") {
  const circuit::GateKind gates[] = {circuit::GateKind::X90, circuit::GateKind::Y90, circuit::GateKind::CX};
  Rng rng = make_rng(9, 0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<device::GstRecord> recs;
    const int n = 30 + static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) {
      const auto c = circuit::random_circuit(2, 1 + static_cast<int>(rng() % 20), gates, rng);
      auto r = record(2, c.length(), device::ideal_clifford_distribution(c));
      r.circuit = c;
      recs.push_back(r);
    }
    GroupingConfig g = grouping(3 + trial % 3, trial % 4, static_cast<std::uint64_t>(trial));
    g.extra_sets = trial % 3;
    g.diversity_candidates = 1 + trial % 2;
    const auto res = group_records(recs, g);
    std::vector<int> usage(recs.size(), 0);
    for (const auto& s : res.sets) {
      CHECK(s.l_max - s.l_min <= g.tau);
      std::set<std::vector<long long>> keys;
      for (auto id : s.record_ids) {
        REQUIRE(id < recs.size());
        CHECK(recs[id].length >= s.l_min);
        CHECK(recs[id].length <= s.l_max);
        keys.insert(distinctness_key(recs[id].p, 2));
        ++usage[id];
      }
      CHECK(keys.size() == s.size());
    }
    for (int u : usage) CHECK(u <= g.max_usage);
    CHECK(group_records(recs, g).sets.size() == res.sets.size());
  }
}

TEST_CASE("grouping validation") {
  CHECK_THROWS_AS(grouping(1, 2).validate(), ValidationError);
  CHECK_THROWS_AS(group_records({}, grouping(2, 2)), SetError);
}

TEST_CASE("curriculum staging") {
  std::vector<MiniSet> sets(4);
  sets[0].l_min = 1, sets[0].l_max = 3;
  sets[1].l_min = 6, sets[1].l_max = 8;
  sets[2].l_min = 9, sets[2].l_max = 16;
  sets[3].l_min = 17, sets[3].l_max = 18;
  const auto plan = build_curriculum(sets, {4, 8, 16});
  REQUIRE(plan.stages.size() == 3);
  CHECK(plan.stages[0].size() == 1);
  CHECK(plan.stages[0][0].l_max == 3);
  CHECK(plan.stages[1].size() == 1);
  CHECK(plan.stages[1][0].l_max == 8);
  CHECK(plan.stages[2].size() == 2);
  CHECK_FALSE(plan.warnings.empty());
  int prev = 0;
  for (const auto& st : plan.stages) {
    for (const auto& s : st) {
      CHECK(s.l_max >= prev);
    }
    for (const auto& s : st) prev = std::max(prev, s.l_max);
  }
  CHECK_THROWS_AS(build_curriculum(sets, {4, 4, 16}), ValidationError);
}

TEST_CASE("manifest round trip and id checks") {
  std::vector<device::GstRecord> recs;
  for (int i = 0; i < 8; ++i) recs.push_back(record(3, 1 + i % 3, RealVector::Unit(8, i)));
  const auto res = group_records(recs, grouping(3, 2, 1));
  const auto plan = build_curriculum(res.sets, {2, 4});
  std::stringstream ss;
  write_manifest(ss, plan);
  std::istringstream in(ss.str());
  const auto back = read_manifest(in, {2, 4}, recs.size());
  CHECK(back.num_sets() == plan.num_sets());
  for (std::size_t s = 0; s < plan.stages.size(); ++s) {
    for (std::size_t i = 0; i < plan.stages[s].size(); ++i) {
      CHECK(back.stages[s][i].record_ids == plan.stages[s][i].record_ids);
    }
  }
  std::istringstream short_in(ss.str());
  CHECK_THROWS(read_manifest(short_in, {2, 4}, 2));
}
