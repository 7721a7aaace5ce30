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
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "qmlc/device/dataset.hpp"

namespace qmlc::curriculum {

struct MiniSet {
  std::vector<std::size_t> record_ids;  // indices into the dataset
  int l_min = 0;
  int l_max = 0;
  int stage = 0;

  std::size_t size() const { return record_ids.size(); }
};

struct GroupingConfig {
  int set_size = 8;
  int tau = 2;
  int max_usage = 4;       // sets a single record may join
  int extra_sets = 0;      // additional overlapping sets per band after coverage
  int diversity_candidates = 1;  // candidates scored per extra set; 1 disables scoring
  std::uint64_t seed = 0;

  void validate() const;
};

struct GroupingResult {
  std::vector<MiniSet> sets;
  std::vector<std::string> warnings;
};

/// Probabilities rounded to the nearest multiple of 2^-Q.
std::vector<long long> distinctness_key(const RealVector& p, int num_qubits);

/// Distinct gate kinds plus distinct lengths across the set.
double diversity_score(const MiniSet& set, const std::vector<device::GstRecord>& records);

GroupingResult group_records(const std::vector<device::GstRecord>& records, const GroupingConfig& cfg);

struct CurriculumPlan {
  std::vector<int> edges;
  std::vector<std::vector<MiniSet>> stages;
  std::vector<std::string> warnings;

  std::size_t num_sets() const;
};

CurriculumPlan build_curriculum(std::vector<MiniSet> sets, const std::vector<int>& edges);

inline constexpr const char* kManifestFormat = "qmlc-sets/1";

void write_manifest(std::ostream& out, const CurriculumPlan& plan);
/// Reads sets back and rebuilds the plan with the given edges; record ids are
/// checked against `num_records`.
CurriculumPlan read_manifest(std::istream& in, const std::vector<int>& edges, std::size_t num_records);

}  // namespace qmlc::curriculum
