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

#include "qmlc/curriculum/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "json.hpp"
#include "qmlc/common/errors.hpp"
#include "qmlc/common/rng.hpp"

namespace qmlc::curriculum {

void GroupingConfig::validate() const {
  if (set_size < 2) throw ValidationError("set size must be >= 2");
  if (tau < 0) throw ValidationError("tau must be >= 0");
  if (max_usage < 1) throw ValidationError("max_usage must be >= 1");
  if (extra_sets < 0) throw ValidationError("extra_sets must be >= 0");
  if (diversity_candidates < 1) throw ValidationError("diversity_candidates must be >= 1");
}

std::vector<long long> distinctness_key(const RealVector& p, int num_qubits) {
  const double scale = std::ldexp(1.0, num_qubits);
  std::vector<long long> key(static_cast<std::size_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) key[static_cast<std::size_t>(i)] = std::llround(p(i) * scale);
  return key;
}

double diversity_score(const MiniSet& set, const std::vector<device::GstRecord>& records) {
  std::set<circuit::GateKind> kinds;
  std::set<int> lengths;
  for (auto id : set.record_ids) {
    for (auto k : records.at(id).circuit.gate_kinds()) kinds.insert(k);
    lengths.insert(records.at(id).length);
  }
  return static_cast<double>(kinds.size() + lengths.size());
}

namespace {

struct Band {
  int l_min;
  int l_max;
  // distinctness class -> record ids
  std::vector<std::vector<std::size_t>> classes;
};

std::vector<Band> make_bands(const std::vector<device::GstRecord>& records, int tau) {
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return records[a].length < records[b].length; });
  std::vector<Band> bands;
  std::size_t i = 0;
  while (i < order.size()) {
    const int lo = records[order[i]].length;
    Band band{lo, lo, {}};
    std::map<std::vector<long long>, std::size_t> class_of;
    while (i < order.size() && records[order[i]].length <= lo + tau) {
      const auto& r = records[order[i]];
      band.l_max = r.length;
      auto key = distinctness_key(r.p, r.num_qubits());
      auto [it, inserted] = class_of.try_emplace(std::move(key), band.classes.size());
      if (inserted) band.classes.emplace_back();
      band.classes[it->second].push_back(order[i]);
      ++i;
    }
    bands.push_back(std::move(band));
  }
  return bands;
}

class BandBuilder {
 public:
  BandBuilder(const Band& band, const std::vector<device::GstRecord>& records, const GroupingConfig& cfg,
              Rng& rng, std::vector<int>& usage, std::vector<bool>& covered)
      : band_(band), records_(records), cfg_(cfg), rng_(rng), usage_(usage), covered_(covered) {}

  // One set drawing each of up to `size` classes once; classes with uncovered
  // records come first when `prefer_uncovered`.
  MiniSet draw(std::size_t size, bool prefer_uncovered) {
    std::vector<std::size_t> cls(band_.classes.size());
    for (std::size_t c = 0; c < cls.size(); ++c) cls[c] = c;
    std::shuffle(cls.begin(), cls.end(), rng_);
    if (prefer_uncovered) {
      std::stable_partition(cls.begin(), cls.end(), [&](std::size_t c) { return has_uncovered(c); });
    }
    MiniSet set;
    set.l_min = band_.l_max;
    set.l_max = band_.l_min;
    for (std::size_t c : cls) {
      if (set.size() == size) break;
      auto pick = choose(c);
      if (!pick) continue;
      set.record_ids.push_back(*pick);
      set.l_min = std::min(set.l_min, records_[*pick].length);
      set.l_max = std::max(set.l_max, records_[*pick].length);
    }
    std::sort(set.record_ids.begin(), set.record_ids.end());
    return set;
  }

  void commit(const MiniSet& set) {
    for (auto id : set.record_ids) {
      ++usage_[id];
      covered_[id] = true;
    }
  }

  bool all_covered() const {
    for (const auto& c : band_.classes) {
      for (auto id : c) {
        if (!covered_[id] && usage_[id] < cfg_.max_usage) return false;
      }
    }
    return true;
  }

 private:
  bool has_uncovered(std::size_t c) const {
    for (auto id : band_.classes[c]) {
      if (!covered_[id]) return true;
    }
    return false;
  }

  std::optional<std::size_t> choose(std::size_t c) {
    std::vector<std::size_t> uncovered, available;
    for (auto id : band_.classes[c]) {
      if (usage_[id] >= cfg_.max_usage) continue;
      available.push_back(id);
      if (!covered_[id]) uncovered.push_back(id);
    }
    const auto& pool = uncovered.empty() ? available : uncovered;
    if (pool.empty()) return std::nullopt;
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    return pool[pick(rng_)];
  }

  const Band& band_;
  const std::vector<device::GstRecord>& records_;
  const GroupingConfig& cfg_;
  Rng& rng_;
  std::vector<int>& usage_;
  std::vector<bool>& covered_;
};

std::string band_label(const Band& b) {
  return "band [" + std::to_string(b.l_min) + ", " + std::to_string(b.l_max) + "]";
}

}  // namespace

GroupingResult group_records(const std::vector<device::GstRecord>& records, const GroupingConfig& cfg) {
  cfg.validate();
  if (records.empty()) throw SetError("cannot group an empty record list");
  GroupingResult out;
  std::vector<int> usage(records.size(), 0);
  std::vector<bool> covered(records.size(), false);
  const auto bands = make_bands(records, cfg.tau);
  for (std::size_t b = 0; b < bands.size(); ++b) {
    const Band& band = bands[b];
    Rng rng = make_rng(cfg.seed, b);
    BandBuilder builder(band, records, cfg, rng, usage, covered);
    const std::size_t target = static_cast<std::size_t>(cfg.set_size);
    const std::size_t distinct = band.classes.size();
    if (distinct < target) {
      out.warnings.push_back(band_label(band) + " has " + std::to_string(distinct) +
                             " distinct distributions < set size " + std::to_string(target) +
                             "; emitting reduced sets");
    }
    bool reduced_warned = distinct < target;
    while (!builder.all_covered()) {
      MiniSet set = builder.draw(target, true);
      if (set.record_ids.empty()) break;
      if (set.size() < target && !reduced_warned) {
        out.warnings.push_back(band_label(band) + ": usage cap forced a reduced set");
        reduced_warned = true;
      }
      builder.commit(set);
      out.sets.push_back(std::move(set));
    }
    for (int e = 0; e < cfg.extra_sets; ++e) {
      MiniSet best;
      double best_score = -1.0;
      for (int c = 0; c < cfg.diversity_candidates; ++c) {
        MiniSet cand = builder.draw(target, false);
        const double score = cfg.diversity_candidates > 1 ? diversity_score(cand, records) : 0.0;
        if (score > best_score) {
          best_score = score;
          best = std::move(cand);
        }
      }
      if (best.size() < std::min(target, distinct) || best.size() < 2) break;
      builder.commit(best);
      out.sets.push_back(std::move(best));
    }
  }
  return out;
}

std::size_t CurriculumPlan::num_sets() const {
  std::size_t n = 0;
  for (const auto& s : stages) n += s.size();
  return n;
}

CurriculumPlan build_curriculum(std::vector<MiniSet> sets, const std::vector<int>& edges) {
  if (edges.empty()) throw ValidationError("curriculum needs at least one stage edge");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i] <= edges[i - 1]) throw ValidationError("stage edges must be strictly increasing");
  }
  CurriculumPlan plan;
  plan.edges = edges;
  plan.stages.resize(edges.size());
  std::stable_sort(sets.begin(), sets.end(),
                   [](const MiniSet& a, const MiniSet& b) { return a.l_max < b.l_max; });
  for (auto& s : sets) {
    auto it = std::lower_bound(edges.begin(), edges.end(), s.l_max);
    std::size_t stage = static_cast<std::size_t>(it - edges.begin());
    if (it == edges.end()) {
      stage = edges.size() - 1;
      plan.warnings.push_back("set with l_max " + std::to_string(s.l_max) + " exceeds the final edge " +
                              std::to_string(edges.back()) + "; assigned to the final stage");
    }
    s.stage = static_cast<int>(stage);
    plan.stages[stage].push_back(std::move(s));
  }
  return plan;
}

void write_manifest(std::ostream& out, const CurriculumPlan& plan) {
  out << kManifestFormat << '\n';
  std::size_t id = 0;
  for (const auto& stage : plan.stages) {
    for (const auto& s : stage) {
      nlohmann::ordered_json j;
      j["id"] = id++;
      j["stage"] = s.stage;
      j["records"] = s.record_ids;
      j["l_min"] = s.l_min;
      j["l_max"] = s.l_max;
      out << j.dump() << '\n';
    }
  }
}

CurriculumPlan read_manifest(std::istream& in, const std::vector<int>& edges, std::size_t num_records) {
  std::string line;
  if (!std::getline(in, line) || line != kManifestFormat) {
    throw ParseError(std::string("manifest header must be '") + kManifestFormat + "'");
  }
  std::vector<MiniSet> sets;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      MiniSet s;
      s.record_ids = j.at("records").get<std::vector<std::size_t>>();
      s.l_min = j.at("l_min").get<int>();
      s.l_max = j.at("l_max").get<int>();
      s.stage = j.at("stage").get<int>();
      for (auto id : s.record_ids) {
        if (id >= num_records) throw ParseError("record id " + std::to_string(id) + " out of range");
      }
      if (s.record_ids.empty()) throw ParseError("set has no records");
      sets.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("manifest line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return build_curriculum(std::move(sets), edges);
}

}  // namespace qmlc::curriculum
