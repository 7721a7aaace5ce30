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

#include "qmlc/circuit/gate_vocab.hpp"

#include <array>
#include <set>

#include "qmlc/common/errors.hpp"

namespace qmlc::circuit {

namespace {

constexpr std::array<GateInfo, 11> kGates{{
    {GateKind::X, "x", 1, TokenRole::Gate},
    {GateKind::Y, "y", 1, TokenRole::Gate},
    {GateKind::Z, "z", 1, TokenRole::Gate},
    {GateKind::H, "h", 1, TokenRole::Gate},
    {GateKind::S, "s", 1, TokenRole::Gate},
    {GateKind::X90, "x90", 1, TokenRole::Gate},
    {GateKind::Y90, "y90", 1, TokenRole::Gate},
    {GateKind::Id, "id", 1, TokenRole::Gate},
    {GateKind::CX, "cx", 2, TokenRole::Gate},
    {GateKind::Idle, "idle", 1, TokenRole::Idle},
    {GateKind::Pad, "pad", 1, TokenRole::Padding},
}};

}  // namespace

const GateInfo& gate_info(GateKind kind) {
  return kGates[static_cast<std::size_t>(kind)];
}

std::optional<GateKind> gate_from_name(std::string_view name) {
  for (const auto& g : kGates) {
    if (g.name == name) return g.kind;
  }
  return std::nullopt;
}

std::string_view gate_name(GateKind kind) { return gate_info(kind).name; }

GateVocab GateVocab::from_names(const std::vector<std::string>& names) {
  GateVocab vocab;
  std::set<GateKind> seen;
  for (const auto& name : names) {
    auto kind = gate_from_name(name);
    if (!kind) throw VocabError("unknown gate name '" + name + "'");
    if (!seen.insert(*kind).second) throw VocabError("duplicate vocabulary entry '" + name + "'");
    const auto& info = gate_info(*kind);
    const int id = static_cast<int>(vocab.entries_.size()) + 1;
    vocab.entries_.push_back(
        {id, *kind, std::string(info.name), info.arity, info.role, info.arity == 2});
    if (info.role == TokenRole::Idle) vocab.idle_token_ = id;
    if (info.role == TokenRole::Padding) vocab.pad_token_ = id;
  }
  if (vocab.idle_token_ == 0 || vocab.pad_token_ == 0) {
    throw VocabError("vocabulary needs exactly one idle and one pad entry");
  }
  return vocab;
}

GateVocab GateVocab::standard() { return from_names({"x90", "y90", "cx", "idle", "pad"}); }

const VocabEntry& GateVocab::entry(int token_id) const {
  if (!valid_token(token_id)) {
    throw VocabError("token id " + std::to_string(token_id) + " outside 1.." +
                     std::to_string(size()));
  }
  return entries_[static_cast<std::size_t>(token_id - 1)];
}

std::optional<int> GateVocab::token_of(GateKind kind) const {
  for (const auto& e : entries_) {
    if (e.kind == kind) return e.token_id;
  }
  return std::nullopt;
}

std::vector<std::string> GateVocab::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

}  // namespace qmlc::circuit
