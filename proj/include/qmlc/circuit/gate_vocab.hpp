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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qmlc::circuit {

/// Every gate the toolkit understands. All are Clifford; Idle and Pad are
/// grid-only symbols and never appear inside a Circuit.
enum class GateKind { X, Y, Z, H, S, X90, Y90, Id, CX, Idle, Pad };

enum class TokenRole { Gate, Idle, Padding };

struct GateInfo {
  GateKind kind;
  std::string_view name;
  int arity;
  TokenRole role;
};

const GateInfo& gate_info(GateKind kind);
std::optional<GateKind> gate_from_name(std::string_view name);
std::string_view gate_name(GateKind kind);

struct VocabEntry {
  int token_id;
  GateKind kind;
  std::string name;
  int arity;
  TokenRole role;
  // Two-qubit entries: the lower-index row carries the control.
  bool lower_row_is_control;
};

/// Ordered token vocabulary with ids 1..K. Exactly one idle and one padding
/// entry are required.
class GateVocab {
 public:
  static GateVocab from_names(const std::vector<std::string>& names);
  /// {x90, y90, cx, idle, pad}.
  static GateVocab standard();

  int size() const { return static_cast<int>(entries_.size()); }
  const VocabEntry& entry(int token_id) const;
  const std::vector<VocabEntry>& entries() const { return entries_; }
  std::optional<int> token_of(GateKind kind) const;
  bool contains(GateKind kind) const { return token_of(kind).has_value(); }
  bool valid_token(int token_id) const { return token_id >= 1 && token_id <= size(); }
  int idle_token() const { return idle_token_; }
  int pad_token() const { return pad_token_; }
  std::vector<std::string> names() const;

 private:
  std::vector<VocabEntry> entries_;
  int idle_token_ = 0;
  int pad_token_ = 0;
};

}  // namespace qmlc::circuit
