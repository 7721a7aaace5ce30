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

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "qmlc/circuit/circuit.hpp"

namespace qmlc::circuit {

// One circuit per line:
//
//   line    := "Q=" uint ";" [ moment { ";" moment } ]
//   moment  := "_" | op { "," op }
//   op      := gate "@" uint | "cx@" uint ">" uint
//
// `_` is a moment in which every qubit idles. "Q=2;" is the empty circuit.
// Example: "Q=2;x90@0,y90@1;cx@0>1;_;x@1".

Circuit parse_circuit(std::string_view line);
std::string format_circuit(const Circuit& circuit);

/// Skips blank lines and lines starting with '#'. ParseError messages carry
/// the 1-based line number.
std::vector<Circuit> parse_circuit_stream(std::istream& in);

}  // namespace qmlc::circuit
