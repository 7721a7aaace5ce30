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

#include "qmlc/circuit/circuit_text.hpp"

#include <charconv>
#include <sstream>
#include <string>

#include "qmlc/common/errors.hpp"

namespace qmlc::circuit {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

int parse_uint(std::string_view s, std::string_view what) {
  s = trim(s);
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || value < 0) {
    throw ParseError("bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return value;
}

GateOp parse_op(std::string_view text) {
  text = trim(text);
  const auto at = text.find('@');
  if (at == std::string_view::npos) {
    throw ParseError("expected gate@qubit, got '" + std::string(text) + "'");
  }
  const auto name = trim(text.substr(0, at));
  auto kind = gate_from_name(name);
  if (!kind || gate_info(*kind).role != TokenRole::Gate) {
    throw ParseError("unknown gate '" + std::string(name) + "'");
  }
  const auto args = text.substr(at + 1);
  if (gate_info(*kind).arity == 2) {
    const auto arrow = args.find('>');
    if (arrow == std::string_view::npos) {
      throw ParseError("two-qubit gate needs ctrl>tgt, got '" + std::string(text) + "'");
    }
    const int ctrl = parse_uint(args.substr(0, arrow), "control qubit");
    const int tgt = parse_uint(args.substr(arrow + 1), "target qubit");
    if (ctrl == tgt) throw ParseError("control equals target in '" + std::string(text) + "'");
    return {*kind, ctrl, tgt};
  }
  return {*kind, parse_uint(args, "qubit")};
}

}  // namespace

Circuit parse_circuit(std::string_view line) {
  line = trim(line);
  if (line.substr(0, 2) != "Q=") throw ParseError("circuit must start with 'Q=<qubits>;'");
  const auto semi = line.find(';');
  if (semi == std::string_view::npos) throw ParseError("missing ';' after qubit count");
  const int q_count = parse_uint(line.substr(2, semi - 2), "qubit count");
  if (q_count < 1) throw ParseError("qubit count must be positive");
  Circuit circuit(q_count);
  const auto body = trim(line.substr(semi + 1));
  if (body.empty()) return circuit;
  for (auto moment_text : split(body, ';')) {
    moment_text = trim(moment_text);
    if (moment_text.empty()) throw ParseError("empty moment (use '_' for an idle moment)");
    Moment moment;
    if (moment_text != "_") {
      for (auto op_text : split(moment_text, ',')) moment.push_back(parse_op(op_text));
    }
    try {
      circuit.add_moment(std::move(moment));
    } catch (const StructureError& e) {
      throw ParseError(e.what());
    }
  }
  return circuit;
}

std::string format_circuit(const Circuit& circuit) {
  std::ostringstream out;
  out << "Q=" << circuit.num_qubits() << ';';
  bool first_moment = true;
  for (const auto& moment : circuit.moments()) {
    if (!first_moment) out << ';';
    first_moment = false;
    if (moment.empty()) {
      out << '_';
      continue;
    }
    bool first_op = true;
    for (const auto& op : moment) {
      if (!first_op) out << ',';
      first_op = false;
      out << gate_name(op.kind) << '@' << op.qubit;
      if (op.target >= 0) out << '>' << op.target;
    }
  }
  return out.str();
}

std::vector<Circuit> parse_circuit_stream(std::istream& in) {
  std::vector<Circuit> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    try {
      out.push_back(parse_circuit(t));
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace qmlc::circuit
