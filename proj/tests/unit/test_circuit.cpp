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

#include <sstream>

#include "qmlc/circuit/circuit.hpp"
#include "qmlc/circuit/circuit_text.hpp"
#include "qmlc/circuit/embedding.hpp"
#include "qmlc/circuit/gate_vocab.hpp"
#include "qmlc/circuit/token_grid.hpp"
#include "qmlc/common/errors.hpp"
#include "qmlc/common/rng.hpp"

using namespace qmlc;
using namespace qmlc::circuit;

namespace {

GateVocab xy_vocab() { return GateVocab::from_names({"x", "y", "cx", "idle", "pad"}); }

TokenGrid grid_of(const std::vector<std::vector<int>>& rows) {
  TokenGrid g(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()), 0);
  for (std::size_t q = 0; q < rows.size(); ++q) {
    for (std::size_t t = 0; t < rows[q].size(); ++t) g.set(static_cast<int>(q), static_cast<int>(t), rows[q][t]);
  }
  return g;
}

const GateKind kCliffordSet[] = {GateKind::X90, GateKind::Y90, GateKind::CX};

}  // namespace

TEST_CASE("vocab ids are 1..K in order") {
  const auto v = xy_vocab();
  CHECK(v.size() == 5);
  CHECK(*v.token_of(GateKind::X) == 1);
  CHECK(*v.token_of(GateKind::Y) == 2);
  CHECK(*v.token_of(GateKind::CX) == 3);
  CHECK(v.idle_token() == 4);
  CHECK(v.pad_token() == 5);
  CHECK(v.entry(3).lower_row_is_control);
  CHECK_THROWS_AS(GateVocab::from_names({"x", "pad"}), VocabError);
  CHECK_THROWS_AS(GateVocab::from_names({"x", "x", "idle", "pad"}), VocabError);
  CHECK_THROWS_AS(GateVocab::from_names({"t", "idle", "pad"}), VocabError);
}

TEST_CASE("tokenize single X on two qubits") {
  Circuit c(2);
  c.append({GateKind::X, 0});
  CHECK(tokenize_circuit(c, xy_vocab(), 3) == grid_of({{1, 5, 5}, {4, 5, 5}}));
}

TEST_CASE("empty circuit tokenizes to padding") {
  CHECK(tokenize_circuit(Circuit(2), xy_vocab(), 2) == grid_of({{5, 5}, {5, 5}}));
}

TEST_CASE("tokenize errors") {
  Circuit c(1);
  for (int i = 0; i < 4; ++i) c.append({GateKind::X, 0});
  CHECK_THROWS_AS(tokenize_circuit(c, xy_vocab(), 3), LengthError);
  Circuit h(1);
  h.append({GateKind::H, 0});
  CHECK_THROWS_AS(tokenize_circuit(h, xy_vocab(), 3), VocabError);
}

TEST_CASE("detokenize examples") {
  const auto v = xy_vocab();
  Circuit x(2);
  x.append({GateKind::X, 0});
  CHECK(detokenize(grid_of({{1, 5}, {4, 5}}), v) == x);
  CHECK_THROWS_AS(detokenize(grid_of({{3, 5}, {4, 5}}), v), StructureError);
  const Circuit cx = detokenize(grid_of({{3, 5}, {3, 5}}), v);
  REQUIRE(cx.length() == 1);
  REQUIRE(cx.moments()[0].size() == 1);
  CHECK(cx.moments()[0][0] == GateOp{GateKind::CX, 0, 1});
  CHECK(tokenize_circuit(cx, v, 2) == grid_of({{3, 5}, {3, 5}}));
}

TEST_CASE("padding must be a suffix") {
  CHECK_THROWS_AS(detokenize(grid_of({{5, 1}}), xy_vocab()), StructureError);
}

TEST_CASE("round trip over random circuits") {
  const auto v = GateVocab::standard();
  Rng rng = make_rng(7, 0);
  for (int q = 1; q <= 3; ++q) {
    for (int i = 0; i < 200; ++i) {
      const Circuit c = random_circuit(q, static_cast<int>(rng() % 21), kCliffordSet, rng, 0.2);
      const auto g = tokenize_circuit(c, v, 20);
      CHECK(detokenize(g, v) == c);
    }
  }
}

TEST_CASE("tokenize is injective on distinct random circuits") {
  const auto v = GateVocab::standard();
  Rng rng = make_rng(8, 0);
  std::vector<std::pair<Circuit, TokenGrid>> seen;
  for (int i = 0; i < 100; ++i) {
    const Circuit c = random_circuit(2, 1 + static_cast<int>(rng() % 6), kCliffordSet, rng, 0.3);
    seen.emplace_back(c, tokenize_circuit(c, v, 8));
  }
  for (std::size_t a = 0; a < seen.size(); ++a) {
    for (std::size_t b = a + 1; b < seen.size(); ++b) {
      if (!(seen[a].first == seen[b].first)) CHECK_FALSE(seen[a].second == seen[b].second);
    }
  }
}

TEST_CASE("append left-packs") {
  Circuit c(2);
  c.append({GateKind::X90, 0});
  c.append({GateKind::Y90, 1});
  c.append({GateKind::CX, 0, 1});
  c.append({GateKind::X90, 0});
  CHECK(c.length() == 3);
  CHECK(c.moments()[0].size() == 2);
}

TEST_CASE("circuit structure errors") {
  CHECK_THROWS_AS(Circuit(2, {{{GateKind::X, 0}, {GateKind::Y, 0}}}), StructureError);
  CHECK_THROWS_AS(Circuit(1, {{{GateKind::X, 1}}}), StructureError);
  CHECK_THROWS_AS(Circuit(0), DimensionError);
}

TEST_CASE("orthonormal embedding") {
  const auto e = make_orthonormal_embedding(5, 5, 1);
  CHECK((e.table() * e.table().transpose() - RealMatrix::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-10);
  for (std::uint64_t seed : {0ull, 3ull, 99ull}) {
    const auto w = make_orthonormal_embedding(5, 8, seed);
    CHECK(w.width() == 8);
    CHECK((w.table() * w.table().transpose() - RealMatrix::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-10);
  }
  CHECK(make_orthonormal_embedding(5, 8, 4).table() == make_orthonormal_embedding(5, 8, 4).table());
  CHECK_FALSE(make_orthonormal_embedding(5, 8, 4).table() == make_orthonormal_embedding(5, 8, 5).table());
  CHECK_THROWS_AS(make_orthonormal_embedding(5, 4, 0), DimensionError);
}

TEST_CASE("embed_grid lookups") {
  const auto e = make_orthonormal_embedding(5, 8, 2);
  const auto pad = embed_grid(TokenGrid(2, 3, 5), e);
  CHECK(pad.cells.rows() == 6);
  for (int r = 0; r < 6; ++r) CHECK((pad.cells.row(r) - e.row(5)).cwiseAbs().maxCoeff() == 0.0);
  const auto g = embed_grid(grid_of({{1, 2, 5}, {3, 4, 5}}), e);
  for (int r = 0; r < 6; ++r) CHECK(std::abs(g.cells.row(r).norm() - 1.0) <= 1e-12);
  CHECK(std::abs(g.cells.row(0).dot(g.cells.row(3))) <= 1e-10);
  CHECK_THROWS_AS(embed_grid(TokenGrid(1, 1, 6), e), VocabError);
  const auto flat = g.flattened();
  CHECK(flat.size() == 2 * 3 * 8);
  const auto back = GridEmbedding::from_flat(flat, 2, 3, 8);
  CHECK(back.cells == g.cells);
}

TEST_CASE("circuit text round trip and errors") {
  const Circuit c = parse_circuit("Q=2;x90@0,y90@1;cx@0>1;_;x@1");
  CHECK(c.length() == 4);
  CHECK(c.moments()[2].empty());
  CHECK(parse_circuit(format_circuit(c)) == c);
  CHECK(parse_circuit("Q=2;").empty());
  CHECK_THROWS_AS(parse_circuit("x90@0"), ParseError);
  CHECK_THROWS_AS(parse_circuit("Q=1;foo@0"), ParseError);
  CHECK_THROWS_AS(parse_circuit("Q=1;x90@0;;y90@0"), ParseError);
  std::istringstream in("# header\nQ=1;x90@0\n\nQ=1;bad\n");
  try {
    parse_circuit_stream(in);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
}
