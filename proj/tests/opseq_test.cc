// Copyright 2026 The VLR Authors.
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

#include "vlr/opseq.h"

#include "doctest.h"
#include "test_util.h"

namespace vlr {
namespace {

TEST_CASE("parse relate-query program") {
  const OperationSequence seq =
      ParseProgramString("(select; cat) -> (relate; _,next to,s) -> (query; name)");
  REQUIRE(seq.tuples.size() == 3);
  CHECK(seq.tuples[0].type == OpType::kSelect);
  CHECK(seq.tuples[0].args == std::vector<std::string>{"cat"});
  CHECK(seq.tuples[1].type == OpType::kRelate);
  CHECK(seq.tuples[1].args == std::vector<std::string>{"_", "next to", "s"});
  CHECK(seq.tuples[2].type == OpType::kQuery);
  CHECK(seq.tuples[2].qualifier == "name");
  CHECK(seq.category() == StructuralCategory::kQuery);
  CHECK_FALSE(seq.branch_split);
}

TEST_CASE("parse verify with qualifier") {
  const OperationSequence seq = ParseProgramString("(select; car) -> (verify color; red)");
  CHECK(seq.tuples[1].type == OpType::kVerify);
  CHECK(seq.tuples[1].qualifier == "color");
  CHECK(seq.tuples[1].args == std::vector<std::string>{"red"});
  CHECK(seq.category() == StructuralCategory::kVerify);
}

TEST_CASE("parse negated filter") {
  const OperationSequence seq = ParseProgramString(
      "(select; sock) -> (filter color; not(white)) -> (exist; _)");
  CHECK(seq.tuples[1].negated);
  CHECK(seq.tuples[1].args == std::vector<std::string>{"white"});
  CHECK(RenderTuple(seq.tuples[1]) == "(filter color; not(white))");
}

TEST_CASE("dual-branch programs record the split") {
  OperationSequence seq = ParseProgramString(
      "(select; cat) -> (exist; _) -> (select; dog) -> (exist; _) -> (and; _)");
  CHECK(seq.category() == StructuralCategory::kLogical);
  CHECK(*seq.branch_split == 2);
  seq = ParseProgramString(
      "(select; cat) -> (filter; red) -> (select; dog) -> (compare color; same)");
  CHECK(seq.category() == StructuralCategory::kCompare);
  CHECK(*seq.branch_split == 2);
  seq = ParseProgramString("(select; cat) -> (choose color; red,green)");
  CHECK(seq.category() == StructuralCategory::kChoose);
}

TEST_CASE("render round-trips") {
  for (const char *text : {
           "(select; cat) -> (relate; dog,next to,s) -> (exist; _)",
           "(select; cat) -> (filter color; not(white)) -> (query; material)",
           "(select; cat) -> (exist; _) -> (select; dog) -> (exist; _) -> (or; _)",
           "(select; animal) -> (choose name; cat,dog)",
       }) {
    CHECK(RenderProgramString(ParseProgramString(text)) == text);
  }
}

TEST_CASE("malformed programs are rejected") {
  CHECK_THROWS_AS(ParseProgramString(""), ParseError);
  CHECK_THROWS_AS(ParseProgramString("(select; cat)"), ParseError);
  CHECK_THROWS_AS(ParseProgramString("(fly; cat) -> (exist; _)"), ParseError);
  CHECK_THROWS_AS(ParseProgramString("(select; cat) -> (exist; _) -> (filter; red)"),
                  ParseError);
  CHECK_THROWS_AS(ParseProgramString("(select; not(cat)) -> (exist; _)"), ParseError);
  CHECK_THROWS_AS(ParseProgramString("(select; cat) -> (relate; dog,next to,x) -> (exist; _)"),
                  ParseError);
  CHECK_THROWS_AS(ParseProgramString("(select; cat) -> (choose; red) "), ParseError);
  CHECK_THROWS_AS(ParseProgramString("(select; cat -> (exist; _)"), ParseError);
}

TEST_CASE("generalize_template") {
  auto v = testing::SmallVocab();
  auto key = [&](const char *program) {
    return GeneralizeTemplate(ParseProgramString(program), *v).Render();
  };
  CHECK(key("(select; car) -> (verify color; red)") ==
        "(select; OBJ) -> (verify color; ATTR)");
  CHECK(key("(select; cat) -> (exist; _)") == "(select; OBJ) -> (exist; _)");
  CHECK(key("(select; cat) -> (relate; _,next to,s) -> (query; name)") ==
        "(select; OBJ) -> (relate; _,REL,s) -> (query; name)");
  CHECK(key("(select; animal) -> (filter color; not(red)) -> (exist; _)") ==
        "(select; OBJ) -> (filter color; not(ATTR)) -> (exist; _)");
  // Idempotent on placeholders.
  const OperationSequence once = ParseProgramString(
      "(select; OBJ) -> (relate; OBJ,REL,o) -> (query; color)");
  CHECK(GeneralizeTemplate(once, *v).Render() ==
        "(select; OBJ) -> (relate; OBJ,REL,o) -> (query; color)");
  Diagnostics diag;
  GeneralizeTemplate(ParseProgramString("(select; unicorn) -> (exist; _)"), *v,
                     &diag);
  CHECK_FALSE(diag.empty());
}

}  // namespace
}  // namespace vlr
