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

#include "vlr/lattice.h"

#include <cmath>

#include "doctest.h"
#include "test_util.h"
#include "vlr/decode.h"

namespace vlr {
namespace {

using testing::GridBoxes;
using testing::SmallVocab;

SceneGraph ThreeRegions() {
  SceneGraph sg(SmallVocab(), "img", GridBoxes(3));
  sg.SetObject(0, 0, 1.0);  // cat
  sg.SetObject(1, 1, 0.8);  // dog
  sg.SetObject(2, 0, 0.4);
  sg.SetAttribute(0, 0, 0, 0.9);  // red
  sg.SetAttribute(2, 0, 0, 0.3);
  sg.SetRelation(0, 1, 0, 0.7);  // next to
  sg.SetRelation(2, 1, 0, 0.2);
  sg.Validate();
  return sg;
}

TEST_CASE("select then filter gives an identity layer") {
  const SceneGraph sg = ThreeRegions();
  const auto lats = BuildLattices(
      ParseProgramString("(select; cat) -> (filter color; red) -> (exist; _)"), sg);
  REQUIRE(lats.size() == 1);
  const Lattice &l = lats[0];
  CHECK(l.num_regions == 3);
  REQUIRE(l.num_layers() == 2);
  CHECK_FALSE(l.layers[0].transition);
  CHECK(l.layers[0].emission.values == std::vector<double>{1.0, kProbabilityFloor, 0.4});
  REQUIRE(l.layers[1].transition);
  CHECK(l.layers[1].transition->kind == TransitionKind::kIdentity);
  CHECK(l.layers[1].emission.values ==
        std::vector<double>{0.9, kProbabilityFloor, 0.3});
  CHECK(l.prior == 1.0);
  CHECK(l.terminal_op.type == OpType::kExist);
}

TEST_CASE("relate builds a hollow relation layer") {
  const SceneGraph sg = ThreeRegions();
  const auto lats = BuildLattices(
      ParseProgramString("(select; cat) -> (relate; _,next to,s) -> (query; name)"), sg);
  REQUIRE(lats.size() == 1);
  const LatticeLayer &layer = lats[0].layers[1];
  REQUIRE(layer.transition);
  CHECK(layer.transition->kind == TransitionKind::kRelation);
  CHECK(layer.emission.values == std::vector<double>{1.0, 1.0, 1.0});
  CHECK(layer.transition->at(0, 1) == 0.7);
  CHECK(layer.transition->at(2, 1) == 0.2);
  for (int i = 0; i < 3; ++i) CHECK(layer.transition->at(i, i) == 0.0);
  // Missing relation edges are floored; the diagonal is not.
  CHECK(layer.transition->at(1, 0) == kProbabilityFloor);

  const auto object_side = BuildLattices(
      ParseProgramString("(select; dog) -> (relate; cat,next to,o) -> (exist; _)"), sg);
  const TransitionMatrix &t = *object_side[0].layers[1].transition;
  CHECK(t.at(1, 0) == 0.7);
  CHECK(t.at(1, 2) == 0.2);
  CHECK(t.at(0, 1) == kProbabilityFloor);
}

TEST_CASE("logical programs give two lattices") {
  const SceneGraph sg = ThreeRegions();
  const auto lats = BuildLattices(
      ParseProgramString(
          "(select; cat) -> (exist; _) -> (select; dog) -> (exist; _) -> (and; _)"),
      sg);
  REQUIRE(lats.size() == 2);
  CHECK(lats[0].num_layers() == 1);
  CHECK(lats[1].num_layers() == 1);
  CHECK(lats[1].layers[0].emission.values[1] == 0.8);
  CHECK(lats[0].terminal_op.type == OpType::kAnd);
}

TEST_CASE("verify on an attribute adds a filter layer") {
  const SceneGraph sg = ThreeRegions();
  const auto lats =
      BuildLattices(ParseProgramString("(select; cat) -> (verify color; red)"), sg);
  REQUIRE(lats[0].num_layers() == 2);
  CHECK(lats[0].layers[1].transition->kind == TransitionKind::kIdentity);
  CHECK(lats[0].layers[1].emission.values[0] == 0.9);
}

TEST_CASE("floor keeps zero emissions decodable") {
  const SceneGraph sg = ThreeRegions();
  const auto lats = BuildLattices(ParseProgramString("(select; car) -> (exist; _)"), sg);
  for (double v : lats[0].layers[0].emission.values) CHECK(v == kProbabilityFloor);
  const ViterbiPath p = Viterbi(lats[0]);
  CHECK(p.feasible);
  CHECK(p.final_region() == 0);
  CHECK(p.total_log_score == doctest::Approx(std::log(kProbabilityFloor)));
}

TEST_CASE("branches must open with a region description") {
  const SceneGraph sg = ThreeRegions();
  OperationTuple relate{OpType::kRelate, "", {"dog", "next to", "s"}, false};
  OperationTuple exist{OpType::kExist, "", {"_"}, false};
  CHECK_THROWS_AS(BuildLattices(MakeSequence({relate, exist}), sg), BuildError);
  CHECK_THROWS_AS(BuildLattices(OperationSequence{}, sg), BuildError);
}

TEST_CASE("building is deterministic and serializes") {
  const SceneGraph sg = ThreeRegions();
  const auto seq = ParseProgramString(
      "(select; animal) -> (filter color; not(red)) -> (relate; dog,next to,s) -> (exist; _)");
  const Json a = LatticeToJson(BuildLattices(seq, sg)[0]);
  const Json b = LatticeToJson(BuildLattices(seq, sg)[0]);
  CHECK(a.dump() == b.dump());
  CHECK(a.at("prior") == 1.0);
  REQUIRE(a.at("layers").size() == 3);
  CHECK(a["layers"][0]["transition_kind"] == "none");
  CHECK(a["layers"][1]["transition_kind"] == "identity");
  CHECK(a["layers"][2]["transition_kind"] == "relation");
  CHECK(a["layers"][1]["source_tuple"] == "(filter color; not(red))");
  CHECK(a["layers"][2]["transition_nonzeros"].size() == 2);
}

TEST_CASE("final object name follows the last describing tuple") {
  auto v = SmallVocab();
  const SceneGraph sg = ThreeRegions();
  auto name = [&](const char *program) {
    return FinalObjectName(BuildLattices(ParseProgramString(program), sg)[0], *v);
  };
  CHECK(name("(select; cat) -> (query; name)") == "cat");
  CHECK(name("(select; cat) -> (relate; dog,next to,s) -> (query; name)") == "dog");
  CHECK(name("(select; cat) -> (relate; _,next to,s) -> (query; name)") == "");
}

}  // namespace
}  // namespace vlr
