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

#include "vlr/engine.h"

#include "doctest.h"
#include "test_util.h"

namespace vlr {
namespace {

using testing::GridBoxes;
using testing::SmallVocab;

// r0 red wooden cat next to r1 green dog; r2 white sock; r3 blue metal car.
SceneGraph Scene() {
  SceneGraph sg(SmallVocab(), "img", GridBoxes(4));
  sg.SetObject(0, 0, 0.95);
  sg.SetObject(1, 1, 0.9);
  sg.SetObject(2, 5, 0.85);
  sg.SetObject(3, 4, 0.9);
  sg.SetAttribute(0, 0, 0, 0.9);
  sg.SetAttribute(1, 0, 1, 0.8);
  sg.SetAttribute(2, 0, 2, 0.9);
  sg.SetAttribute(3, 0, 3, 0.8);
  sg.SetAttribute(0, 1, 0, 0.7);
  sg.SetAttribute(3, 1, 1, 0.9);
  sg.SetRelation(0, 1, 0, 0.9);
  sg.SetRelation(1, 0, 0, 0.9);
  sg.Validate();
  return sg;
}

std::string Ask(const char *program, const SceneGraph &sg) {
  return AnswerProgram(ParseProgramString(program), sg, {}).answer.text;
}

TEST_CASE("answers across structural categories") {
  const SceneGraph sg = Scene();
  CHECK(Ask("(select; cat) -> (exist; _)", sg) == "yes");
  CHECK(Ask("(select; apple) -> (exist; _)", sg) == "no");
  CHECK(Ask("(select; cat) -> (query; color)", sg) == "red");
  CHECK(Ask("(select; car) -> (query; material)", sg) == "metal");
  CHECK(Ask("(select; cat) -> (relate; _,next to,s) -> (query; name)", sg) == "dog");
  CHECK(Ask("(select; animal) -> (filter color; green) -> (query; name)", sg) == "dog");
  CHECK(Ask("(select; cat) -> (relate; dog,next to,s) -> (exist; _)", sg) == "yes");
  CHECK(Ask("(select; sock) -> (filter color; not(white)) -> (exist; _)", sg) == "no");
  CHECK(Ask("(select; car) -> (verify color; blue)", sg) == "yes");
  CHECK(Ask("(select; car) -> (verify color; red)", sg) == "no");
  CHECK(Ask("(select; cat) -> (exist; _) -> (select; car) -> (exist; _) -> (and; _)",
            sg) == "yes");
  CHECK(Ask("(select; apple) -> (exist; _) -> (select; chair) -> (exist; _) -> (or; _)",
            sg) == "no");
  CHECK(Ask("(select; sock) -> (choose color; red,white)", sg) == "white");
  CHECK(Ask("(select; animal) -> (choose name; dog,cat)", sg) == "cat");
  CHECK(Ask("(select; cat) -> (select; dog) -> (compare color; same)", sg) == "no");
  CHECK(Ask("(select; cat) -> (select; dog) -> (compare color; different)", sg) ==
        "yes");
}

TEST_CASE("query on a category restricts to its members") {
  SceneGraph sg(SmallVocab(), "img", GridBoxes(1));
  sg.SetObject(0, 2, 0.6);  // apple
  sg.SetObject(0, 1, 0.3);  // dog
  CHECK(Ask("(select; animal) -> (query; name)", sg) == "dog");
  CHECK(Ask("(select; apple) -> (query; name)", sg) == "apple");
}

TEST_CASE("attention follows the 1-best final regions") {
  const SceneGraph sg = Scene();
  QuestionResult r = AnswerProgram(
      ParseProgramString("(select; cat) -> (relate; _,next to,s) -> (query; name)"),
      sg, {});
  CHECK(r.attention.weights == std::vector<double>{0, 1, 0, 0});
  r = AnswerProgram(
      ParseProgramString(
          "(select; cat) -> (exist; _) -> (select; car) -> (exist; _) -> (and; _)"),
      sg, {});
  CHECK(r.attention.weights == std::vector<double>{0.5, 0, 0, 0.5});
  CHECK(r.answer.support == std::vector<int>{0, 3});
}

TEST_CASE("n-best lists and lattices on request") {
  const SceneGraph sg = Scene();
  EngineOptions opt;
  opt.with_nbest = true;
  opt.keep_lattices = true;
  opt.answer.nbest = 3;
  const QuestionResult r =
      AnswerProgram(ParseProgramString("(select; animal) -> (exist; _)"), sg, opt);
  REQUIRE(r.nbest.size() == 1);
  CHECK(r.nbest[0].size() == 3);
  CHECK(r.nbest[0][0].regions == std::vector<int>{0});
  CHECK(r.nbest[0][1].regions == std::vector<int>{1});
  CHECK(r.lattices.size() == 1);
  const Json j = QuestionResultToJson(r);
  CHECK(j.at("answer") == "yes");
  CHECK(j.at("type") == "verify");
  CHECK(j.contains("nbest"));
  CHECK(j.at("attention").size() == 4);
}

TEST_CASE("unknown names degrade with a warning") {
  const SceneGraph sg = Scene();
  Diagnostics diag;
  const QuestionResult r = AnswerProgram(
      ParseProgramString("(select; unicorn) -> (exist; _)"), sg, {}, &diag);
  CHECK(r.answer.text == "no");
  CHECK_FALSE(diag.empty());
}

}  // namespace
}  // namespace vlr
