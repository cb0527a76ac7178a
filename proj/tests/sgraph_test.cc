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

#include "vlr/sgraph.h"

#include <algorithm>

#include "doctest.h"
#include "test_util.h"

namespace vlr {
namespace {

using testing::GridBoxes;
using testing::SmallVocab;

TEST_CASE("vocabulary rejects inconsistent definitions") {
  using V = std::vector<std::string>;
  CHECK_THROWS_AS(Vocabulary(V{"cat", "cat"}, {}, {}, {}, {}), Error);
  CHECK_THROWS_AS(Vocabulary(V{"cat"}, {}, {}, {{"animal", {"dog"}}}, {}), Error);
  CHECK_THROWS_AS(Vocabulary(V{"cat"}, {}, {}, {}, {{"cats", "kitten"}}), Error);
  CHECK_THROWS_AS(Vocabulary(V{"cat"}, {{"color", {"red", "red"}}}, {}, {}, {}),
                  Error);
}

TEST_CASE("vocabulary lookups") {
  auto v = SmallVocab();
  CHECK(*v->ObjectClassIndex("dog") == 1);
  CHECK_FALSE(v->ObjectClassIndex("unicorn"));
  CHECK(*v->RelationIndex("covered by") == 2);
  CHECK(*v->FirstCategoryOf("metal") == 1);
  CHECK(*v->AttributeIndex(0, "white") == 2);
  CHECK_FALSE(v->AttributeIndex(1, "white"));
  CHECK(v->IsObjectCategory("animal"));
  CHECK(v->max_category_size() == 4);
}

TEST_CASE("normalize_name") {
  auto v = SmallVocab();
  CHECK(*NormalizeName("cats", *v) == "cat");
  CHECK(*NormalizeName("cat", *v) == "cat");
  CHECK_FALSE(NormalizeName("unicorn", *v));
  // Plural fallback with no alias entry.
  CHECK(*NormalizeName("dogs", *v) == "dog");
  CHECK(*NormalizeName("animals", *v) == "animal");
  CHECK(*NormalizeName("socks", *v) == "sock");
  CHECK_FALSE(NormalizeName("unicorns", *v));
}

TEST_CASE("scene graph setters check ranges") {
  SceneGraph sg(SmallVocab(), "img", GridBoxes(2));
  CHECK_THROWS_AS(sg.SetObject(2, 0, 0.5), Error);
  CHECK_THROWS_AS(sg.SetObject(0, 0, 1.5), Error);
  CHECK_THROWS_AS(sg.SetObject(0, 0, -0.1), Error);
  CHECK_THROWS_AS(sg.SetRelation(1, 1, 0, 0.5), Error);
  sg.SetObject(0, 0, 0.7);
  sg.SetObject(0, 1, 0.5);
  CHECK_THROWS_AS(sg.Validate(), Error);
}

TEST_CASE("emission_for_class") {
  SceneGraph sg(SmallVocab(), "img", GridBoxes(2));
  sg.SetObject(0, 0, 0.6);
  sg.SetObject(1, 0, 0.2);
  EmissionVector e = EmissionForClass(sg, "cat");
  CHECK(e.values == std::vector<double>{0.6, 0.2});
  CHECK(e.source == EmissionSource::kObjectClass);

  SceneGraph one_hot(SmallVocab(), "img", GridBoxes(2));
  one_hot.SetObject(0, 0, 1.0);
  CHECK(EmissionForClass(one_hot, "cat").values[0] == 1.0);

  Diagnostics diag;
  e = EmissionForClass(sg, "unicorn", &diag);
  CHECK(e.values == std::vector<double>{0.0, 0.0});
  CHECK_FALSE(diag.empty());
}

TEST_CASE("emission_for_category sums and clamps") {
  SceneGraph sg(SmallVocab(), "img", GridBoxes(2));
  sg.SetObject(0, 0, 0.6);
  sg.SetObject(0, 1, 0.3);
  sg.SetObject(1, 2, 0.4);
  CHECK(EmissionForCategory(sg, "animal").values[0] == doctest::Approx(0.9));
  // Singleton category equals its class.
  CHECK(EmissionForCategory(sg, "food").values ==
        EmissionForClass(sg, "apple").values);
  // Unnormalized detector scores can overshoot; the clamp keeps 1.
  SceneGraph hot(SmallVocab(), "img", GridBoxes(1));
  hot.SetObject(0, 0, 0.7);
  hot.SetObject(0, 1, 0.5);
  CHECK(EmissionForCategory(hot, "animal").values[0] == 1.0);
  CHECK(EmissionForObject(hot, "animal").source == EmissionSource::kObjectCategory);
  CHECK(EmissionForObject(hot, "cat").source == EmissionSource::kObjectClass);
}

TEST_CASE("emission_for_attribute and negation") {
  SceneGraph sg(SmallVocab(), "img", GridBoxes(1));
  sg.SetAttribute(0, 0, 2, 0.2);  // white
  sg.SetAttribute(0, 0, 1, 0.7);  // green
  CHECK(EmissionForAttribute(sg, "color", "white", true).values[0] ==
        doctest::Approx(0.8));
  CHECK(EmissionForAttribute(sg, "", "green", false).values[0] == 0.7);
  CHECK(EmissionForAttribute(sg, "color", "red", true).values[0] == 1.0);
  CHECK(EmissionForAttribute(sg, "color", "white", true).source ==
        EmissionSource::kAttributeNegated);
  Diagnostics diag;
  CHECK(EmissionForAttribute(sg, "material", "white", false, &diag).values[0] ==
        0.0);
  CHECK_FALSE(diag.empty());
}

TEST_CASE("transition_for_relation") {
  SceneGraph sg(SmallVocab(), "img", GridBoxes(3));
  sg.SetRelation(0, 1, 0, 0.7);
  sg.SetRelation(2, 0, 0, 0.4);
  TransitionMatrix m =
      TransitionForRelation(sg, "next to", RelationDirection::kSubjectToObject);
  CHECK(m.at(0, 1) == 0.7);
  CHECK(m.at(2, 0) == 0.4);
  for (int i = 0; i < 3; ++i) CHECK(m.at(i, i) == 0.0);
  TransitionMatrix t =
      TransitionForRelation(sg, "next to", RelationDirection::kObjectToSubject);
  CHECK(t.at(1, 0) == 0.7);
  CHECK(t.at(0, 2) == 0.4);
  CHECK(t.at(0, 1) == 0.0);
  Diagnostics diag;
  TransitionMatrix z = TransitionForRelation(
      sg, "flying over", RelationDirection::kSubjectToObject, &diag);
  CHECK(std::all_of(z.values.begin(), z.values.end(),
                    [](double v) { return v == 0.0; }));
  CHECK_FALSE(diag.empty());
}

TEST_CASE("negation identity holds exactly on random values") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SceneGraph sg(SmallVocab(), "img", GridBoxes(4));
  for (int r = 0; r < 4; ++r) {
    for (int a = 0; a < 4; ++a) sg.SetAttribute(r, 0, a, unit(rng) / 4);
  }
  for (const char *attr : {"red", "green", "white", "blue"}) {
    auto plain = EmissionForAttribute(sg, "color", attr, false).values;
    auto neg = EmissionForAttribute(sg, "color", attr, true).values;
    for (int r = 0; r < 4; ++r) CHECK(plain[r] + neg[r] == 1.0);
  }
}

}  // namespace
}  // namespace vlr
