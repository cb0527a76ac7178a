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

#include "vlr/synth.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "test_util.h"
#include "vlr/engine.h"
#include "vlr/sgraph_io.h"

namespace vlr {
namespace {

using testing::DefaultGrammar;
using testing::GridBoxes;
using testing::ScratchDir;
using testing::SmallVocab;

std::string Slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST_CASE("generation is byte-identical for a fixed seed") {
  SynthSpec spec;
  spec.seed = 42;
  spec.num_images = 10;
  const TemplateGrammar g = DefaultGrammar();
  const auto a = ScratchDir("synth_a");
  const auto b = ScratchDir("synth_b");
  SaveDataset(GenSynthetic(spec, g), a.string());
  SaveDataset(GenSynthetic(spec, g), b.string());
  int files = 0;
  for (const auto &entry : std::filesystem::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    ++files;
    const auto rel = std::filesystem::relative(entry.path(), a);
    CHECK(Slurp(entry.path()) == Slurp(b / rel));
  }
  CHECK(files >= 4);
  spec.seed = 43;
  const auto c = ScratchDir("synth_c");
  SaveDataset(GenSynthetic(spec, g), c.string());
  CHECK(Slurp(a / "questions.json") != Slurp(c / "questions.json"));
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
  std::filesystem::remove_all(c);
}

TEST_CASE("zero noise gives one-hot scene graphs") {
  SynthSpec spec;
  spec.num_images = 5;
  const Dataset ds = GenSynthetic(spec, DefaultGrammar());
  ds.Validate();
  CHECK(ds.scenes.size() == 5);
  CHECK(ds.questions.size() == 50);
  const Vocabulary &v = *ds.vocabulary;
  for (const auto &[id, sg] : ds.scenes) {
    const int n = sg->num_regions();
    for (int r = 0; r < n; ++r) {
      int hot = 0;
      for (size_t c = 0; c < v.object_classes().size(); ++c) {
        const double p = sg->object_prob(r, c);
        CHECK((p == 0.0 || p == 1.0));
        hot += p == 1.0;
      }
      CHECK(hot == 1);
      for (size_t k = 0; k < v.attribute_categories().size(); ++k) {
        for (size_t a = 0; a < v.attribute_categories()[k].attributes.size(); ++a) {
          const double p = sg->attribute_prob(r, k, a);
          CHECK((p == 0.0 || p == 1.0));
        }
      }
      for (int o = 0; o < n; ++o) {
        for (size_t rel = 0; rel < v.relation_classes().size(); ++rel) {
          const double p = sg->relation_prob(r, o, rel);
          CHECK((p == 0.0 || p == 1.0));
        }
      }
    }
  }
}

TEST_CASE("noisy graphs stay distributions and keep the truth dominant") {
  SynthSpec spec;
  spec.num_images = 4;
  spec.noise = 0.3;
  const SynthOutput out = GenerateSynthetic(spec, DefaultGrammar());
  const Vocabulary &v = *out.dataset.vocabulary;
  for (const TruthImage &truth : out.truth) {
    const SceneGraph &sg = *out.dataset.scenes.at(truth.image_id);
    for (int r = 0; r < truth.num_regions(); ++r) {
      double sum = 0;
      for (size_t c = 0; c < v.object_classes().size(); ++c) {
        sum += sg.object_prob(r, c);
        if (static_cast<int>(c) != truth.object_class[r]) {
          CHECK(sg.object_prob(r, c) < sg.object_prob(r, truth.object_class[r]));
        }
      }
      CHECK(sum == doctest::Approx(1.0));
      CHECK(sg.object_prob(r, truth.object_class[r]) >= 0.7);
    }
  }
}

TEST_CASE("truth executor on a hand-built image") {
  auto v = SmallVocab();
  TruthImage truth;
  truth.image_id = "img";
  truth.boxes = GridBoxes(3);
  truth.object_class = {0, 1, 0};  // cat, dog, cat
  truth.attribute = {{0, 0}, {1, 1}, {2, 0}};
  truth.edges = {{0, 1, 0}};  // cat next to dog
  const auto seq = ParseProgramString(
      "(select; cat) -> (relate; dog,next to,s) -> (exist; _)");
  CHECK(TruthAnswer(seq, truth, *v) == "yes");
  const auto chains = WitnessChains(seq, truth, *v);
  REQUIRE(chains.size() == 1);
  CHECK(chains[0] == std::vector<std::vector<int>>{{0, 1}});
  CHECK(TruthAnswer(ParseProgramString(
                        "(select; dog) -> (relate; cat,next to,s) -> (exist; _)"),
                    truth, *v) == "no");
  CHECK(TruthAnswer(ParseProgramString("(select; cat) -> (filter color; white) -> "
                                       "(query; material)"),
                    truth, *v) == "wooden");
  CHECK(TruthAnswer(ParseProgramString("(select; cat) -> (query; color)"), truth,
                    *v) == "unknown");

  const SceneGraph sg = NoisySceneGraph(truth, v, 0.0, 1.0, 9);
  CHECK(AnswerProgram(seq, sg, {}).answer.text == "yes");
  CHECK(sg.relation_prob(0, 1, 0) == 1.0);
}

TEST_CASE("parsing generated text recovers the gold program") {
  SynthSpec spec;
  spec.num_images = 40;
  spec.seed = 7;
  const Dataset ds = GenSynthetic(spec, DefaultGrammar());
  std::map<StructuralCategory, int> seen;
  for (const Question &q : ds.questions) {
    REQUIRE(q.program);
    auto parse = ParseQuestion(q.text, ds.grammar, *ds.vocabulary);
    REQUIRE_MESSAGE(parse, q.text);
    CHECK_MESSAGE(RenderProgramString(parse->program) == *q.program, q.text);
    ++seen[q.category];
  }
  CHECK(seen.size() == 5);
}

TEST_CASE("gold answers match the oracle engine") {
  SynthSpec spec;
  spec.num_images = 30;
  spec.seed = 3;
  const Dataset ds = GenSynthetic(spec, DefaultGrammar());
  for (const Question &q : ds.questions) {
    const SceneGraph &sg = *ds.scenes.at(q.image_id);
    CHECK_MESSAGE(AnswerProgram(ParseProgramString(*q.program), sg, {}).answer.text ==
                      q.answer,
                  q.text);
  }
}

TEST_CASE("answer filters") {
  SynthSpec spec;
  spec.num_images = 20;
  const auto vocab = MakeSynthVocabulary(spec);
  const std::string banned = vocab->object_classes()[0];
  spec.answer_exclude = {banned};
  for (const Question &q : GenSynthetic(spec, DefaultGrammar()).questions) {
    CHECK(q.answer != banned);
  }
  spec.answer_exclude.clear();
  spec.answer_only = {vocab->object_classes()[1], vocab->object_classes()[2]};
  spec.regions_per_image = 12;
  for (const Question &q : GenSynthetic(spec, DefaultGrammar()).questions) {
    CHECK(q.category == StructuralCategory::kQuery);
    CHECK((q.answer == spec.answer_only[0] || q.answer == spec.answer_only[1]));
  }
}

TEST_CASE("spec errors") {
  SynthSpec spec;
  spec.noise = 1.0;
  CHECK_THROWS_AS(spec.Validate(), Error);
  spec = SynthSpec();
  spec.regions_per_image = 1;
  spec.category_mix = {{StructuralCategory::kCompare, 1.0}};
  for (auto c : {StructuralCategory::kQuery, StructuralCategory::kVerify,
                 StructuralCategory::kLogical, StructuralCategory::kChoose}) {
    spec.category_mix[c] = 0.0;
  }
  CHECK_THROWS_AS(GenSynthetic(spec, DefaultGrammar()), Error);
  CHECK_THROWS_AS(SynthSpecFromJson(Json::parse(R"({"category_mix": {"count": 1}})")),
                  Error);
  const SynthSpec round = SynthSpecFromJson(SynthSpecToJson(SynthSpec()));
  CHECK(round.seed == 42);
  CHECK(round.num_images == 10);
}

}  // namespace
}  // namespace vlr
