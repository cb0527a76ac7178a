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

#include "vlr/dataset.h"

#include <algorithm>
#include <filesystem>
#include <set>

namespace vlr {

namespace fs = std::filesystem;

Question QuestionFromJson(const Json &j) {
  Question q;
  try {
    q.qid = j.at("qid").get<std::string>();
    q.image_id = j.at("image_id").get<std::string>();
    q.text = j.value("text", std::string());
    if (j.contains("program") && !j["program"].is_null()) {
      q.program = j["program"].get<std::string>();
    }
    q.answer = j.at("answer").get<std::string>();
    const std::string category = j.at("category").get<std::string>();
    auto parsed = StructuralCategoryFromName(category);
    if (!parsed) throw Error("unknown structural category '" + category + "'");
    q.category = *parsed;
    q.partition = j.value("partition", std::string());
  } catch (const Json::exception &e) {
    throw Error(std::string("malformed question: ") + e.what());
  }
  return q;
}

Json QuestionToJson(const Question &q) {
  Json j = {{"qid", q.qid},
            {"image_id", q.image_id},
            {"text", q.text},
            {"answer", q.answer},
            {"category", StructuralCategoryName(q.category)}};
  if (q.program) j["program"] = *q.program;
  if (!q.partition.empty()) j["partition"] = q.partition;
  return j;
}

void Dataset::Validate() const {
  if (vocabulary == nullptr) throw Error("dataset without vocabulary");
  std::set<std::string> qids;
  for (const Question &q : questions) {
    if (!qids.insert(q.qid).second) {
      throw Error("duplicate question id '" + q.qid + "'");
    }
    if (!scenes.count(q.image_id)) {
      throw Error("question '" + q.qid + "' references unknown image '" +
                  q.image_id + "'");
    }
  }
}

const GroundingAnnotation *Dataset::FindAnnotation(const std::string &qid) const {
  auto it = annotations.find(qid);
  return it == annotations.end() ? nullptr : &it->second;
}

Dataset Dataset::Subset(const std::vector<std::string> &qids) const {
  std::set<std::string> keep(qids.begin(), qids.end());
  Dataset out;
  out.vocabulary = vocabulary;
  out.grammar = grammar;
  for (const Question &q : questions) {
    if (!keep.count(q.qid)) continue;
    out.questions.push_back(q);
    out.scenes[q.image_id] = scenes.at(q.image_id);
    if (const GroundingAnnotation *a = FindAnnotation(q.qid)) {
      out.annotations[q.qid] = *a;
    }
  }
  return out;
}

Dataset LoadDataset(const std::string &dir) {
  const fs::path root(dir);
  Dataset ds;
  ds.vocabulary = LoadVocabulary((root / "vocab.json").string());
  if (fs::exists(root / "templates.json")) {
    ds.grammar = TemplateGrammar::Load((root / "templates.json").string());
  }
  const fs::path scenes = root / "scenes";
  if (fs::is_directory(scenes)) {
    std::vector<fs::path> files;
    for (const auto &entry : fs::directory_iterator(scenes)) {
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path &file : files) {
      auto sg = std::make_shared<const SceneGraph>(
          LoadSceneGraph(file.string(), ds.vocabulary));
      const std::string id =
          sg->image_id().empty() ? file.stem().string() : sg->image_id();
      ds.scenes[id] = std::move(sg);
    }
  }
  for (const Json &q : ReadJsonFile((root / "questions.json").string())) {
    ds.questions.push_back(QuestionFromJson(q));
  }
  if (fs::exists(root / "grounding.json")) {
    for (const Json &a : ReadJsonFile((root / "grounding.json").string())) {
      GroundingAnnotation ann = AnnotationFromJson(a);
      ds.annotations[ann.qid] = std::move(ann);
    }
  }
  ds.Validate();
  return ds;
}

void SaveDataset(const Dataset &ds, const std::string &dir) {
  const fs::path root(dir);
  fs::create_directories(root / "scenes");
  WriteJsonFile((root / "vocab.json").string(), VocabularyToJson(*ds.vocabulary));
  if (!ds.grammar.templates().empty()) {
    WriteJsonFile((root / "templates.json").string(), ds.grammar.ToJson());
  }
  for (const auto &[id, sg] : ds.scenes) {
    WriteJsonFile((root / "scenes" / (id + ".json")).string(),
                  SceneGraphToJson(*sg));
  }
  Json questions = Json::array();
  for (const Question &q : ds.questions) questions.push_back(QuestionToJson(q));
  WriteJsonFile((root / "questions.json").string(), questions);
  Json grounding = Json::array();
  for (const auto &[qid, a] : ds.annotations) grounding.push_back(AnnotationToJson(a));
  WriteJsonFile((root / "grounding.json").string(), grounding);
}

}  // namespace vlr
