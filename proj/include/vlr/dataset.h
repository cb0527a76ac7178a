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

// On-disk dataset layout (all UTF-8 JSON):
//
//   DIR/vocab.json          vocabulary
//   DIR/templates.json      question grammar (optional)
//   DIR/scenes/<id>.json    one scene graph per image
//   DIR/questions.json      [{qid, image_id, text, program?, answer,
//                             category, partition?}]
//   DIR/grounding.json      [{qid, Q, A, FA}] (optional)

#ifndef VLR_DATASET_H_
#define VLR_DATASET_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vlr/grounding.h"
#include "vlr/opseq.h"
#include "vlr/sgraph.h"
#include "vlr/template_grammar.h"

namespace vlr {

struct Question {
  std::string qid;
  std::string image_id;
  std::string text;
  // Gold program in tuple notation.
  std::optional<std::string> program;
  std::string answer;
  StructuralCategory category = StructuralCategory::kVerify;
  // Original partition ("train", "test", ...); empty if unpartitioned.
  std::string partition;
};

Question QuestionFromJson(const Json &j);
Json QuestionToJson(const Question &q);

struct Dataset {
  std::shared_ptr<const Vocabulary> vocabulary;
  TemplateGrammar grammar;
  std::map<std::string, std::shared_ptr<const SceneGraph>> scenes;
  std::vector<Question> questions;
  std::map<std::string, GroundingAnnotation> annotations;

  // Throws Error if a question references a missing image or repeats a qid.
  void Validate() const;
  const GroundingAnnotation *FindAnnotation(const std::string &qid) const;
  // Copy restricted to the given questions (scenes shared).
  Dataset Subset(const std::vector<std::string> &qids) const;
};

Dataset LoadDataset(const std::string &dir);
void SaveDataset(const Dataset &ds, const std::string &dir);

}  // namespace vlr

#endif  // VLR_DATASET_H_
