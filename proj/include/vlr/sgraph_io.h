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

// JSON schemas for vocabularies and scene graphs.
//
// Vocabulary:
//   {"object_classes": [..], "attribute_categories": [{"name", "attributes"}],
//    "relation_classes": [..], "object_categories": {name: [members]},
//    "aliases": {surface: canonical}}
// Scene graph (one per image, omitted probabilities are 0):
//   {"image_id", "regions": [{"box": [x0,y0,x1,y1], "objects": {cls: p},
//    "attributes": {category: {attr: p}}}],
//    "relations": [[subject, object, relation, p], ..]}

#ifndef VLR_SGRAPH_IO_H_
#define VLR_SGRAPH_IO_H_

#include <memory>
#include <string>

#include "json.hpp"
#include "vlr/sgraph.h"

namespace vlr {

using Json = nlohmann::json;

Json ReadJsonFile(const std::string &path);
void WriteJsonFile(const std::string &path, const Json &value);

Box BoxFromJson(const Json &j);
Json BoxToJson(const Box &box);

std::shared_ptr<const Vocabulary> VocabularyFromJson(const Json &j);
Json VocabularyToJson(const Vocabulary &vocabulary);
std::shared_ptr<const Vocabulary> LoadVocabulary(const std::string &path);

// Throws Error for unknown names, out-of-range values or self-relations.
SceneGraph SceneGraphFromJson(const Json &j,
                              std::shared_ptr<const Vocabulary> vocabulary);
// Canonical form: zero entries dropped, keys sorted, relations ordered by
// (subject, object, relation index).
Json SceneGraphToJson(const SceneGraph &sg);
SceneGraph LoadSceneGraph(const std::string &path,
                          std::shared_ptr<const Vocabulary> vocabulary);

}  // namespace vlr

#endif  // VLR_SGRAPH_IO_H_
