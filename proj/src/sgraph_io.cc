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

#include "vlr/sgraph_io.h"

#include <fstream>
#include <sstream>

namespace vlr {

Json ReadJsonFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception &e) {
    throw Error("invalid JSON in '" + path + "': " + e.what());
  }
}

void WriteJsonFile(const std::string &path, const Json &value) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << value.dump(1) << "\n";
  if (!out) throw Error("write failed for '" + path + "'");
}

Box BoxFromJson(const Json &j) {
  if (!j.is_array() || j.size() != 4) {
    throw Error("box must be [x0, y0, x1, y1]");
  }
  Box box{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
          j[3].get<double>()};
  if (!box.well_formed()) throw Error("malformed box " + j.dump());
  return box;
}

Json BoxToJson(const Box &box) {
  return Json::array({box.x0, box.y0, box.x1, box.y1});
}

std::shared_ptr<const Vocabulary> VocabularyFromJson(const Json &j) {
  try {
    std::vector<std::string> objects =
        j.at("object_classes").get<std::vector<std::string>>();
    std::vector<AttributeCategory> attributes;
    for (const Json &c : j.value("attribute_categories", Json::array())) {
      attributes.push_back({c.at("name").get<std::string>(),
                            c.at("attributes").get<std::vector<std::string>>()});
    }
    std::vector<std::string> relations =
        j.value("relation_classes", std::vector<std::string>{});
    std::vector<ObjectCategory> categories;
    const Json object_categories = j.value("object_categories", Json::object());
    for (const auto &[name, members] : object_categories.items()) {
      categories.push_back({name, members.get<std::vector<std::string>>()});
    }
    std::map<std::string, std::string> aliases =
        j.value("aliases", std::map<std::string, std::string>{});
    return std::make_shared<const Vocabulary>(
        std::move(objects), std::move(attributes), std::move(relations),
        std::move(categories), std::move(aliases));
  } catch (const Json::exception &e) {
    throw Error(std::string("malformed vocabulary: ") + e.what());
  }
}

Json VocabularyToJson(const Vocabulary &vocabulary) {
  Json j;
  j["object_classes"] = vocabulary.object_classes();
  Json attributes = Json::array();
  for (const AttributeCategory &c : vocabulary.attribute_categories()) {
    attributes.push_back({{"name", c.name}, {"attributes", c.attributes}});
  }
  j["attribute_categories"] = attributes;
  j["relation_classes"] = vocabulary.relation_classes();
  Json categories = Json::object();
  for (const ObjectCategory &c : vocabulary.object_categories()) {
    categories[c.name] = c.members;
  }
  j["object_categories"] = categories;
  j["aliases"] = vocabulary.aliases();
  return j;
}

std::shared_ptr<const Vocabulary> LoadVocabulary(const std::string &path) {
  return VocabularyFromJson(ReadJsonFile(path));
}

SceneGraph SceneGraphFromJson(const Json &j,
                              std::shared_ptr<const Vocabulary> vocabulary) {
  try {
    const Json &regions = j.at("regions");
    std::vector<Box> boxes;
    for (const Json &region : regions) boxes.push_back(BoxFromJson(region.at("box")));
    SceneGraph sg(vocabulary, j.value("image_id", std::string()),
                  std::move(boxes));
    const Vocabulary &vocab = *vocabulary;

    for (size_t r = 0; r < regions.size(); ++r) {
      const Json &region = regions[r];
      const Json objects = region.value("objects", Json::object());
      for (const auto &[name, p] : objects.items()) {
        auto c = vocab.ObjectClassIndex(name);
        if (!c) throw Error("unknown object class '" + name + "'");
        sg.SetObject(r, *c, p.get<double>());
      }
      const Json attributes = region.value("attributes", Json::object());
      for (const auto &[category, values] : attributes.items()) {
        auto c = vocab.AttributeCategoryIndex(category);
        if (!c) throw Error("unknown attribute category '" + category + "'");
        for (const auto &[name, p] : values.items()) {
          auto a = vocab.AttributeIndex(*c, name);
          if (!a) {
            throw Error("attribute '" + name + "' not in category '" +
                        category + "'");
          }
          sg.SetAttribute(r, *c, *a, p.get<double>());
        }
      }
    }
    for (const Json &triple : j.value("relations", Json::array())) {
      if (!triple.is_array() || triple.size() != 4) {
        throw Error("relation entry must be [subject, object, relation, p]");
      }
      const std::string name = triple[2].get<std::string>();
      auto rel = vocab.RelationIndex(name);
      if (!rel) throw Error("unknown relation '" + name + "'");
      sg.SetRelation(triple[0].get<int>(), triple[1].get<int>(), *rel,
                     triple[3].get<double>());
    }
    sg.Validate();
    return sg;
  } catch (const Json::exception &e) {
    throw Error(std::string("malformed scene graph: ") + e.what());
  }
}

Json SceneGraphToJson(const SceneGraph &sg) {
  const Vocabulary &vocab = sg.vocabulary();
  Json regions = Json::array();
  for (int r = 0; r < sg.num_regions(); ++r) {
    Json objects = Json::object();
    for (size_t c = 0; c < vocab.object_classes().size(); ++c) {
      const double p = sg.object_prob(r, c);
      if (p != 0.0) objects[vocab.object_classes()[c]] = p;
    }
    Json attributes = Json::object();
    const auto &categories = vocab.attribute_categories();
    for (size_t c = 0; c < categories.size(); ++c) {
      Json values = Json::object();
      for (size_t a = 0; a < categories[c].attributes.size(); ++a) {
        const double p = sg.attribute_prob(r, c, a);
        if (p != 0.0) values[categories[c].attributes[a]] = p;
      }
      if (!values.empty()) attributes[categories[c].name] = values;
    }
    regions.push_back({{"box", BoxToJson(sg.boxes()[r])},
                       {"objects", objects},
                       {"attributes", attributes}});
  }
  Json relations = Json::array();
  const int n = sg.num_regions();
  const int num_relations = static_cast<int>(vocab.relation_classes().size());
  for (int s = 0; s < n; ++s) {
    for (int o = 0; o < n; ++o) {
      for (int rel = 0; rel < num_relations; ++rel) {
        const double p = sg.relation_prob(s, o, rel);
        if (p != 0.0) {
          relations.push_back({s, o, vocab.relation_classes()[rel], p});
        }
      }
    }
  }
  return {{"image_id", sg.image_id()},
          {"regions", regions},
          {"relations", relations}};
}

SceneGraph LoadSceneGraph(const std::string &path,
                          std::shared_ptr<const Vocabulary> vocabulary) {
  return SceneGraphFromJson(ReadJsonFile(path), std::move(vocabulary));
}

}  // namespace vlr
