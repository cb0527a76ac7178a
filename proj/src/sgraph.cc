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
#include <cctype>
#include <set>
#include <sstream>

namespace vlr {

namespace {

constexpr double kRowSumSlack = 1e-6;

std::string Trim(std::string_view s) {
  size_t begin = 0;
  size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) {
    ++begin;
  }
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) {
    --end;
  }
  return std::string(s.substr(begin, end - begin));
}

template <typename Map>
std::optional<int> Lookup(const Map &map, std::string_view key) {
  auto it = map.find(std::string(key));
  if (it == map.end()) return std::nullopt;
  return it->second;
}

void IndexUnique(const std::vector<std::string> &names, const char *what,
                 std::unordered_map<std::string, int> *index) {
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i].empty()) {
      throw Error(std::string("empty ") + what + " name");
    }
    if (!index->emplace(names[i], static_cast<int>(i)).second) {
      throw Error(std::string("duplicate ") + what + " name '" + names[i] +
                  "'");
    }
  }
}

void CheckProbability(double p, const char *what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream msg;
    msg << what << " probability " << p << " outside [0, 1]";
    throw Error(msg.str());
  }
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> object_classes,
                       std::vector<AttributeCategory> attribute_categories,
                       std::vector<std::string> relation_classes,
                       std::vector<ObjectCategory> object_categories,
                       std::map<std::string, std::string> aliases)
    : object_classes_(std::move(object_classes)),
      attribute_categories_(std::move(attribute_categories)),
      relation_classes_(std::move(relation_classes)),
      object_categories_(std::move(object_categories)),
      aliases_(std::move(aliases)) {
  IndexUnique(object_classes_, "object class", &object_index_);
  IndexUnique(relation_classes_, "relation", &relation_index_);

  attribute_index_.resize(attribute_categories_.size());
  for (size_t c = 0; c < attribute_categories_.size(); ++c) {
    const AttributeCategory &category = attribute_categories_[c];
    if (!category_index_.emplace(category.name, static_cast<int>(c)).second) {
      throw Error("duplicate attribute category '" + category.name + "'");
    }
    if (category.attributes.empty()) {
      throw Error("attribute category '" + category.name + "' is empty");
    }
    IndexUnique(category.attributes, "attribute", &attribute_index_[c]);
    for (const std::string &attribute : category.attributes) {
      first_category_.emplace(attribute, static_cast<int>(c));
    }
    max_category_size_ = std::max(
        max_category_size_, static_cast<int>(category.attributes.size()));
  }

  for (size_t c = 0; c < object_categories_.size(); ++c) {
    const ObjectCategory &category = object_categories_[c];
    if (!object_category_index_.emplace(category.name, static_cast<int>(c))
             .second) {
      throw Error("duplicate object category '" + category.name + "'");
    }
    if (category.members.empty()) {
      throw Error("object category '" + category.name + "' is empty");
    }
    std::set<std::string> seen;
    for (const std::string &member : category.members) {
      if (!IsObjectClass(member)) {
        throw Error("object category '" + category.name +
                    "' lists unknown class '" + member + "'");
      }
      if (!seen.insert(member).second) {
        throw Error("object category '" + category.name +
                    "' lists '" + member + "' twice");
      }
    }
  }

  for (const auto &[surface, target] : aliases_) {
    if (!IsObjectName(target) && !IsAttribute(target) && !IsRelation(target)) {
      throw Error("alias '" + surface + "' targets unknown name '" + target +
                  "'");
    }
  }
}

std::optional<int> Vocabulary::ObjectClassIndex(std::string_view name) const {
  return Lookup(object_index_, name);
}

std::optional<int> Vocabulary::RelationIndex(std::string_view name) const {
  return Lookup(relation_index_, name);
}

std::optional<int> Vocabulary::AttributeCategoryIndex(
    std::string_view name) const {
  return Lookup(category_index_, name);
}

std::optional<int> Vocabulary::AttributeIndex(int category,
                                              std::string_view name) const {
  if (category < 0 || category >= static_cast<int>(attribute_index_.size())) {
    return std::nullopt;
  }
  return Lookup(attribute_index_[category], name);
}

std::optional<int> Vocabulary::FirstCategoryOf(
    std::string_view attribute) const {
  return Lookup(first_category_, attribute);
}

const ObjectCategory *Vocabulary::FindObjectCategory(
    std::string_view name) const {
  auto index = Lookup(object_category_index_, name);
  return index ? &object_categories_[*index] : nullptr;
}

std::optional<std::string> Vocabulary::ResolveAlias(
    std::string_view surface) const {
  auto it = aliases_.find(std::string(surface));
  if (it == aliases_.end()) return std::nullopt;
  return it->second;
}

SceneGraph::SceneGraph(std::shared_ptr<const Vocabulary> vocabulary,
                       std::string image_id, std::vector<Box> boxes)
    : vocabulary_(std::move(vocabulary)),
      image_id_(std::move(image_id)),
      boxes_(std::move(boxes)) {
  if (vocabulary_ == nullptr) throw Error("scene graph without vocabulary");
  if (boxes_.empty()) throw Error("scene graph needs at least one region");
  for (size_t i = 0; i < boxes_.size(); ++i) {
    if (!boxes_[i].well_formed()) {
      throw Error("region " + std::to_string(i) + " has a malformed box");
    }
  }
  const size_t n = boxes_.size();
  num_classes_ = vocabulary_->object_classes().size();
  num_categories_ = vocabulary_->attribute_categories().size();
  max_category_size_ = vocabulary_->max_category_size();
  num_relations_ = vocabulary_->relation_classes().size();
  objects_.assign(n * num_classes_, 0.0);
  attributes_.assign(n * num_categories_ * max_category_size_, 0.0);
  relations_.assign(num_relations_ * n * n, 0.0);
}

void SceneGraph::CheckRegion(int region) const {
  if (region < 0 || region >= num_regions()) {
    throw Error("region index " + std::to_string(region) + " out of range");
  }
}

void SceneGraph::SetObject(int region, int object_class, double p) {
  CheckRegion(region);
  if (object_class < 0 || static_cast<size_t>(object_class) >= num_classes_) {
    throw Error("object class index out of range");
  }
  CheckProbability(p, "object");
  objects_[Index(region) * num_classes_ + object_class] = p;
}

void SceneGraph::SetAttribute(int region, int category, int attribute,
                              double p) {
  CheckRegion(region);
  if (category < 0 || static_cast<size_t>(category) >= num_categories_ ||
      attribute < 0 ||
      static_cast<size_t>(attribute) >=
          vocabulary_->attribute_categories()[category].attributes.size()) {
    throw Error("attribute index out of range");
  }
  CheckProbability(p, "attribute");
  attributes_[(Index(region) * num_categories_ + category) *
                  max_category_size_ +
              attribute] = p;
}

void SceneGraph::SetRelation(int subject, int object, int relation, double p) {
  CheckRegion(subject);
  CheckRegion(object);
  if (relation < 0 || static_cast<size_t>(relation) >= num_relations_) {
    throw Error("relation index out of range");
  }
  CheckProbability(p, "relation");
  if (subject == object && p != 0.0) {
    throw Error("region " + std::to_string(subject) +
                " cannot relate to itself");
  }
  relations_[(static_cast<size_t>(relation) * boxes_.size() + subject) *
                 boxes_.size() +
             object] = p;
}

void SceneGraph::Validate() const {
  const int n = num_regions();
  for (int r = 0; r < n; ++r) {
    double sum = 0.0;
    for (size_t c = 0; c < num_classes_; ++c) sum += object_prob(r, c);
    if (sum > 1.0 + kRowSumSlack) {
      std::ostringstream msg;
      msg << "object row " << r << " of image '" << image_id_
          << "' sums to " << sum;
      throw Error(msg.str());
    }
  }
  for (size_t rel = 0; rel < num_relations_; ++rel) {
    for (int r = 0; r < n; ++r) {
      if (relation_prob(r, r, rel) != 0.0) {
        throw Error("relation tensor diagonal is non-zero");
      }
    }
  }
}

const char *EmissionSourceName(EmissionSource source) {
  switch (source) {
    case EmissionSource::kObjectClass:
      return "object-class";
    case EmissionSource::kObjectCategory:
      return "object-category";
    case EmissionSource::kAttribute:
      return "attribute";
    case EmissionSource::kAttributeNegated:
      return "attribute-negated";
    case EmissionSource::kUnconstrained:
      return "unconstrained";
  }
  return "unknown";
}

const char *TransitionKindName(TransitionKind kind) {
  return kind == TransitionKind::kRelation ? "relation" : "identity";
}

TransitionMatrix TransitionMatrix::Identity(int n) {
  TransitionMatrix m;
  m.n = n;
  m.kind = TransitionKind::kIdentity;
  m.values.assign(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) m.values[static_cast<size_t>(i) * n + i] = 1.0;
  return m;
}

std::optional<std::string> NormalizeName(std::string_view surface,
                                         const Vocabulary &vocabulary) {
  const std::string name = Trim(surface);
  if (name.empty()) return std::nullopt;
  if (vocabulary.IsKnownName(name)) return name;
  if (auto alias = vocabulary.ResolveAlias(name)) return alias;

  // Plural fallback on the head word: "benches" -> "bench", "berries" ->
  // "berry", "cars" -> "car". Only accepted if the result is a known name.
  auto accept = [&](std::string candidate) -> std::optional<std::string> {
    if (vocabulary.IsKnownName(candidate)) return candidate;
    return std::nullopt;
  };
  auto ends_with = [&](std::string_view suffix) {
    return name.size() > suffix.size() &&
           name.compare(name.size() - suffix.size(), suffix.size(),
                        suffix) == 0;
  };
  if (ends_with("ies")) {
    if (auto hit = accept(name.substr(0, name.size() - 3) + "y")) return hit;
  }
  if (ends_with("es")) {
    if (auto hit = accept(name.substr(0, name.size() - 2))) return hit;
  }
  if (ends_with("s")) {
    if (auto hit = accept(name.substr(0, name.size() - 1))) return hit;
  }
  return std::nullopt;
}

EmissionVector EmissionForClass(const SceneGraph &sg, std::string_view name,
                                Diagnostics *diag) {
  EmissionVector out;
  out.source = EmissionSource::kObjectClass;
  out.values.assign(sg.num_regions(), 0.0);
  auto index = sg.vocabulary().ObjectClassIndex(name);
  if (!index) {
    Warn(diag, "unknown object class '" + std::string(name) + "'");
    return out;
  }
  for (int r = 0; r < sg.num_regions(); ++r) {
    out.values[r] = sg.object_prob(r, *index);
  }
  return out;
}

EmissionVector EmissionForCategory(const SceneGraph &sg,
                                   std::string_view category,
                                   Diagnostics *diag) {
  EmissionVector out;
  out.source = EmissionSource::kObjectCategory;
  out.values.assign(sg.num_regions(), 0.0);
  const ObjectCategory *found = sg.vocabulary().FindObjectCategory(category);
  if (found == nullptr) {
    Warn(diag, "unknown object category '" + std::string(category) + "'");
    return out;
  }
  for (const std::string &member : found->members) {
    const int c = *sg.vocabulary().ObjectClassIndex(member);
    for (int r = 0; r < sg.num_regions(); ++r) {
      out.values[r] += sg.object_prob(r, c);
    }
  }
  for (double &v : out.values) v = std::min(v, 1.0);
  return out;
}

EmissionVector EmissionForObject(const SceneGraph &sg, std::string_view name,
                                 Diagnostics *diag) {
  if (sg.vocabulary().IsObjectClass(name)) {
    return EmissionForClass(sg, name, diag);
  }
  if (sg.vocabulary().IsObjectCategory(name)) {
    return EmissionForCategory(sg, name, diag);
  }
  Warn(diag, "unknown object name '" + std::string(name) + "'");
  EmissionVector out;
  out.source = EmissionSource::kObjectClass;
  out.values.assign(sg.num_regions(), 0.0);
  return out;
}

EmissionVector EmissionForAttribute(const SceneGraph &sg,
                                    std::string_view category,
                                    std::string_view attribute, bool negated,
                                    Diagnostics *diag) {
  const Vocabulary &vocab = sg.vocabulary();
  EmissionVector out;
  out.source =
      negated ? EmissionSource::kAttributeNegated : EmissionSource::kAttribute;
  out.values.assign(sg.num_regions(), 0.0);

  std::optional<int> cat = category.empty()
                               ? vocab.FirstCategoryOf(attribute)
                               : vocab.AttributeCategoryIndex(category);
  std::optional<int> attr;
  if (cat) attr = vocab.AttributeIndex(*cat, attribute);
  if (!attr) {
    Warn(diag, "attribute '" + std::string(attribute) + "' not in category '" +
                   std::string(category) + "'");
    return out;
  }
  for (int r = 0; r < sg.num_regions(); ++r) {
    const double p = sg.attribute_prob(r, *cat, *attr);
    out.values[r] = negated ? 1.0 - p : p;
  }
  return out;
}

TransitionMatrix TransitionForRelation(const SceneGraph &sg,
                                       std::string_view relation,
                                       RelationDirection direction,
                                       Diagnostics *diag) {
  const int n = sg.num_regions();
  TransitionMatrix m;
  m.n = n;
  m.kind = TransitionKind::kRelation;
  m.values.assign(static_cast<size_t>(n) * n, 0.0);
  auto rel = sg.vocabulary().RelationIndex(relation);
  if (!rel) {
    Warn(diag, "unknown relation '" + std::string(relation) + "'");
    return m;
  }
  for (int x = 0; x < n; ++x) {
    for (int r = 0; r < n; ++r) {
      if (x == r) continue;
      m.values[static_cast<size_t>(x) * n + r] =
          direction == RelationDirection::kSubjectToObject
              ? sg.relation_prob(x, r, *rel)
              : sg.relation_prob(r, x, *rel);
    }
  }
  return m;
}

}  // namespace vlr
