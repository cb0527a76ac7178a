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

// Probabilistic scene graphs and the elementary queries that turn them into
// lattice emissions and transitions.

#ifndef VLR_SGRAPH_H_
#define VLR_SGRAPH_H_

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vlr/diagnostics.h"

namespace vlr {

// Axis-aligned pixel box.
struct Box {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  bool well_formed() const { return x0 < x1 && y0 < y1; }
  double area() const { return well_formed() ? (x1 - x0) * (y1 - y0) : 0.0; }
  bool operator==(const Box &other) const = default;
};

struct AttributeCategory {
  std::string name;
  std::vector<std::string> attributes;
};

struct ObjectCategory {
  std::string name;
  std::vector<std::string> members;
};

// Names of everything a scene graph can score. Indices are stable for the
// lifetime of the object. The constructor validates uniqueness and that
// category members and alias targets exist.
class Vocabulary {
 public:
  Vocabulary(std::vector<std::string> object_classes,
             std::vector<AttributeCategory> attribute_categories,
             std::vector<std::string> relation_classes,
             std::vector<ObjectCategory> object_categories,
             std::map<std::string, std::string> aliases);

  const std::vector<std::string> &object_classes() const {
    return object_classes_;
  }
  const std::vector<AttributeCategory> &attribute_categories() const {
    return attribute_categories_;
  }
  const std::vector<std::string> &relation_classes() const {
    return relation_classes_;
  }
  const std::vector<ObjectCategory> &object_categories() const {
    return object_categories_;
  }
  const std::map<std::string, std::string> &aliases() const {
    return aliases_;
  }

  // Widest attribute category; the attribute tensor is padded to this.
  int max_category_size() const { return max_category_size_; }

  std::optional<int> ObjectClassIndex(std::string_view name) const;
  std::optional<int> RelationIndex(std::string_view name) const;
  std::optional<int> AttributeCategoryIndex(std::string_view name) const;
  std::optional<int> AttributeIndex(int category, std::string_view name) const;
  // First category in vocabulary order that lists the attribute.
  std::optional<int> FirstCategoryOf(std::string_view attribute) const;
  const ObjectCategory *FindObjectCategory(std::string_view name) const;
  std::optional<std::string> ResolveAlias(std::string_view surface) const;

  bool IsObjectClass(std::string_view name) const {
    return ObjectClassIndex(name).has_value();
  }
  bool IsObjectCategory(std::string_view name) const {
    return FindObjectCategory(name) != nullptr;
  }
  bool IsObjectName(std::string_view name) const {
    return IsObjectClass(name) || IsObjectCategory(name);
  }
  bool IsAttribute(std::string_view name) const {
    return FirstCategoryOf(name).has_value();
  }
  bool IsAttributeCategory(std::string_view name) const {
    return AttributeCategoryIndex(name).has_value();
  }
  bool IsRelation(std::string_view name) const {
    return RelationIndex(name).has_value();
  }
  bool IsKnownName(std::string_view name) const {
    return IsObjectName(name) || IsAttribute(name) || IsRelation(name) ||
           IsAttributeCategory(name);
  }

 private:
  std::vector<std::string> object_classes_;
  std::vector<AttributeCategory> attribute_categories_;
  std::vector<std::string> relation_classes_;
  std::vector<ObjectCategory> object_categories_;
  std::map<std::string, std::string> aliases_;

  std::unordered_map<std::string, int> object_index_;
  std::unordered_map<std::string, int> relation_index_;
  std::unordered_map<std::string, int> category_index_;
  std::unordered_map<std::string, int> object_category_index_;
  std::vector<std::unordered_map<std::string, int>> attribute_index_;
  std::unordered_map<std::string, int> first_category_;
  int max_category_size_ = 0;
};

// Per-image probability tables over N detected regions.
//
// Storage is dense: objects N x C, attributes N x K x M (padded to the widest
// category), relations R x N x N. Setters range-check indices and values;
// call Validate() once filled. Treat as immutable once shared.
class SceneGraph {
 public:
  SceneGraph(std::shared_ptr<const Vocabulary> vocabulary,
             std::string image_id, std::vector<Box> boxes);

  const Vocabulary &vocabulary() const { return *vocabulary_; }
  const std::shared_ptr<const Vocabulary> &shared_vocabulary() const {
    return vocabulary_;
  }
  const std::string &image_id() const { return image_id_; }
  int num_regions() const { return static_cast<int>(boxes_.size()); }
  const std::vector<Box> &boxes() const { return boxes_; }

  double object_prob(int region, int object_class) const {
    return objects_[Index(region) * num_classes_ + object_class];
  }
  double attribute_prob(int region, int category, int attribute) const {
    return attributes_[(Index(region) * num_categories_ + category) *
                           max_category_size_ +
                       attribute];
  }
  // Probability that `subject` stands in `relation` to `object`.
  double relation_prob(int subject, int object, int relation) const {
    return relations_[(static_cast<size_t>(relation) * boxes_.size() +
                       subject) * boxes_.size() + object];
  }

  void SetObject(int region, int object_class, double p);
  void SetAttribute(int region, int category, int attribute, double p);
  void SetRelation(int subject, int object, int relation, double p);

  // Throws Error on any invariant violation.
  void Validate() const;

 private:
  size_t Index(int region) const { return static_cast<size_t>(region); }
  void CheckRegion(int region) const;

  std::shared_ptr<const Vocabulary> vocabulary_;
  std::string image_id_;
  std::vector<Box> boxes_;
  size_t num_classes_ = 0;
  size_t num_categories_ = 0;
  size_t max_category_size_ = 0;
  size_t num_relations_ = 0;
  std::vector<double> objects_;
  std::vector<double> attributes_;
  std::vector<double> relations_;
};

enum class EmissionSource {
  kObjectClass,
  kObjectCategory,
  kAttribute,
  kAttributeNegated,
  kUnconstrained,
};

const char *EmissionSourceName(EmissionSource source);

struct EmissionVector {
  std::vector<double> values;
  EmissionSource source = EmissionSource::kObjectClass;
};

enum class TransitionKind { kRelation, kIdentity };

const char *TransitionKindName(TransitionKind kind);

// Row-major N x N matrix; at(x, r) is the probability of moving from region x
// to region r.
struct TransitionMatrix {
  int n = 0;
  std::vector<double> values;
  TransitionKind kind = TransitionKind::kIdentity;

  double at(int from, int to) const {
    return values[static_cast<size_t>(from) * n + to];
  }
  static TransitionMatrix Identity(int n);
};

// The trailing "s"/"o" marker of a relate argument. Subject-to-object means
// the current region is the subject and the next region is the object.
enum class RelationDirection { kSubjectToObject, kObjectToSubject };

// Maps a surface form to a vocabulary name: direct match, then the alias
// table, then a plural-suffix fallback on the last word. Case-sensitive;
// callers case-fold first.
std::optional<std::string> NormalizeName(std::string_view surface,
                                         const Vocabulary &vocabulary);

// Unknown names yield an all-zero result and a warning on `diag`.
EmissionVector EmissionForClass(const SceneGraph &sg, std::string_view name,
                                Diagnostics *diag = nullptr);
// Sum over member classes, clamped to 1.
EmissionVector EmissionForCategory(const SceneGraph &sg,
                                   std::string_view category,
                                   Diagnostics *diag = nullptr);
// Class if `name` is a class, otherwise category.
EmissionVector EmissionForObject(const SceneGraph &sg, std::string_view name,
                                 Diagnostics *diag = nullptr);
// An empty `category` resolves to the first category containing `attribute`.
EmissionVector EmissionForAttribute(const SceneGraph &sg,
                                    std::string_view category,
                                    std::string_view attribute, bool negated,
                                    Diagnostics *diag = nullptr);
// Hollow relation slice; the diagonal is forced to zero.
TransitionMatrix TransitionForRelation(const SceneGraph &sg,
                                       std::string_view relation,
                                       RelationDirection direction,
                                       Diagnostics *diag = nullptr);

}  // namespace vlr

#endif  // VLR_SGRAPH_H_
