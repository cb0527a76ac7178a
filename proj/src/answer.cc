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

#include "vlr/answer.h"

#include <algorithm>
#include <sstream>

namespace vlr {

namespace {

Answer Supported(StructuralCategory type,
                 std::initializer_list<const ViterbiPath *> paths) {
  Answer a;
  a.type = type;
  for (const ViterbiPath *p : paths) {
    a.paths.push_back(*p);
    a.confidence.push_back(GeometricMeanScore(*p));
    if (p->feasible) a.support.push_back(p->final_region());
  }
  return a;
}

// Score of `name` at `region` within an attribute category, or among object
// classes when category is "name". Unknown names score 0.
double ScoreAt(const SceneGraph &sg, int region, std::string_view category,
               std::string_view name) {
  const Vocabulary &vocab = sg.vocabulary();
  if (category == "name") {
    auto c = vocab.ObjectClassIndex(name);
    return c ? sg.object_prob(region, *c) : 0.0;
  }
  auto cat = vocab.AttributeCategoryIndex(category);
  if (!cat) return 0.0;
  auto a = vocab.AttributeIndex(*cat, name);
  return a ? sg.attribute_prob(region, *cat, *a) : 0.0;
}

std::optional<std::string> ArgmaxAttribute(const SceneGraph &sg, int region,
                                           std::string_view category) {
  const Vocabulary &vocab = sg.vocabulary();
  auto cat = vocab.AttributeCategoryIndex(category);
  if (!cat) return std::nullopt;
  const auto &names = vocab.attribute_categories()[*cat].attributes;
  size_t best = 0;
  for (size_t a = 1; a < names.size(); ++a) {
    if (sg.attribute_prob(region, *cat, a) >
        sg.attribute_prob(region, *cat, best)) {
      best = a;
    }
  }
  return names[best];
}

}  // namespace

void AnswerConfig::Validate() const {
  if (!(verify_threshold > 0.0 && verify_threshold < 1.0)) {
    std::ostringstream msg;
    msg << "verify threshold " << verify_threshold << " outside (0, 1)";
    throw Error(msg.str());
  }
  if (nbest < 1) throw Error("nbest must be at least 1");
}

Answer AnswerQuery(const ViterbiPath &path, const SceneGraph &sg,
                   const std::vector<std::string> *restriction,
                   std::string_view target) {
  Answer a = Supported(StructuralCategory::kQuery, {&path});
  if (!path.feasible) {
    a.text = kUnknown;
    return a;
  }
  const Vocabulary &vocab = sg.vocabulary();
  const int region = path.final_region();
  if (target == "name") {
    std::optional<int> best;
    for (size_t c = 0; c < vocab.object_classes().size(); ++c) {
      if (restriction != nullptr &&
          std::find(restriction->begin(), restriction->end(),
                    vocab.object_classes()[c]) == restriction->end()) {
        continue;
      }
      if (!best || sg.object_prob(region, c) > sg.object_prob(region, *best)) {
        best = static_cast<int>(c);
      }
    }
    a.text = best ? vocab.object_classes()[*best] : std::string(kUnknown);
    return a;
  }
  auto attr = ArgmaxAttribute(sg, region, target);
  a.text = attr ? *attr : std::string(kUnknown);
  return a;
}

Answer AnswerVerify(const ViterbiPath &path, const AnswerConfig &cfg) {
  Answer a = Supported(StructuralCategory::kVerify, {&path});
  a.text = a.confidence[0] >= cfg.verify_threshold ? kYes : kNo;
  return a;
}

Answer AnswerLogical(const ViterbiPath &first, const ViterbiPath &second,
                     OpType op, const AnswerConfig &cfg) {
  if (op != OpType::kAnd && op != OpType::kOr) {
    throw Error("logical answer needs 'and' or 'or'");
  }
  Answer a = Supported(StructuralCategory::kLogical, {&first, &second});
  const bool x = a.confidence[0] >= cfg.verify_threshold;
  const bool y = a.confidence[1] >= cfg.verify_threshold;
  a.text = (op == OpType::kAnd ? (x && y) : (x || y)) ? kYes : kNo;
  return a;
}

Answer AnswerChoose(const ViterbiPath &path, const SceneGraph &sg,
                    std::string_view category,
                    const std::array<std::string, 2> &options) {
  Answer a = Supported(StructuralCategory::kChoose, {&path});
  if (!path.feasible) {
    a.text = options[0];
    a.confidence[0] = 0.0;
    return a;
  }
  const int region = path.final_region();
  const double first = ScoreAt(sg, region, category, options[0]);
  const double second = ScoreAt(sg, region, category, options[1]);
  a.text = second > first ? options[1] : options[0];
  a.confidence[0] = std::max(first, second);
  return a;
}

Answer AnswerCompare(const ViterbiPath &first, const ViterbiPath &second,
                     const SceneGraph &sg, std::string_view category,
                     CompareMode mode) {
  Answer a = Supported(StructuralCategory::kCompare, {&first, &second});
  if (!first.feasible || !second.feasible) {
    a.text = kNo;
    return a;
  }
  auto x = ArgmaxAttribute(sg, first.final_region(), category);
  auto y = ArgmaxAttribute(sg, second.final_region(), category);
  if (!x || !y) {
    a.text = kNo;
    return a;
  }
  const bool equal = *x == *y;
  a.text = equal == (mode == CompareMode::kSame) ? kYes : kNo;
  return a;
}

AttentionMap ComputeAttention(std::span<const ViterbiPath> paths,
                              int num_regions) {
  AttentionMap map;
  map.weights.assign(num_regions, 0.0);
  int feasible = 0;
  for (const ViterbiPath &p : paths) feasible += p.feasible ? 1 : 0;
  if (feasible == 0) return map;
  const double share = 1.0 / feasible;
  for (const ViterbiPath &p : paths) {
    if (p.feasible) map.weights[p.final_region()] += share;
  }
  return map;
}

}  // namespace vlr
