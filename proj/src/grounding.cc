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

#include "vlr/grounding.h"

#include <algorithm>

namespace vlr {

namespace {

std::vector<Box> BoxesFromJson(const Json &j) {
  std::vector<Box> out;
  for (const Json &b : j) out.push_back(BoxFromJson(b));
  return out;
}

Json BoxesToJson(const std::vector<Box> &boxes) {
  Json out = Json::array();
  for (const Box &b : boxes) out.push_back(BoxToJson(b));
  return out;
}

bool Matches(const Box &region, std::span<const Box> gt,
             const GroundingConfig &cfg) {
  for (const Box &g : gt) {
    if (Iou(region, g) > cfg.iou_threshold) return true;
  }
  return false;
}

void CheckSizes(const AttentionMap &att, std::span<const Box> regions) {
  if (att.weights.size() != regions.size()) {
    throw Error("attention map size does not match region count");
  }
}

}  // namespace

std::vector<Box> GroundingAnnotation::Pooled() const {
  std::vector<Box> out = question;
  out.insert(out.end(), answer.begin(), answer.end());
  out.insert(out.end(), full_answer.begin(), full_answer.end());
  return out;
}

GroundingAnnotation AnnotationFromJson(const Json &j) {
  GroundingAnnotation a;
  try {
    a.qid = j.at("qid").get<std::string>();
    a.question = BoxesFromJson(j.value("Q", Json::array()));
    a.answer = BoxesFromJson(j.value("A", Json::array()));
    a.full_answer = BoxesFromJson(j.value("FA", Json::array()));
  } catch (const Json::exception &e) {
    throw Error(std::string("malformed grounding annotation: ") + e.what());
  }
  return a;
}

Json AnnotationToJson(const GroundingAnnotation &a) {
  return {{"qid", a.qid},
          {"Q", BoxesToJson(a.question)},
          {"A", BoxesToJson(a.answer)},
          {"FA", BoxesToJson(a.full_answer)}};
}

void GroundingConfig::Validate() const {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw Error("IoU threshold must lie in (0, 1]");
  }
}

double Iou(const Box &a, const Box &b) {
  if (!a.well_formed() || !b.well_formed()) return 0.0;
  const double w = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  const double h = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  const double inter = w * h;
  return inter / (a.area() + b.area() - inter);
}

double IouGroundingScore(const AttentionMap &att, std::span<const Box> gt,
                         std::span<const Box> regions,
                         const GroundingConfig &cfg) {
  CheckSizes(att, regions);
  double sum = 0.0;
  for (size_t d = 0; d < regions.size(); ++d) {
    if (att.weights[d] > 0.0 && Matches(regions[d], gt, cfg)) {
      sum += att.weights[d];
    }
  }
  return sum;
}

double GqaStyleGrounding(const AttentionMap &att, std::span<const Box> gt,
                         std::span<const Box> regions,
                         const GroundingConfig &cfg) {
  CheckSizes(att, regions);
  double sum = 0.0;
  for (const Box &g : gt) {
    for (size_t d = 0; d < regions.size(); ++d) {
      if (att.weights[d] > 0.0 && Iou(regions[d], g) > cfg.iou_threshold) {
        sum += att.weights[d];
      }
    }
  }
  return sum;
}

PrfScore GroundingPrf(const AttentionMap &att, std::span<const Box> gt,
                      std::span<const Box> regions,
                      const GroundingConfig &cfg) {
  CheckSizes(att, regions);
  std::vector<Box> attended;
  for (size_t d = 0; d < regions.size(); ++d) {
    if (att.weights[d] > 0.0) attended.push_back(regions[d]);
  }
  PrfScore s;
  if (attended.empty() || gt.empty()) return s;
  int matched_attended = 0;
  for (const Box &r : attended) matched_attended += Matches(r, gt, cfg) ? 1 : 0;
  int matched_gt = 0;
  for (const Box &g : gt) {
    matched_gt += Matches(g, attended, cfg) ? 1 : 0;
  }
  s.precision = static_cast<double>(matched_attended) / attended.size();
  s.recall = static_cast<double>(matched_gt) / gt.size();
  if (s.precision + s.recall > 0.0) {
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  return s;
}

}  // namespace vlr
