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

// Visual grounding metrics over region attention maps.

#ifndef VLR_GROUNDING_H_
#define VLR_GROUNDING_H_

#include <span>
#include <string>
#include <vector>

#include "vlr/answer.h"
#include "vlr/sgraph.h"
#include "vlr/sgraph_io.h"

namespace vlr {

// Ground-truth inference boxes of one question: objects referenced in the
// question (Q), in the short answer (A) and in the full answer (FA).
struct GroundingAnnotation {
  std::string qid;
  std::vector<Box> question;
  std::vector<Box> answer;
  std::vector<Box> full_answer;

  // Q + A + FA, duplicates kept.
  std::vector<Box> Pooled() const;
};

GroundingAnnotation AnnotationFromJson(const Json &j);
Json AnnotationToJson(const GroundingAnnotation &a);

struct GroundingConfig {
  // A region matches a box when IoU is strictly greater than this.
  double iou_threshold = 0.5;

  void Validate() const;
};

// Intersection over union; 0 for disjoint or degenerate boxes.
double Iou(const Box &a, const Box &b);

// Sum of attention over regions matching any ground-truth box; each region
// counts once.
double IouGroundingScore(const AttentionMap &att, std::span<const Box> gt,
                         std::span<const Box> regions,
                         const GroundingConfig &cfg);

// Approximation of the GQA challenge metric: attention is summed per
// ground-truth box, so a region matching several boxes counts several times
// and the score can exceed 1.
double GqaStyleGrounding(const AttentionMap &att, std::span<const Box> gt,
                         std::span<const Box> regions,
                         const GroundingConfig &cfg);

struct PrfScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Match scores between attended regions (weight > 0) and ground-truth boxes.
PrfScore GroundingPrf(const AttentionMap &att, std::span<const Box> gt,
                      std::span<const Box> regions, const GroundingConfig &cfg);

}  // namespace vlr

#endif  // VLR_GROUNDING_H_
