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

// Deterministic answer production from 1-best paths. No learned parameters:
// every answer is read off the final region(s) of the decoded path(s).

#ifndef VLR_ANSWER_H_
#define VLR_ANSWER_H_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vlr/decode.h"
#include "vlr/opseq.h"
#include "vlr/sgraph.h"

namespace vlr {

inline constexpr std::string_view kYes = "yes";
inline constexpr std::string_view kNo = "no";
inline constexpr std::string_view kUnknown = "unknown";

struct AnswerConfig {
  // Geometric-mean threshold for verify answers, in (0, 1).
  double verify_threshold = 0.5;
  int nbest = 5;

  void Validate() const;
};

struct Answer {
  std::string text;
  StructuralCategory type = StructuralCategory::kVerify;
  // Final region of each feasible supporting path.
  std::vector<int> support;
  std::vector<ViterbiPath> paths;
  // Geometric-mean score per path; for choose, the winning option's score.
  std::vector<double> confidence;
};

struct AttentionMap {
  std::vector<double> weights;
};

enum class CompareMode { kSame, kDifferent };

// Argmax of the final region's object row (target "name") or of the named
// attribute category. `restriction` limits name answers to those classes.
// Ties go to vocabulary order. Infeasible path -> "unknown".
Answer AnswerQuery(const ViterbiPath &path, const SceneGraph &sg,
                   const std::vector<std::string> *restriction,
                   std::string_view target);

// "yes" iff the geometric mean reaches the threshold.
Answer AnswerVerify(const ViterbiPath &path, const AnswerConfig &cfg);

// op must be kAnd or kOr.
Answer AnswerLogical(const ViterbiPath &a, const ViterbiPath &b, OpType op,
                     const AnswerConfig &cfg);

// Option with the larger score at the final region, first option on ties.
// `category` may be "name" to compare object classes.
Answer AnswerChoose(const ViterbiPath &path, const SceneGraph &sg,
                    std::string_view category,
                    const std::array<std::string, 2> &options);

// Compares the argmax attribute of `category` at both final regions.
Answer AnswerCompare(const ViterbiPath &a, const ViterbiPath &b,
                     const SceneGraph &sg, std::string_view category,
                     CompareMode mode);

// Uniform weight over the final regions of the feasible paths; all zero when
// none is feasible.
AttentionMap ComputeAttention(std::span<const ViterbiPath> paths,
                              int num_regions);

}  // namespace vlr

#endif  // VLR_ANSWER_H_
