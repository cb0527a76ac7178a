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

// Generalization splits over linguistic variant pairs.
//
// A pair names a train variant A and a test variant B by predicates over the
// question. A program template qualifies when it occurs at least min_count
// times among A questions of the original train partition and among B
// questions of the original test partition. The new train set is the
// original train set minus B questions of qualifying templates; the new test
// set holds only B questions of qualifying templates from the original test
// set. Questions never cross the original boundary.
//
// Pair file: JSON list of
//   {"name": "...", "train_variant": P, "test_variant": P}
// where P has exactly one of
//   "starts_with": [words], "contains_word": [words],
//   "contains_phrase": [phrases], "relation_form": [relations],
//   "contains_category_name": true
// and an optional "negate": true.

#ifndef VLR_SPLITS_H_
#define VLR_SPLITS_H_

#include <array>
#include <map>
#include <string>
#include <vector>

#include "vlr/dataset.h"
#include "vlr/diagnostics.h"

namespace vlr {

struct VariantPredicate {
  enum class Kind {
    kStartsWith,
    kContainsWord,
    kContainsPhrase,
    kRelationForm,
    kContainsCategoryName,
  };
  Kind kind = Kind::kStartsWith;
  std::vector<std::string> values;
  bool negate = false;

  // `program` may be null when none is available.
  bool Matches(const Question &q, const OperationSequence *program,
               const Vocabulary &vocabulary) const;
};

VariantPredicate VariantPredicateFromJson(const Json &j);
Json VariantPredicateToJson(const VariantPredicate &p);

struct VariantPair {
  std::string name;
  VariantPredicate train_variant;
  VariantPredicate test_variant;
};

std::vector<VariantPair> VariantPairsFromJson(const Json &j);

struct SplitResult {
  std::string pair_name;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  // Template key -> (train-variant count in train, test-variant count in test).
  std::map<std::string, std::array<int, 2>> template_counts;
  std::vector<std::string> qualifying_templates;
};

Json SplitResultToJson(const SplitResult &r);

// Programs come from the gold program, else from the grammar. Questions with
// neither are left in place and never qualify.
std::vector<SplitResult> MakeGeneralizationSplits(
    const Dataset &ds, const std::vector<VariantPair> &pairs, int min_count,
    Diagnostics *diag = nullptr);

}  // namespace vlr

#endif  // VLR_SPLITS_H_
