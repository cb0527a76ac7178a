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

// Template grammar: maps question surface patterns onto program skeletons.
//
// File format: JSON list of {"pattern": "...", "opseq": "..."}. Patterns are
// whitespace-separated literal words and slots. Slots are {OBJ}, {ATTR},
// {REL}, {CAT} (attribute category) and {OPT}, each optionally followed by
// digits ({OBJ2}, {OPT1}). A literal "a(n)" matches "a" or "an". Matching
// is case-insensitive and ignores ? , . ! ; :

#ifndef VLR_TEMPLATE_GRAMMAR_H_
#define VLR_TEMPLATE_GRAMMAR_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vlr/opseq.h"
#include "vlr/sgraph.h"
#include "vlr/sgraph_io.h"

namespace vlr {

enum class SlotKind { kObject, kAttribute, kRelation, kCategory, kOption };

std::optional<SlotKind> SlotKindFromName(std::string_view slot_name);

struct PatternElement {
  // Empty for literals.
  std::string slot;
  SlotKind kind = SlotKind::kObject;
  // Accepted spellings of a literal.
  std::vector<std::string> literals;

  bool is_slot() const { return !slot.empty(); }
};

struct QuestionTemplate {
  std::string pattern;
  std::string opseq;
  std::vector<PatternElement> elements;
  int literal_count = 0;
};

// Lowercased words with the ignored punctuation removed.
std::vector<std::string> TokenizeQuestion(std::string_view text);

class TemplateGrammar {
 public:
  TemplateGrammar() = default;
  // Throws Error on malformed patterns or skeletons using unbound slots.
  explicit TemplateGrammar(
      std::vector<std::pair<std::string, std::string>> entries);

  static TemplateGrammar FromJson(const Json &j);
  static TemplateGrammar Load(const std::string &path);
  Json ToJson() const;

  const std::vector<QuestionTemplate> &templates() const { return templates_; }

 private:
  std::vector<QuestionTemplate> templates_;
};

struct QuestionParse {
  OperationSequence program;
  // Index of the matching template.
  size_t template_index = 0;
  // Canonical slot fillers.
  std::map<std::string, std::string> bindings;
};

// Longest literal match wins, ties go to file order. Slot fillers are
// normalized through the vocabulary and checked against the slot kind.
// Empty filter/verify/choose qualifiers are filled with the attribute's first
// containing category. Returns nullopt when no template matches.
std::optional<QuestionParse> ParseQuestion(std::string_view text,
                                           const TemplateGrammar &grammar,
                                           const Vocabulary &vocabulary);

// Fills skeleton slots and parses the result (shared with the generator).
OperationSequence InstantiateSkeleton(
    const std::string &skeleton,
    const std::map<std::string, std::string> &bindings,
    const Vocabulary &vocabulary);

}  // namespace vlr

#endif  // VLR_TEMPLATE_GRAMMAR_H_
