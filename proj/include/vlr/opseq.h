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

// Operation sequences: the program notation a question compiles to.
//
// Notation: tuples "(type[ qualifier]; arg[,arg...])" joined by " -> ".
//
//   (select; cat)                   object class or category
//   (filter color; not(white))      attribute, optionally negated
//   (relate; dog,next to,s)         target ("_" = any), relation, s|o
//   (verify color; red)             attribute or object check, terminal
//   (exist; _)                      terminal
//   (query; color)                  terminal; the argument is the target
//                                   ("name" or an attribute category)
//   (choose color; red,green)       terminal, two options
//   (compare color; same)           terminal over two branches
//   (and; _) / (or; _)              terminal over two branches
//
// Two-branch programs (and/or/compare) start their second branch at the
// second select tuple.

#ifndef VLR_OPSEQ_H_
#define VLR_OPSEQ_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vlr/diagnostics.h"
#include "vlr/sgraph.h"

namespace vlr {

enum class OpType {
  kSelect,
  kFilter,
  kRelate,
  kVerify,
  kQuery,
  kExist,
  kAnd,
  kOr,
  kChoose,
  kCompare,
};

const char *OpTypeName(OpType type);
std::optional<OpType> OpTypeFromName(std::string_view name);

// The five answer categories; query is "open", the rest are "binary".
enum class StructuralCategory { kQuery, kVerify, kLogical, kChoose, kCompare };

const char *StructuralCategoryName(StructuralCategory category);
std::optional<StructuralCategory> StructuralCategoryFromName(
    std::string_view name);
inline bool IsBinary(StructuralCategory category) {
  return category != StructuralCategory::kQuery;
}

struct OperationTuple {
  OpType type = OpType::kSelect;
  // Attribute category for filter/verify/choose/compare; the target ("name"
  // or a category) for query.
  std::string qualifier;
  std::vector<std::string> args;
  // Set by a "not(...)" first argument.
  bool negated = false;

  bool operator==(const OperationTuple &other) const = default;

  // Produces an emission layer when compiled into a lattice.
  bool EmitsLayer() const;
  // Ends a branch (or the whole program).
  bool IsTerminal() const;
};

std::string RenderTuple(const OperationTuple &tuple);

struct OperationSequence {
  std::vector<OperationTuple> tuples;
  // First tuple of the second branch for and/or/compare programs.
  std::optional<size_t> branch_split;

  bool operator==(const OperationSequence &other) const = default;

  const OperationTuple &terminal() const { return tuples.back(); }
  StructuralCategory category() const;
};

// Checks per-type argument shapes and terminal placement, and computes
// branch_split. Throws ParseError.
OperationSequence MakeSequence(std::vector<OperationTuple> tuples);

// Throws ParseError naming the offending span.
OperationSequence ParseProgramString(std::string_view text);
std::string RenderProgramString(const OperationSequence &seq);

// Placeholder symbols used by program templates.
inline constexpr std::string_view kObjPlaceholder = "OBJ";
inline constexpr std::string_view kAttrPlaceholder = "ATTR";
inline constexpr std::string_view kRelPlaceholder = "REL";

struct ProgramTemplate {
  std::vector<OperationTuple> tuples;

  bool operator==(const ProgramTemplate &other) const = default;
  // Canonical key, e.g. "(select; OBJ) -> (verify color; ATTR)".
  std::string Render() const;
};

// Replaces object names by OBJ, attributes by ATTR and relations by REL.
// Arguments of unknown kind stay verbatim and are reported on `diag`.
ProgramTemplate GeneralizeTemplate(const OperationSequence &seq,
                                   const Vocabulary &vocabulary,
                                   Diagnostics *diag = nullptr);

}  // namespace vlr

#endif  // VLR_OPSEQ_H_
