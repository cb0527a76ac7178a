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

#include "vlr/opseq.h"

#include <array>
#include <cctype>
#include <utility>

namespace vlr {

namespace {

constexpr std::array<std::pair<OpType, const char *>, 10> kOpNames = {{
    {OpType::kSelect, "select"},
    {OpType::kFilter, "filter"},
    {OpType::kRelate, "relate"},
    {OpType::kVerify, "verify"},
    {OpType::kQuery, "query"},
    {OpType::kExist, "exist"},
    {OpType::kAnd, "and"},
    {OpType::kOr, "or"},
    {OpType::kChoose, "choose"},
    {OpType::kCompare, "compare"},
}};

std::string_view TrimView(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

[[noreturn]] void Fail(std::string_view what, std::string_view span,
                       size_t offset) {
  throw ParseError(std::string(what) + " at offset " + std::to_string(offset) +
                   ": '" + std::string(span) + "'");
}

[[noreturn]] void FailTuple(std::string_view what,
                            const OperationTuple &tuple) {
  throw ParseError(std::string(what) + ": '" + RenderTuple(tuple) + "'");
}

bool IsPlaceholder(std::string_view s) {
  return s == kObjPlaceholder || s == kAttrPlaceholder ||
         s == kRelPlaceholder;
}

OperationTuple ParseTuple(std::string_view raw, size_t offset) {
  std::string_view text = TrimView(raw);
  if (text.size() < 2 || text.front() != '(' || text.back() != ')') {
    Fail("tuple must be enclosed in parentheses", raw, offset);
  }
  std::string_view inner = text.substr(1, text.size() - 2);
  std::string_view head = inner;
  std::string_view body;
  const size_t semi = inner.find(';');
  if (semi != std::string_view::npos) {
    head = inner.substr(0, semi);
    body = inner.substr(semi + 1);
  }
  head = TrimView(head);
  const size_t space = head.find(' ');
  std::string_view type_name = head.substr(0, space);
  auto type = OpTypeFromName(type_name);
  if (!type) Fail("unknown operation type", type_name, offset);

  OperationTuple tuple;
  tuple.type = *type;
  if (space != std::string_view::npos) {
    tuple.qualifier = std::string(TrimView(head.substr(space + 1)));
  }

  body = TrimView(body);
  if (!body.empty()) {
    size_t start = 0;
    while (true) {
      const size_t comma = body.find(',', start);
      std::string_view arg = TrimView(body.substr(
          start, comma == std::string_view::npos ? std::string_view::npos
                                                 : comma - start));
      if (arg.empty()) Fail("empty argument", raw, offset);
      if (arg.size() > 5 && arg.substr(0, 4) == "not(" && arg.back() == ')') {
        if (!tuple.args.empty()) {
          Fail("negation allowed on the first argument only", raw, offset);
        }
        tuple.negated = true;
        arg = TrimView(arg.substr(4, arg.size() - 5));
        if (arg.empty()) Fail("empty negated argument", raw, offset);
      }
      tuple.args.emplace_back(arg);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }

  // "_" as a lone argument means "no argument" for these types.
  const bool bare = tuple.args.size() == 1 && tuple.args[0] == "_";
  switch (tuple.type) {
    case OpType::kExist:
    case OpType::kAnd:
    case OpType::kOr:
      if (bare) tuple.args.clear();
      break;
    case OpType::kQuery:
      if (tuple.qualifier.empty() && tuple.args.size() == 1 && !bare) {
        tuple.qualifier = tuple.args[0];
        tuple.args.clear();
      } else if (bare) {
        tuple.args.clear();
      }
      break;
    default:
      break;
  }
  return tuple;
}

void CheckShape(const OperationTuple &t) {
  auto want_args = [&](size_t n) {
    if (t.args.size() != n) {
      FailTuple("expected " + std::to_string(n) + " argument(s)", t);
    }
  };
  if (t.negated && t.type != OpType::kFilter && t.type != OpType::kVerify) {
    FailTuple("negation is only supported on filter and verify", t);
  }
  switch (t.type) {
    case OpType::kSelect:
      want_args(1);
      if (t.args[0] == "_") FailTuple("select needs an object name", t);
      break;
    case OpType::kFilter:
      want_args(1);
      break;
    case OpType::kRelate:
      want_args(3);
      if (t.args[2] != "s" && t.args[2] != "o") {
        FailTuple("relate direction must be 's' or 'o'", t);
      }
      break;
    case OpType::kVerify:
      want_args(1);
      if (t.args[0] == "_") FailTuple("verify needs an argument", t);
      break;
    case OpType::kExist:
      if (t.args.size() > 1) FailTuple("exist takes at most one argument", t);
      break;
    case OpType::kQuery:
      want_args(0);
      if (t.qualifier.empty()) FailTuple("query needs a target", t);
      break;
    case OpType::kAnd:
    case OpType::kOr:
      want_args(0);
      if (!t.qualifier.empty()) FailTuple("and/or take no qualifier", t);
      break;
    case OpType::kChoose:
      want_args(2);
      break;
    case OpType::kCompare:
      want_args(1);
      if (t.qualifier.empty()) FailTuple("compare needs a category", t);
      if (t.args[0] != "same" && t.args[0] != "different") {
        FailTuple("compare mode must be 'same' or 'different'", t);
      }
      break;
  }
}

// Every non-final tuple of a branch must be non-terminal; at most one select,
// and only as the first tuple.
void CheckBranch(const std::vector<OperationTuple> &tuples, size_t begin,
                 size_t end, bool allow_terminal_at_end) {
  for (size_t i = begin; i < end; ++i) {
    const OperationTuple &t = tuples[i];
    if (t.type == OpType::kSelect && i != begin) {
      FailTuple("select must start a branch", t);
    }
    if (t.IsTerminal()) {
      if (i + 1 != end || !allow_terminal_at_end) {
        FailTuple("answer operation in the middle of a branch", t);
      }
      if (t.type == OpType::kAnd || t.type == OpType::kOr ||
          t.type == OpType::kCompare) {
        FailTuple("nested two-branch operation", t);
      }
    }
  }
}

}  // namespace

const char *OpTypeName(OpType type) {
  for (const auto &[t, name] : kOpNames) {
    if (t == type) return name;
  }
  return "unknown";
}

std::optional<OpType> OpTypeFromName(std::string_view name) {
  for (const auto &[t, n] : kOpNames) {
    if (name == n) return t;
  }
  return std::nullopt;
}

const char *StructuralCategoryName(StructuralCategory category) {
  switch (category) {
    case StructuralCategory::kQuery:
      return "query";
    case StructuralCategory::kVerify:
      return "verify";
    case StructuralCategory::kLogical:
      return "logical";
    case StructuralCategory::kChoose:
      return "choose";
    case StructuralCategory::kCompare:
      return "compare";
  }
  return "unknown";
}

std::optional<StructuralCategory> StructuralCategoryFromName(
    std::string_view name) {
  for (auto c : {StructuralCategory::kQuery, StructuralCategory::kVerify,
                 StructuralCategory::kLogical, StructuralCategory::kChoose,
                 StructuralCategory::kCompare}) {
    if (name == StructuralCategoryName(c)) return c;
  }
  return std::nullopt;
}

bool OperationTuple::EmitsLayer() const {
  switch (type) {
    case OpType::kSelect:
    case OpType::kFilter:
    case OpType::kRelate:
    case OpType::kVerify:
      return true;
    case OpType::kExist:
      return !args.empty();
    default:
      return false;
  }
}

bool OperationTuple::IsTerminal() const {
  switch (type) {
    case OpType::kSelect:
    case OpType::kFilter:
    case OpType::kRelate:
      return false;
    default:
      return true;
  }
}

std::string RenderTuple(const OperationTuple &tuple) {
  std::string out = "(";
  out += OpTypeName(tuple.type);
  if (tuple.type == OpType::kQuery) {
    out += "; ";
    out += tuple.qualifier.empty() ? "_" : tuple.qualifier;
    return out + ")";
  }
  if (!tuple.qualifier.empty()) out += " " + tuple.qualifier;
  out += "; ";
  if (tuple.args.empty()) {
    out += "_";
  } else {
    for (size_t i = 0; i < tuple.args.size(); ++i) {
      if (i > 0) out += ",";
      if (i == 0 && tuple.negated) {
        out += "not(" + tuple.args[i] + ")";
      } else {
        out += tuple.args[i];
      }
    }
  }
  return out + ")";
}

StructuralCategory OperationSequence::category() const {
  switch (terminal().type) {
    case OpType::kQuery:
      return StructuralCategory::kQuery;
    case OpType::kAnd:
    case OpType::kOr:
      return StructuralCategory::kLogical;
    case OpType::kChoose:
      return StructuralCategory::kChoose;
    case OpType::kCompare:
      return StructuralCategory::kCompare;
    default:
      return StructuralCategory::kVerify;
  }
}

OperationSequence MakeSequence(std::vector<OperationTuple> tuples) {
  if (tuples.empty()) throw ParseError("empty operation sequence");
  for (const OperationTuple &t : tuples) CheckShape(t);

  OperationSequence seq;
  seq.tuples = std::move(tuples);
  const std::vector<OperationTuple> &ts = seq.tuples;
  const OperationTuple &last = ts.back();
  if (!last.IsTerminal()) {
    FailTuple("program must end with an answer operation", last);
  }

  const size_t n = ts.size();
  const bool dual = last.type == OpType::kAnd || last.type == OpType::kOr ||
                    last.type == OpType::kCompare;
  if (!dual) {
    CheckBranch(ts, 0, n, /*allow_terminal_at_end=*/true);
    return seq;
  }

  // The second branch begins at the second select; without one it is empty
  // and lattice construction will reject the program.
  size_t split = n - 1;
  for (size_t i = 1; i + 1 < n; ++i) {
    if (ts[i].type == OpType::kSelect) {
      split = i;
      break;
    }
  }
  seq.branch_split = split;
  const bool logical = last.type != OpType::kCompare;
  CheckBranch(ts, 0, split, logical);
  CheckBranch(ts, split, n - 1, logical);
  if (logical) {
    for (size_t end : {split, n - 1}) {
      size_t begin = end == split ? 0 : split;
      if (end > begin && !ts[end - 1].IsTerminal()) {
        FailTuple("logical branch must end with exist or verify", ts[end - 1]);
      }
    }
  }
  return seq;
}

OperationSequence ParseProgramString(std::string_view text) {
  if (TrimView(text).empty()) throw ParseError("empty program");
  std::vector<OperationTuple> tuples;
  size_t start = 0;
  int depth = 0;
  for (size_t i = 0; i <= text.size(); ++i) {
    const bool at_end = i == text.size();
    if (!at_end) {
      if (text[i] == '(') ++depth;
      if (text[i] == ')') --depth;
      if (depth < 0) Fail("unbalanced ')'", text.substr(start, i - start + 1), start);
    }
    const bool arrow = !at_end && depth == 0 && i + 1 < text.size() &&
                       text[i] == '-' && text[i + 1] == '>';
    if (arrow || at_end) {
      if (at_end && depth != 0) Fail("unbalanced '('", text.substr(start), start);
      tuples.push_back(ParseTuple(text.substr(start, i - start), start));
      if (arrow) {
        ++i;
        start = i + 1;
      }
    }
  }
  return MakeSequence(std::move(tuples));
}

std::string RenderProgramString(const OperationSequence &seq) {
  std::string out;
  for (size_t i = 0; i < seq.tuples.size(); ++i) {
    if (i > 0) out += " -> ";
    out += RenderTuple(seq.tuples[i]);
  }
  return out;
}

std::string ProgramTemplate::Render() const {
  std::string out;
  for (size_t i = 0; i < tuples.size(); ++i) {
    if (i > 0) out += " -> ";
    out += RenderTuple(tuples[i]);
  }
  return out;
}

namespace {

enum class Kind { kObject, kAttribute, kRelation };

std::string Symbolize(const std::string &name, Kind preferred,
                      const Vocabulary &vocab, Diagnostics *diag) {
  if (IsPlaceholder(name)) return name;
  auto of = [&](Kind k) -> std::optional<std::string_view> {
    switch (k) {
      case Kind::kObject:
        if (vocab.IsObjectName(name)) return kObjPlaceholder;
        break;
      case Kind::kAttribute:
        if (vocab.IsAttribute(name)) return kAttrPlaceholder;
        break;
      case Kind::kRelation:
        if (vocab.IsRelation(name)) return kRelPlaceholder;
        break;
    }
    return std::nullopt;
  };
  if (auto hit = of(preferred)) return std::string(*hit);
  for (Kind k : {Kind::kObject, Kind::kAttribute, Kind::kRelation}) {
    if (auto hit = of(k)) return std::string(*hit);
  }
  Warn(diag, "template generalization kept unknown argument '" + name + "'");
  return name;
}

}  // namespace

ProgramTemplate GeneralizeTemplate(const OperationSequence &seq,
                                   const Vocabulary &vocabulary,
                                   Diagnostics *diag) {
  ProgramTemplate out;
  for (OperationTuple t : seq.tuples) {
    auto sym = [&](std::string &arg, Kind kind) {
      arg = Symbolize(arg, kind, vocabulary, diag);
    };
    switch (t.type) {
      case OpType::kSelect:
      case OpType::kExist:
        for (std::string &a : t.args) sym(a, Kind::kObject);
        break;
      case OpType::kFilter:
        sym(t.args[0], Kind::kAttribute);
        break;
      case OpType::kVerify:
        sym(t.args[0], vocabulary.IsObjectName(t.args[0]) && t.qualifier.empty()
                           ? Kind::kObject
                           : Kind::kAttribute);
        break;
      case OpType::kRelate:
        if (t.args[0] != "_") sym(t.args[0], Kind::kObject);
        sym(t.args[1], Kind::kRelation);
        break;
      case OpType::kChoose:
        for (std::string &a : t.args) {
          sym(a, t.qualifier == "name" ? Kind::kObject : Kind::kAttribute);
        }
        break;
      default:
        break;
    }
    out.tuples.push_back(std::move(t));
  }
  return out;
}

}  // namespace vlr
