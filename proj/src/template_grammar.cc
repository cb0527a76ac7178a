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

#include "vlr/template_grammar.h"

#include <cctype>
#include <set>
#include <sstream>

namespace vlr {

namespace {

bool IsIgnoredPunct(char c) {
  return c == '?' || c == ',' || c == '.' || c == '!' || c == ';' || c == ':';
}

std::vector<std::string> SplitWords(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char &c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<PatternElement> CompilePattern(const std::string &pattern) {
  std::vector<PatternElement> elements;
  for (const std::string &word : SplitWords(pattern)) {
    std::string token;
    for (char c : word) {
      if (!IsIgnoredPunct(c)) token += c;
    }
    if (token.empty()) continue;
    PatternElement e;
    if (token.front() == '{') {
      if (token.back() != '}' || token.size() < 3) {
        throw Error("malformed slot '" + word + "' in pattern '" + pattern +
                    "'");
      }
      e.slot = token.substr(1, token.size() - 2);
      auto kind = SlotKindFromName(e.slot);
      if (!kind) {
        throw Error("unknown slot '" + e.slot + "' in pattern '" + pattern +
                    "'");
      }
      e.kind = *kind;
    } else {
      token = Lower(token);
      // "a(n)" -> {"a", "an"}
      const size_t open = token.find('(');
      if (open != std::string::npos && token.back() == ')') {
        std::string base = token.substr(0, open);
        std::string extra = token.substr(open + 1, token.size() - open - 2);
        e.literals = {base, base + extra};
      } else {
        e.literals = {token};
      }
    }
    elements.push_back(std::move(e));
  }
  if (elements.empty()) throw Error("empty template pattern");
  return elements;
}

bool SlotAccepts(SlotKind kind, const std::string &name,
                 const Vocabulary &vocab) {
  switch (kind) {
    case SlotKind::kObject:
      return vocab.IsObjectName(name);
    case SlotKind::kAttribute:
      return vocab.IsAttribute(name);
    case SlotKind::kRelation:
      return vocab.IsRelation(name);
    case SlotKind::kCategory:
      return vocab.IsAttributeCategory(name);
    case SlotKind::kOption:
      return vocab.IsAttribute(name) || vocab.IsObjectName(name);
  }
  return false;
}

class Matcher {
 public:
  Matcher(const std::vector<PatternElement> &elements,
          const std::vector<std::string> &tokens, const Vocabulary &vocab)
      : elements_(elements), tokens_(tokens), vocab_(vocab) {}

  bool Match(std::map<std::string, std::string> *bindings) {
    bindings_.clear();
    if (!Step(0, 0)) return false;
    *bindings = bindings_;
    return true;
  }

 private:
  bool Step(size_t e, size_t t) {
    if (e == elements_.size()) return t == tokens_.size();
    const PatternElement &el = elements_[e];
    if (!el.is_slot()) {
      if (t >= tokens_.size()) return false;
      for (const std::string &lit : el.literals) {
        if (tokens_[t] == lit) return Step(e + 1, t + 1);
      }
      return false;
    }
    std::string surface;
    for (size_t end = t; end < tokens_.size(); ++end) {
      if (end > t) surface += ' ';
      surface += tokens_[end];
      auto canonical = NormalizeName(surface, vocab_);
      if (!canonical || !SlotAccepts(el.kind, *canonical, vocab_)) continue;
      auto bound = bindings_.find(el.slot);
      if (bound != bindings_.end()) {
        if (bound->second != *canonical) continue;
        if (Step(e + 1, end + 1)) return true;
        continue;
      }
      bindings_[el.slot] = *canonical;
      if (Step(e + 1, end + 1)) return true;
      bindings_.erase(el.slot);
    }
    return false;
  }

  const std::vector<PatternElement> &elements_;
  const std::vector<std::string> &tokens_;
  const Vocabulary &vocab_;
  std::map<std::string, std::string> bindings_;
};

std::string Substitute(const std::string &skeleton,
                       const std::map<std::string, std::string> &bindings) {
  std::string out;
  size_t i = 0;
  while (i < skeleton.size()) {
    if (skeleton[i] == '{') {
      const size_t close = skeleton.find('}', i);
      if (close == std::string::npos) {
        throw Error("unterminated slot in skeleton '" + skeleton + "'");
      }
      const std::string name = skeleton.substr(i + 1, close - i - 1);
      auto it = bindings.find(name);
      if (it == bindings.end()) {
        throw Error("skeleton slot '" + name + "' is unbound");
      }
      out += it->second;
      i = close + 1;
    } else {
      out += skeleton[i++];
    }
  }
  return out;
}

void ResolveQualifiers(OperationSequence *seq, const Vocabulary &vocab) {
  for (OperationTuple &t : seq->tuples) {
    if (!t.qualifier.empty()) continue;
    if (t.type == OpType::kFilter ||
        (t.type == OpType::kVerify && vocab.IsAttribute(t.args[0]))) {
      if (auto c = vocab.FirstCategoryOf(t.args[0])) {
        t.qualifier = vocab.attribute_categories()[*c].name;
      }
    } else if (t.type == OpType::kChoose) {
      for (size_t c = 0; c < vocab.attribute_categories().size(); ++c) {
        if (vocab.AttributeIndex(c, t.args[0]) &&
            vocab.AttributeIndex(c, t.args[1])) {
          t.qualifier = vocab.attribute_categories()[c].name;
          break;
        }
      }
      if (t.qualifier.empty() && vocab.IsObjectName(t.args[0]) &&
          vocab.IsObjectName(t.args[1])) {
        t.qualifier = "name";
      }
    }
  }
}

}  // namespace

std::optional<SlotKind> SlotKindFromName(std::string_view slot_name) {
  size_t end = slot_name.size();
  while (end > 0 && std::isdigit(static_cast<unsigned char>(slot_name[end - 1]))) {
    --end;
  }
  std::string_view base = slot_name.substr(0, end);
  if (base == "OBJ") return SlotKind::kObject;
  if (base == "ATTR") return SlotKind::kAttribute;
  if (base == "REL") return SlotKind::kRelation;
  if (base == "CAT") return SlotKind::kCategory;
  if (base == "OPT") return SlotKind::kOption;
  return std::nullopt;
}

std::vector<std::string> TokenizeQuestion(std::string_view text) {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (char c : text) cleaned += IsIgnoredPunct(c) ? ' ' : c;
  return SplitWords(Lower(cleaned));
}

TemplateGrammar::TemplateGrammar(
    std::vector<std::pair<std::string, std::string>> entries) {
  for (auto &[pattern, opseq] : entries) {
    QuestionTemplate t;
    t.pattern = std::move(pattern);
    t.opseq = std::move(opseq);
    t.elements = CompilePattern(t.pattern);
    std::set<std::string> slots;
    for (const PatternElement &e : t.elements) {
      if (e.is_slot()) {
        slots.insert(e.slot);
      } else {
        ++t.literal_count;
      }
    }
    // Every skeleton slot must be bound by the pattern.
    size_t pos = 0;
    while ((pos = t.opseq.find('{', pos)) != std::string::npos) {
      const size_t close = t.opseq.find('}', pos);
      if (close == std::string::npos) {
        throw Error("unterminated slot in skeleton '" + t.opseq + "'");
      }
      const std::string name = t.opseq.substr(pos + 1, close - pos - 1);
      if (!slots.count(name)) {
        throw Error("skeleton '" + t.opseq + "' uses slot '" + name +
                    "' missing from pattern '" + t.pattern + "'");
      }
      pos = close + 1;
    }
    templates_.push_back(std::move(t));
  }
}

TemplateGrammar TemplateGrammar::FromJson(const Json &j) {
  if (!j.is_array()) throw Error("template file must hold a JSON list");
  std::vector<std::pair<std::string, std::string>> entries;
  for (const Json &e : j) {
    try {
      entries.emplace_back(e.at("pattern").get<std::string>(),
                           e.at("opseq").get<std::string>());
    } catch (const Json::exception &ex) {
      throw Error(std::string("malformed template entry: ") + ex.what());
    }
  }
  return TemplateGrammar(std::move(entries));
}

TemplateGrammar TemplateGrammar::Load(const std::string &path) {
  return FromJson(ReadJsonFile(path));
}

Json TemplateGrammar::ToJson() const {
  Json out = Json::array();
  for (const QuestionTemplate &t : templates_) {
    out.push_back({{"pattern", t.pattern}, {"opseq", t.opseq}});
  }
  return out;
}

OperationSequence InstantiateSkeleton(
    const std::string &skeleton,
    const std::map<std::string, std::string> &bindings,
    const Vocabulary &vocabulary) {
  OperationSequence seq = ParseProgramString(Substitute(skeleton, bindings));
  ResolveQualifiers(&seq, vocabulary);
  return seq;
}

std::optional<QuestionParse> ParseQuestion(std::string_view text,
                                           const TemplateGrammar &grammar,
                                           const Vocabulary &vocabulary) {
  const std::vector<std::string> tokens = TokenizeQuestion(text);
  if (tokens.empty()) return std::nullopt;

  std::optional<QuestionParse> best;
  int best_literals = -1;
  const auto &templates = grammar.templates();
  for (size_t i = 0; i < templates.size(); ++i) {
    const QuestionTemplate &t = templates[i];
    if (t.literal_count <= best_literals) continue;
    std::map<std::string, std::string> bindings;
    Matcher matcher(t.elements, tokens, vocabulary);
    if (!matcher.Match(&bindings)) continue;
    QuestionParse parse;
    try {
      parse.program = InstantiateSkeleton(t.opseq, bindings, vocabulary);
    } catch (const ParseError &) {
      continue;
    }
    parse.template_index = i;
    parse.bindings = std::move(bindings);
    best = std::move(parse);
    best_literals = t.literal_count;
  }
  return best;
}

}  // namespace vlr
