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

#include "vlr/splits.h"

#include <algorithm>
#include <optional>
#include <set>

#include "vlr/template_grammar.h"

namespace vlr {

namespace {

using Kind = VariantPredicate::Kind;

const std::vector<std::pair<const char *, Kind>> &KindNames() {
  static const std::vector<std::pair<const char *, Kind>> names = {
      {"starts_with", Kind::kStartsWith},
      {"contains_word", Kind::kContainsWord},
      {"contains_phrase", Kind::kContainsPhrase},
      {"relation_form", Kind::kRelationForm},
      {"contains_category_name", Kind::kContainsCategoryName},
  };
  return names;
}

// True if `needle` occurs as a contiguous word run in `words`.
bool ContainsRun(const std::vector<std::string> &words,
                 const std::vector<std::string> &needle) {
  if (needle.empty() || needle.size() > words.size()) return false;
  for (size_t i = 0; i + needle.size() <= words.size(); ++i) {
    if (std::equal(needle.begin(), needle.end(), words.begin() + i)) return true;
  }
  return false;
}

bool IsTrainSide(const Question &q) {
  return q.partition.empty() || q.partition == "train";
}

}  // namespace

bool VariantPredicate::Matches(const Question &q,
                               const OperationSequence *program,
                               const Vocabulary &vocabulary) const {
  const std::vector<std::string> words = TokenizeQuestion(q.text);
  bool hit = false;
  switch (kind) {
    case Kind::kStartsWith:
      for (const std::string &v : values) {
        const std::vector<std::string> run = TokenizeQuestion(v);
        hit = hit || (!run.empty() && run.size() <= words.size() &&
                      std::equal(run.begin(), run.end(), words.begin()));
      }
      break;
    case Kind::kContainsWord:
    case Kind::kContainsPhrase:
      for (const std::string &v : values) {
        hit = hit || ContainsRun(words, TokenizeQuestion(v));
      }
      break;
    case Kind::kRelationForm:
      if (program != nullptr) {
        for (const OperationTuple &t : program->tuples) {
          if (t.type != OpType::kRelate) continue;
          hit = hit || std::find(values.begin(), values.end(), t.args[1]) !=
                           values.end();
        }
      }
      break;
    case Kind::kContainsCategoryName:
      for (size_t i = 0; i < words.size() && !hit; ++i) {
        std::string run;
        for (size_t j = i; j < words.size() && j < i + 4 && !hit; ++j) {
          run += (j == i ? "" : " ") + words[j];
          auto name = NormalizeName(run, vocabulary);
          hit = name && vocabulary.IsObjectCategory(*name);
        }
      }
      break;
  }
  return hit != negate;
}

VariantPredicate VariantPredicateFromJson(const Json &j) {
  if (!j.is_object()) throw Error("variant predicate must be an object");
  VariantPredicate p;
  int kinds = 0;
  for (const auto &[name, kind] : KindNames()) {
    if (!j.contains(name)) continue;
    ++kinds;
    p.kind = kind;
    if (kind == Kind::kContainsCategoryName) {
      if (!j[name].is_boolean() || !j[name].get<bool>()) {
        throw Error("contains_category_name must be true");
      }
    } else {
      try {
        p.values = j[name].get<std::vector<std::string>>();
      } catch (const Json::exception &) {
        throw Error(std::string(name) + " needs a list of strings");
      }
      if (p.values.empty()) throw Error(std::string(name) + " is empty");
    }
  }
  if (kinds != 1) throw Error("variant predicate needs exactly one test");
  p.negate = j.value("negate", false);
  return p;
}

Json VariantPredicateToJson(const VariantPredicate &p) {
  Json j = Json::object();
  for (const auto &[name, kind] : KindNames()) {
    if (kind != p.kind) continue;
    if (kind == Kind::kContainsCategoryName) {
      j[name] = true;
    } else {
      j[name] = p.values;
    }
  }
  if (p.negate) j["negate"] = true;
  return j;
}

std::vector<VariantPair> VariantPairsFromJson(const Json &j) {
  if (!j.is_array()) throw Error("pair file must hold a JSON list");
  std::vector<VariantPair> pairs;
  std::set<std::string> names;
  for (const Json &e : j) {
    VariantPair p;
    try {
      p.name = e.at("name").get<std::string>();
      p.train_variant = VariantPredicateFromJson(e.at("train_variant"));
      p.test_variant = VariantPredicateFromJson(e.at("test_variant"));
    } catch (const Json::exception &ex) {
      throw Error(std::string("malformed variant pair: ") + ex.what());
    }
    if (!names.insert(p.name).second) {
      throw Error("duplicate variant pair '" + p.name + "'");
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

Json SplitResultToJson(const SplitResult &r) {
  Json counts = Json::object();
  for (const auto &[key, c] : r.template_counts) {
    counts[key] = {{"train_variant", c[0]}, {"test_variant", c[1]}};
  }
  return {{"name", r.pair_name},
          {"train", r.train_ids},
          {"test", r.test_ids},
          {"qualifying_templates", r.qualifying_templates},
          {"template_counts", counts}};
}

std::vector<SplitResult> MakeGeneralizationSplits(
    const Dataset &ds, const std::vector<VariantPair> &pairs, int min_count,
    Diagnostics *diag) {
  if (min_count < 1) throw Error("min_count must be at least 1");
  const Vocabulary &vocab = *ds.vocabulary;

  // Program and template per question, computed once.
  std::vector<std::optional<OperationSequence>> programs;
  std::vector<std::string> keys;
  for (const Question &q : ds.questions) {
    std::optional<OperationSequence> seq;
    if (q.program) {
      try {
        seq = ParseProgramString(*q.program);
      } catch (const Error &) {
      }
    }
    if (!seq) {
      if (auto parse = ParseQuestion(q.text, ds.grammar, vocab)) {
        seq = std::move(parse->program);
      }
    }
    keys.push_back(seq ? GeneralizeTemplate(*seq, vocab).Render() : "");
    programs.push_back(std::move(seq));
  }

  std::vector<SplitResult> results;
  for (const VariantPair &pair : pairs) {
    SplitResult r;
    r.pair_name = pair.name;
    const size_t n = ds.questions.size();
    std::vector<bool> is_a(n), is_b(n);
    for (size_t i = 0; i < n; ++i) {
      const Question &q = ds.questions[i];
      const OperationSequence *prog = programs[i] ? &*programs[i] : nullptr;
      is_a[i] = pair.train_variant.Matches(q, prog, vocab);
      is_b[i] = pair.test_variant.Matches(q, prog, vocab);
      if (keys[i].empty()) continue;
      if (is_a[i] && IsTrainSide(q)) ++r.template_counts[keys[i]][0];
      if (is_b[i] && q.partition == "test") ++r.template_counts[keys[i]][1];
    }
    std::set<std::string> qualifying;
    for (const auto &[key, c] : r.template_counts) {
      if (c[0] >= min_count && c[1] >= min_count) {
        qualifying.insert(key);
        r.qualifying_templates.push_back(key);
      }
    }
    if (qualifying.empty()) {
      Warn(diag, "variant pair '" + pair.name + "': no qualifying template");
    }
    for (size_t i = 0; i < n; ++i) {
      const Question &q = ds.questions[i];
      const bool b_qualifying = is_b[i] && qualifying.count(keys[i]) > 0;
      if (IsTrainSide(q) && !b_qualifying) r.train_ids.push_back(q.qid);
      if (q.partition == "test" && b_qualifying) r.test_ids.push_back(q.qid);
    }
    if (qualifying.empty()) r.test_ids.clear();
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace vlr
