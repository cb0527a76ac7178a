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

#include "vlr/synth.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>

#include "vlr/answer.h"

namespace vlr {

namespace {

// ---------------------------------------------------------------------------
// Randomness

uint64_t SplitMix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t StreamSeed(uint64_t seed, uint64_t image, uint64_t stream) {
  return SplitMix(SplitMix(SplitMix(seed) ^ image) ^ stream);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  double Uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }
  int Index(int n) {
    return std::uniform_int_distribution<int>(0, n - 1)(engine_);
  }
  bool Coin() { return Index(2) == 1; }
  size_t Weighted(const std::vector<double> &w) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    double x = Uniform() * total;
    for (size_t i = 0; i < w.size(); ++i) {
      if (x < w[i]) return i;
      x -= w[i];
    }
    return w.size() - 1;
  }

  template <typename T>
  const T &Pick(const std::vector<T> &v) {
    return v[static_cast<size_t>(Index(static_cast<int>(v.size())))];
  }

  // Up to m distinct values of [0, n) other than `exclude`.
  std::vector<int> Distinct(int n, int exclude, int m) {
    std::vector<int> pool;
    for (int i = 0; i < n; ++i) {
      if (i != exclude) pool.push_back(i);
    }
    m = std::min<int>(m, static_cast<int>(pool.size()));
    for (int i = 0; i < m; ++i) {
      std::swap(pool[i], pool[i + Index(static_cast<int>(pool.size()) - i)]);
    }
    pool.resize(m);
    return pool;
  }

 private:
  std::mt19937_64 engine_;
};

enum : uint64_t { kTruthStream = 1, kQuestionStream = 2, kLeakStream = 3 };

// ---------------------------------------------------------------------------
// Built-in vocabulary

struct ObjectGroup {
  const char *category;  // nullptr: uncategorized
  std::vector<std::string> members;
};

const std::vector<ObjectGroup> &BaseObjects() {
  static const std::vector<ObjectGroup> groups = {
      {"animal",
       {"cat", "dog", "horse", "bird", "cow", "sheep", "elephant", "zebra",
        "giraffe", "bear"}},
      {"furniture",
       {"chair", "table", "bench", "sofa", "desk", "bed", "shelf", "cabinet"}},
      {"vehicle",
       {"car", "bus", "truck", "bicycle", "motorcycle", "train", "boat",
        "airplane"}},
      {"food",
       {"apple", "banana", "pizza", "sandwich", "cake", "carrot", "donut",
        "broccoli"}},
      {"clothing", {"shirt", "hat", "jacket", "shoe", "scarf", "glove"}},
      {nullptr,
       {"lamp", "tree", "fence", "sign", "window", "cup", "bottle", "umbrella",
        "clock", "plant", "book", "laptop", "phone", "bag", "kite", "ball",
        "pole", "door", "rock", "flower"}},
  };
  return groups;
}

const std::vector<AttributeCategory> &BaseAttributes() {
  static const std::vector<AttributeCategory> cats = {
      {"color",
       {"red", "green", "blue", "white", "black", "yellow", "brown", "gray",
        "purple", "pink", "silver", "beige"}},
      {"material",
       {"wooden", "metal", "plastic", "glass", "leather", "stone", "cotton",
        "ceramic"}},
      {"size", {"small", "large", "tiny", "huge", "tall", "short"}},
      {"shape", {"round", "square", "rectangular", "triangular", "oval"}},
      {"pattern", {"striped", "spotted", "plain", "checkered", "dotted"}},
  };
  return cats;
}

const std::vector<std::string> &BaseRelations() {
  static const std::vector<std::string> rels = {
      "next to",   "on",        "behind",    "in front of", "near",
      "under",     "holding",   "wearing",   "covered by",  "covering",
      "on top of", "above",     "beside",    "carrying",    "sitting on",
      "hanging on"};
  return rels;
}

std::string Pluralize(const std::string &word) {
  static const std::map<std::string, std::string> irregular = {
      {"sheep", "sheep"},         {"shelf", "shelves"},
      {"broccoli", "broccoli"},   {"furniture", "furniture"},
      {"food", "food"},           {"clothing", "clothing"},
      {"person", "people"}};
  if (auto it = irregular.find(word); it != irregular.end()) return it->second;
  auto ends = [&](const char *s) {
    const std::string suffix(s);
    return word.size() >= suffix.size() &&
           word.compare(word.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends("s") || ends("x") || ends("ch") || ends("sh") || ends("z")) {
    return word + "es";
  }
  if (word.size() >= 2 && word.back() == 'y' &&
      std::string("aeiou").find(word[word.size() - 2]) == std::string::npos) {
    return word.substr(0, word.size() - 1) + "ies";
  }
  return word + "s";
}

// ---------------------------------------------------------------------------
// Truth

const std::string &ClassName(const Vocabulary &v, int c) {
  return v.object_classes()[static_cast<size_t>(c)];
}

bool ObjectMatches(const Vocabulary &v, const std::string &name, int cls) {
  if (name == "_") return true;
  if (name == ClassName(v, cls)) return true;
  if (const ObjectCategory *cat = v.FindObjectCategory(name)) {
    return std::find(cat->members.begin(), cat->members.end(),
                     ClassName(v, cls)) != cat->members.end();
  }
  return false;
}

// Category index of an attribute tuple (explicit qualifier or first match).
std::optional<int> AttributeCategoryOf(const Vocabulary &v,
                                       const OperationTuple &t) {
  if (!t.qualifier.empty()) return v.AttributeCategoryIndex(t.qualifier);
  return v.FirstCategoryOf(t.args[0]);
}

bool AttributeMatches(const Vocabulary &v, const TruthImage &truth, int region,
                      const OperationTuple &t) {
  auto k = AttributeCategoryOf(v, t);
  if (!k) return false;
  auto a = v.AttributeIndex(*k, t.args[0]);
  const bool has = a && truth.attribute[region][*k] == *a;
  return t.negated ? !has : has;
}

// Branch tuple ranges [begin, end) excluding a trailing binary terminal.
std::vector<std::pair<size_t, size_t>> BranchRanges(
    const OperationSequence &seq) {
  const size_t n = seq.tuples.size();
  if (!seq.branch_split) return {{0, n}};
  return {{0, *seq.branch_split}, {*seq.branch_split, n - 1}};
}

constexpr size_t kMaxChains = 20000;

struct ChainOverflow {};

std::vector<std::vector<int>> BranchChains(const OperationSequence &seq,
                                           size_t begin, size_t end,
                                           const TruthImage &truth,
                                           const Vocabulary &v) {
  std::vector<std::vector<int>> chains;
  for (size_t i = begin; i < end; ++i) {
    const OperationTuple &t = seq.tuples[i];
    std::vector<std::vector<int>> next;
    switch (t.type) {
      case OpType::kSelect:
        for (int r = 0; r < truth.num_regions(); ++r) {
          if (ObjectMatches(v, t.args[0], truth.object_class[r])) {
            next.push_back({r});
          }
        }
        break;
      case OpType::kFilter:
        for (auto &c : chains) {
          if (AttributeMatches(v, truth, c.back(), t)) {
            c.push_back(c.back());
            next.push_back(std::move(c));
          }
        }
        break;
      case OpType::kVerify:
        for (auto &c : chains) {
          const bool ok = v.IsAttribute(t.args[0])
                              ? AttributeMatches(v, truth, c.back(), t)
                              : ObjectMatches(v, t.args[0],
                                              truth.object_class[c.back()]);
          if (ok) {
            c.push_back(c.back());
            next.push_back(std::move(c));
          }
        }
        break;
      case OpType::kExist:
        for (auto &c : chains) {
          if (t.args[0] == "_") {
            next.push_back(std::move(c));
          } else if (ObjectMatches(v, t.args[0],
                                   truth.object_class[c.back()])) {
            c.push_back(c.back());
            next.push_back(std::move(c));
          }
        }
        break;
      case OpType::kRelate: {
        auto rel = v.RelationIndex(t.args[1]);
        const bool subject_first = t.args[2] == "s";
        for (const auto &c : chains) {
          if (!rel) break;
          for (const auto &[s, o, r] : truth.edges) {
            if (r != *rel) continue;
            const int from = subject_first ? s : o;
            const int to = subject_first ? o : s;
            if (from != c.back()) continue;
            if (!ObjectMatches(v, t.args[0], truth.object_class[to])) continue;
            std::vector<int> ext = c;
            ext.push_back(to);
            next.push_back(std::move(ext));
            if (next.size() > kMaxChains) throw ChainOverflow{};
          }
        }
        break;
      }
      default:
        // query/choose/compare/and/or add no layer.
        next = std::move(chains);
        break;
    }
    chains = std::move(next);
  }
  return chains;
}

}  // namespace

bool TruthImage::HasEdge(int subject, int object, int relation) const {
  return std::find(edges.begin(), edges.end(),
                   std::make_tuple(subject, object, relation)) != edges.end();
}

std::vector<std::vector<std::vector<int>>> WitnessChains(
    const OperationSequence &seq, const TruthImage &truth,
    const Vocabulary &vocabulary) {
  std::vector<std::vector<std::vector<int>>> out;
  for (const auto &[b, e] : BranchRanges(seq)) {
    out.push_back(BranchChains(seq, b, e, truth, vocabulary));
  }
  return out;
}

namespace {

std::string AttributeName(const Vocabulary &v, int k, int a) {
  return v.attribute_categories()[k].attributes[a];
}

// Final regions of a branch (deduplicated, ascending).
std::vector<int> Finals(const std::vector<std::vector<int>> &chains) {
  std::set<int> s;
  for (const auto &c : chains) s.insert(c.back());
  return {s.begin(), s.end()};
}

std::string TruthAnswerFromChains(
    const OperationSequence &seq, const TruthImage &truth,
    const Vocabulary &v,
    const std::vector<std::vector<std::vector<int>>> &chains) {
  const OperationTuple &term = seq.terminal();
  auto yes_no = [](bool b) { return std::string(b ? kYes : kNo); };
  switch (term.type) {
    case OpType::kAnd:
      return yes_no(!chains[0].empty() && !chains[1].empty());
    case OpType::kOr:
      return yes_no(!chains[0].empty() || !chains[1].empty());
    case OpType::kQuery: {
      const std::vector<int> f = Finals(chains[0]);
      if (f.size() != 1) return std::string(kUnknown);
      if (term.qualifier == "name") return ClassName(v, truth.object_class[f[0]]);
      auto k = v.AttributeCategoryIndex(term.qualifier);
      if (!k) return std::string(kUnknown);
      return AttributeName(v, *k, truth.attribute[f[0]][*k]);
    }
    case OpType::kChoose: {
      const std::vector<int> f = Finals(chains[0]);
      if (f.size() != 1) return std::string(kUnknown);
      std::string value;
      if (term.qualifier == "name") {
        value = ClassName(v, truth.object_class[f[0]]);
        for (const std::string &opt : term.args) {
          if (ObjectMatches(v, opt, truth.object_class[f[0]])) return opt;
        }
        return std::string(kUnknown);
      }
      auto k = v.AttributeCategoryIndex(term.qualifier);
      if (!k) return std::string(kUnknown);
      value = AttributeName(v, *k, truth.attribute[f[0]][*k]);
      for (const std::string &opt : term.args) {
        if (opt == value) return opt;
      }
      return std::string(kUnknown);
    }
    case OpType::kCompare: {
      const std::vector<int> a = Finals(chains[0]);
      const std::vector<int> b = Finals(chains[1]);
      auto k = v.AttributeCategoryIndex(term.qualifier);
      if (a.size() != 1 || b.size() != 1 || !k) return std::string(kUnknown);
      const bool same = truth.attribute[a[0]][*k] == truth.attribute[b[0]][*k];
      return yes_no(term.args[0] == "same" ? same : !same);
    }
    default:
      return yes_no(!chains[0].empty());
  }
}

}  // namespace

std::string TruthAnswer(const OperationSequence &seq, const TruthImage &truth,
                        const Vocabulary &vocabulary) {
  try {
    return TruthAnswerFromChains(seq, truth, vocabulary,
                                 WitnessChains(seq, truth, vocabulary));
  } catch (const ChainOverflow &) {
    return std::string(kUnknown);
  }
}

// ---------------------------------------------------------------------------
// SynthSpec

void SynthSpec::Validate() const {
  auto require = [](bool ok, const std::string &what) {
    if (!ok) throw Error("invalid synth spec: " + what);
  };
  require(num_images >= 1, "num_images must be >= 1");
  require(regions_per_image >= 1, "regions_per_image must be >= 1");
  require(questions_per_image >= 1, "questions_per_image must be >= 1");
  require(num_object_classes >= 1, "num_object_classes must be >= 1");
  require(num_attribute_categories >= 1,
          "num_attribute_categories must be >= 1");
  require(attributes_per_category >= 1, "attributes_per_category must be >= 1");
  require(num_relation_classes >= 1, "num_relation_classes must be >= 1");
  require(relation_density >= 0, "relation_density must be >= 0");
  require(noise >= 0 && noise < 1, "noise must lie in [0, 1)");
  require(dev_fraction >= 0 && test_fraction >= 0 &&
              dev_fraction + test_fraction <= 1,
          "partition fractions must be non-negative and sum to <= 1");
  double total = 0;
  for (const auto &[cat, w] : category_mix) {
    require(w >= 0, "category weights must be non-negative");
    total += w;
  }
  require(category_mix.empty() || total > 0, "category weights sum to zero");
}

SynthSpec SynthSpecFromJson(const Json &j) {
  SynthSpec s;
  try {
    s.seed = j.value("seed", s.seed);
    s.num_images = j.value("num_images", s.num_images);
    s.regions_per_image = j.value("regions_per_image", s.regions_per_image);
    s.questions_per_image =
        j.value("questions_per_image", s.questions_per_image);
    if (j.contains("num_questions")) {
      const int total = j["num_questions"].get<int>();
      s.questions_per_image =
          std::max(1, (total + s.num_images - 1) / std::max(1, s.num_images));
    }
    s.num_object_classes = j.value("num_object_classes", s.num_object_classes);
    s.num_attribute_categories =
        j.value("num_attribute_categories", s.num_attribute_categories);
    s.attributes_per_category =
        j.value("attributes_per_category", s.attributes_per_category);
    s.num_relation_classes =
        j.value("num_relation_classes", s.num_relation_classes);
    s.relation_density = j.value("relation_density", s.relation_density);
    s.noise = j.value("noise", s.noise);
    s.dev_fraction = j.value("dev_fraction", s.dev_fraction);
    s.test_fraction = j.value("test_fraction", s.test_fraction);
    if (j.contains("category_mix")) {
      for (const auto &[name, w] : j["category_mix"].items()) {
        auto cat = StructuralCategoryFromName(name);
        if (!cat) throw Error("unknown structural category '" + name + "'");
        s.category_mix[*cat] = w.get<double>();
      }
    }
    s.answer_exclude =
        j.value("answer_exclude", std::vector<std::string>{});
    s.answer_only = j.value("answer_only", std::vector<std::string>{});
  } catch (const Json::exception &e) {
    throw Error(std::string("malformed synth spec: ") + e.what());
  }
  s.Validate();
  return s;
}

Json SynthSpecToJson(const SynthSpec &s) {
  Json mix = Json::object();
  for (const auto &[cat, w] : s.category_mix) {
    mix[StructuralCategoryName(cat)] = w;
  }
  return {{"seed", s.seed},
          {"num_images", s.num_images},
          {"regions_per_image", s.regions_per_image},
          {"questions_per_image", s.questions_per_image},
          {"num_object_classes", s.num_object_classes},
          {"num_attribute_categories", s.num_attribute_categories},
          {"attributes_per_category", s.attributes_per_category},
          {"num_relation_classes", s.num_relation_classes},
          {"relation_density", s.relation_density},
          {"noise", s.noise},
          {"category_mix", mix},
          {"dev_fraction", s.dev_fraction},
          {"test_fraction", s.test_fraction},
          {"answer_exclude", s.answer_exclude},
          {"answer_only", s.answer_only}};
}

std::shared_ptr<const Vocabulary> MakeSynthVocabulary(const SynthSpec &spec) {
  // Round-robin over groups so small vocabularies stay diverse.
  std::vector<std::string> classes;
  std::map<std::string, const char *> group_of;
  const auto &groups = BaseObjects();
  for (size_t i = 0; classes.size() < static_cast<size_t>(spec.num_object_classes);
       ++i) {
    bool any = false;
    for (const ObjectGroup &g : groups) {
      if (i < g.members.size()) {
        any = true;
        if (classes.size() < static_cast<size_t>(spec.num_object_classes)) {
          classes.push_back(g.members[i]);
          group_of[g.members[i]] = g.category;
        }
      }
    }
    if (!any) break;
  }
  for (int i = static_cast<int>(classes.size()); i < spec.num_object_classes;
       ++i) {
    classes.push_back("object" + std::to_string(i));
  }

  std::vector<AttributeCategory> attributes;
  const auto &base_attr = BaseAttributes();
  for (int k = 0; k < spec.num_attribute_categories; ++k) {
    AttributeCategory cat;
    cat.name = k < static_cast<int>(base_attr.size())
                   ? base_attr[k].name
                   : "property" + std::to_string(k);
    for (int a = 0; a < spec.attributes_per_category; ++a) {
      if (k < static_cast<int>(base_attr.size()) &&
          a < static_cast<int>(base_attr[k].attributes.size())) {
        cat.attributes.push_back(base_attr[k].attributes[a]);
      } else {
        cat.attributes.push_back(cat.name + std::to_string(a));
      }
    }
    attributes.push_back(std::move(cat));
  }

  std::vector<std::string> relations;
  const auto &base_rel = BaseRelations();
  for (int r = 0; r < spec.num_relation_classes; ++r) {
    relations.push_back(r < static_cast<int>(base_rel.size())
                            ? base_rel[r]
                            : "relation" + std::to_string(r));
  }

  std::vector<ObjectCategory> categories;
  for (const ObjectGroup &g : groups) {
    if (g.category == nullptr) continue;
    ObjectCategory cat{g.category, {}};
    for (const std::string &c : classes) {
      auto it = group_of.find(c);
      if (it != group_of.end() && it->second == g.category) {
        cat.members.push_back(c);
      }
    }
    if (!cat.members.empty()) categories.push_back(std::move(cat));
  }

  std::set<std::string> known(classes.begin(), classes.end());
  for (const auto &c : categories) known.insert(c.name);
  std::map<std::string, std::string> aliases;
  auto add_plural = [&](const std::string &name) {
    const std::string plural = Pluralize(name);
    if (plural != name && !known.count(plural)) aliases[plural] = name;
  };
  for (const std::string &c : classes) add_plural(c);
  for (const auto &c : categories) add_plural(c.name);

  return std::make_shared<const Vocabulary>(
      std::move(classes), std::move(attributes), std::move(relations),
      std::move(categories), std::move(aliases));
}

// ---------------------------------------------------------------------------
// Scene graphs

namespace {

TruthImage MakeTruth(const std::string &image_id, int n, const Vocabulary &v,
                     double density, uint64_t seed) {
  Rng rng(seed);
  TruthImage t;
  t.image_id = image_id;
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  const int rows = (n + cols - 1) / cols;
  const double cw = 640.0 / cols;
  const double ch = 480.0 / rows;
  std::vector<int> cells(static_cast<size_t>(rows * cols));
  std::iota(cells.begin(), cells.end(), 0);
  for (size_t i = cells.size(); i > 1; --i) {
    std::swap(cells[i - 1], cells[static_cast<size_t>(rng.Index(static_cast<int>(i)))]);
  }
  // One box per grid cell, so distinct regions never overlap.
  for (int r = 0; r < n; ++r) {
    const int cell = cells[static_cast<size_t>(r)];
    const double cx = (cell % cols) * cw;
    const double cy = (cell / cols) * ch;
    Box b;
    b.x0 = std::floor(cx + rng.Uniform() * 0.2 * cw);
    b.y0 = std::floor(cy + rng.Uniform() * 0.2 * ch);
    b.x1 = std::floor(cx + cw - rng.Uniform() * 0.2 * cw);
    b.y1 = std::floor(cy + ch - rng.Uniform() * 0.2 * ch);
    t.boxes.push_back(b);
  }
  const int num_classes = static_cast<int>(v.object_classes().size());
  const int num_cats = static_cast<int>(v.attribute_categories().size());
  const int num_rels = static_cast<int>(v.relation_classes().size());
  for (int r = 0; r < n; ++r) {
    t.object_class.push_back(rng.Index(num_classes));
    std::vector<int> attrs;
    for (int k = 0; k < num_cats; ++k) {
      attrs.push_back(rng.Index(
          static_cast<int>(v.attribute_categories()[k].attributes.size())));
    }
    t.attribute.push_back(std::move(attrs));
  }
  const double p = n > 1 ? std::min(1.0, density / (n - 1)) : 0.0;
  for (int s = 0; s < n; ++s) {
    for (int o = 0; o < n; ++o) {
      if (s == o) continue;
      const double u = rng.Uniform();
      const int rel = rng.Index(num_rels);
      if (u < p) t.edges.emplace_back(s, o, rel);
    }
  }
  return t;
}

// True entry keeps 1 - u*noise; the rest is split among random distractors.
struct Leak {
  double u = 0;
  std::vector<int> targets;
  std::vector<double> shares;
};

Leak DrawLeak(Rng &rng, int size, int truth, int max_targets) {
  Leak leak;
  leak.u = rng.Uniform();
  const int m = 1 + rng.Index(max_targets);
  leak.targets = rng.Distinct(size, truth, m);
  double total = 0;
  for (size_t i = 0; i < leak.targets.size(); ++i) {
    leak.shares.push_back(rng.Uniform() + 1e-3);
    total += leak.shares.back();
  }
  for (double &s : leak.shares) s /= total;
  return leak;
}

}  // namespace

SceneGraph NoisySceneGraph(const TruthImage &truth,
                           std::shared_ptr<const Vocabulary> vocabulary,
                           double noise, double relation_density,
                           uint64_t leak_seed) {
  const Vocabulary &v = *vocabulary;
  SceneGraph sg(vocabulary, truth.image_id, truth.boxes);
  Rng rng(leak_seed);
  const int n = truth.num_regions();
  const int num_classes = static_cast<int>(v.object_classes().size());
  const int num_rels = static_cast<int>(v.relation_classes().size());

  for (int r = 0; r < n; ++r) {
    const int cls = truth.object_class[r];
    Leak leak = DrawLeak(rng, num_classes, cls, 3);
    const double mass = leak.targets.empty() ? 0.0 : leak.u * noise;
    sg.SetObject(r, cls, 1.0 - mass);
    for (size_t i = 0; i < leak.targets.size(); ++i) {
      sg.SetObject(r, leak.targets[i], mass * leak.shares[i]);
    }
    for (size_t k = 0; k < v.attribute_categories().size(); ++k) {
      const int size = static_cast<int>(v.attribute_categories()[k].attributes.size());
      const int a = truth.attribute[r][k];
      Leak al = DrawLeak(rng, size, a, 2);
      const double am = al.targets.empty() ? 0.0 : al.u * noise;
      sg.SetAttribute(r, static_cast<int>(k), a, 1.0 - am);
      for (size_t i = 0; i < al.targets.size(); ++i) {
        sg.SetAttribute(r, static_cast<int>(k), al.targets[i], am * al.shares[i]);
      }
    }
  }

  auto raise = [&](int s, int o, int rel, double p) {
    if (p > sg.relation_prob(s, o, rel)) sg.SetRelation(s, o, rel, p);
  };
  for (const auto &[s, o, rel] : truth.edges) {
    Leak leak = DrawLeak(rng, num_rels, rel, 2);
    const double mass = leak.targets.empty() ? 0.0 : leak.u * noise;
    raise(s, o, rel, 1.0 - mass);
    for (size_t i = 0; i < leak.targets.size(); ++i) {
      raise(s, o, leak.targets[i], mass * leak.shares[i]);
    }
  }
  // Spurious low-confidence edges.
  const double p = n > 1 ? std::min(1.0, relation_density / (n - 1)) : 0.0;
  for (int s = 0; s < n; ++s) {
    for (int o = 0; o < n; ++o) {
      if (s == o) continue;
      const double u = rng.Uniform();
      const int rel = rng.Index(num_rels);
      const double value = rng.Uniform() * noise;
      if (u < p) raise(s, o, rel, value);
    }
  }
  sg.Validate();
  return sg;
}

// ---------------------------------------------------------------------------
// Question planting

namespace {

std::optional<std::string> SlotOf(const std::string &arg) {
  if (arg.size() > 2 && arg.front() == '{' && arg.back() == '}') {
    return arg.substr(1, arg.size() - 2);
  }
  return std::nullopt;
}

struct PreparedTemplate {
  size_t index = 0;
  const QuestionTemplate *tmpl = nullptr;
  OperationSequence skeleton;
  StructuralCategory category = StructuralCategory::kVerify;
  bool query_name = false;
};

class Planter {
 public:
  Planter(const Vocabulary &v, const TruthImage &truth, Rng &rng)
      : v_(v), truth_(truth), rng_(rng) {}

  // Reads one witness chain off the truth; nullopt if the draw fails.
  std::optional<std::map<std::string, std::string>> Plant(
      const OperationSequence &skel) {
    bindings_.clear();
    for (const auto &[b, e] : BranchRanges(skel)) {
      used_categories_.clear();
      int cur = -1;
      for (size_t i = b; i < e; ++i) {
        if (!Step(skel.tuples[i], &cur)) return std::nullopt;
      }
    }
    if (skel.branch_split) {
      if (!Step(skel.terminal(), nullptr)) return std::nullopt;
    }
    return bindings_;
  }

 private:
  // Binds an object slot to the region's class or one of its categories.
  bool BindObject(const std::string &arg, int region) {
    const int cls = truth_.object_class[region];
    auto slot = SlotOf(arg);
    if (!slot) return ObjectMatches(v_, arg, cls);
    if (auto it = bindings_.find(*slot); it != bindings_.end()) {
      return ObjectMatches(v_, it->second, cls);
    }
    std::vector<std::string> names = {ClassName(v_, cls)};
    for (const ObjectCategory &c : v_.object_categories()) {
      if (ObjectMatches(v_, c.name, cls)) names.push_back(c.name);
    }
    // Classes twice as likely as categories.
    bindings_[*slot] = (names.size() > 1 && rng_.Index(3) == 0)
                           ? names[1 + rng_.Index(static_cast<int>(names.size()) - 1)]
                           : names[0];
    return true;
  }

  // Resolves the attribute category of a filter/verify/choose tuple.
  std::optional<int> Category(const std::string &qualifier, bool needs_two) {
    if (auto slot = SlotOf(qualifier)) {
      if (auto it = bindings_.find(*slot); it != bindings_.end()) {
        return v_.AttributeCategoryIndex(it->second);
      }
      auto k = FreshCategory(needs_two);
      if (k) bindings_[*slot] = v_.attribute_categories()[*k].name;
      return k;
    }
    if (!qualifier.empty()) return v_.AttributeCategoryIndex(qualifier);
    return FreshCategory(needs_two);
  }

  std::optional<int> FreshCategory(bool needs_two) {
    std::vector<int> fresh, any;
    for (int k = 0; k < static_cast<int>(v_.attribute_categories().size()); ++k) {
      if (needs_two && v_.attribute_categories()[k].attributes.size() < 2) continue;
      any.push_back(k);
      if (!used_categories_.count(k)) fresh.push_back(k);
    }
    if (any.empty()) return std::nullopt;
    const int k = fresh.empty() ? rng_.Pick(any) : rng_.Pick(fresh);
    used_categories_.insert(k);
    return k;
  }

  // Binds an attribute slot so that (arg, negated) holds for the region.
  bool BindAttribute(const std::string &arg, std::optional<int> k, bool negated,
                     int region) {
    if (!k) return false;
    const auto &attrs = v_.attribute_categories()[*k].attributes;
    const int truth = truth_.attribute[region][*k];
    auto slot = SlotOf(arg);
    if (!slot) return true;  // literal; the executor decides
    if (bindings_.count(*slot)) return true;
    if (!negated) {
      bindings_[*slot] = attrs[truth];
      return true;
    }
    std::vector<int> others = rng_.Distinct(static_cast<int>(attrs.size()), truth, 1);
    if (others.empty()) return false;
    bindings_[*slot] = attrs[others[0]];
    return true;
  }

  bool Step(const OperationTuple &t, int *cur) {
    switch (t.type) {
      case OpType::kSelect:
        *cur = rng_.Index(truth_.num_regions());
        return BindObject(t.args[0], *cur);
      case OpType::kFilter:
        return BindAttribute(t.args[0], Category(t.qualifier, t.negated),
                             t.negated, *cur);
      case OpType::kVerify: {
        if (auto slot = SlotOf(t.args[0]);
            slot && SlotKindFromName(*slot) == SlotKind::kObject) {
          return BindObject(t.args[0], *cur);
        }
        return BindAttribute(t.args[0], Category(t.qualifier, false), false,
                             *cur);
      }
      case OpType::kExist:
        return t.args[0] == "_" || BindObject(t.args[0], *cur);
      case OpType::kRelate: {
        const bool subject_first = t.args[2] == "s";
        auto rel_slot = SlotOf(t.args[1]);
        std::optional<int> fixed_rel;
        if (!rel_slot) {
          fixed_rel = v_.RelationIndex(t.args[1]);
          if (!fixed_rel) return false;
        } else if (auto it = bindings_.find(*rel_slot); it != bindings_.end()) {
          fixed_rel = v_.RelationIndex(it->second);
        }
        std::vector<std::pair<int, int>> moves;  // (next region, relation)
        for (const auto &[s, o, r] : truth_.edges) {
          if (fixed_rel && r != *fixed_rel) continue;
          if (subject_first && s == *cur) moves.emplace_back(o, r);
          if (!subject_first && o == *cur) moves.emplace_back(s, r);
        }
        if (moves.empty()) return false;
        const auto [next, rel] = rng_.Pick(moves);
        if (rel_slot) bindings_[*rel_slot] = v_.relation_classes()[rel];
        *cur = next;
        return t.args[0] == "_" || BindObject(t.args[0], next);
      }
      case OpType::kQuery:
        if (auto slot = SlotOf(t.qualifier)) {
          auto k = FreshCategory(false);
          if (!k) return false;
          bindings_[*slot] = v_.attribute_categories()[*k].name;
        }
        return true;
      case OpType::kChoose: {
        auto s1 = SlotOf(t.args[0]);
        auto s2 = SlotOf(t.args[1]);
        if (!s1 || !s2) return true;
        std::string right, wrong;
        if (t.qualifier == "name") {
          const int cls = truth_.object_class[*cur];
          std::vector<int> o = rng_.Distinct(
              static_cast<int>(v_.object_classes().size()), cls, 1);
          if (o.empty()) return false;
          right = ClassName(v_, cls);
          wrong = ClassName(v_, o[0]);
        } else {
          auto k = Category(t.qualifier, true);
          if (!k) return false;
          const auto &attrs = v_.attribute_categories()[*k].attributes;
          const int a = truth_.attribute[*cur][*k];
          std::vector<int> o = rng_.Distinct(static_cast<int>(attrs.size()), a, 1);
          if (o.empty()) return false;
          right = attrs[a];
          wrong = attrs[o[0]];
        }
        if (rng_.Coin()) std::swap(right, wrong);
        bindings_[*s1] = right;
        bindings_[*s2] = wrong;
        return true;
      }
      case OpType::kCompare:
        if (auto slot = SlotOf(t.qualifier)) {
          if (!bindings_.count(*slot)) {
            auto k = FreshCategory(false);
            if (!k) return false;
            bindings_[*slot] = v_.attribute_categories()[*k].name;
          }
        }
        return true;
      case OpType::kAnd:
      case OpType::kOr:
        return true;
    }
    return false;
  }

  const Vocabulary &v_;
  const TruthImage &truth_;
  Rng &rng_;
  std::map<std::string, std::string> bindings_;
  std::set<int> used_categories_;
};

// Replaces one object or attribute binding with a different name of the
// same kind; used to produce negative verify/logical questions.
void Mutate(std::map<std::string, std::string> *bindings, const Vocabulary &v,
            Rng &rng) {
  std::vector<std::string> slots;
  for (const auto &[slot, value] : *bindings) {
    auto kind = SlotKindFromName(slot);
    if (kind == SlotKind::kObject || kind == SlotKind::kAttribute) {
      slots.push_back(slot);
    }
  }
  if (slots.empty()) return;
  const std::string &slot = rng.Pick(slots);
  std::string &value = (*bindings)[slot];
  if (SlotKindFromName(slot) == SlotKind::kObject) {
    const int n = static_cast<int>(v.object_classes().size());
    auto idx = v.ObjectClassIndex(value);
    std::vector<int> o = rng.Distinct(n, idx ? *idx : -1, 1);
    if (!o.empty()) value = v.object_classes()[o[0]];
  } else {
    auto k = v.FirstCategoryOf(value);
    if (!k) return;
    const auto &attrs = v.attribute_categories()[*k].attributes;
    std::vector<int> o = rng.Distinct(static_cast<int>(attrs.size()),
                                      *v.AttributeIndex(*k, value), 1);
    if (!o.empty()) value = attrs[o[0]];
  }
}

bool StartsWithVowel(const std::string &w) {
  return !w.empty() && std::string("aeiou").find(static_cast<char>(
                           std::tolower(static_cast<unsigned char>(w[0])))) !=
                           std::string::npos;
}

// Surface text from a pattern: slots filled, "a(n)" resolved, plural after
// "any", first letter capitalized.
std::string Render(const std::string &pattern,
                   const std::map<std::string, std::string> &bindings) {
  std::vector<std::string> words;
  size_t pos = 0;
  while (pos < pattern.size()) {
    while (pos < pattern.size() && pattern[pos] == ' ') ++pos;
    const size_t end = pattern.find(' ', pos);
    const std::string w = pattern.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    if (!w.empty()) words.push_back(w);
    pos = end == std::string::npos ? pattern.size() : end;
  }
  for (size_t i = 0; i < words.size(); ++i) {
    std::string &w = words[i];
    const size_t open = w.find('{');
    const size_t close = w.find('}');
    if (open != std::string::npos && close != std::string::npos && close > open) {
      const std::string slot = w.substr(open + 1, close - open - 1);
      std::string value = bindings.at(slot);
      if (i > 0 && (words[i - 1] == "any" || words[i - 1] == "Any")) {
        // Plural only for the last word of a multi-word name.
        const size_t sp = value.rfind(' ');
        value = sp == std::string::npos
                    ? Pluralize(value)
                    : value.substr(0, sp + 1) + Pluralize(value.substr(sp + 1));
      }
      w = w.substr(0, open) + value + w.substr(close + 1);
    }
  }
  for (size_t i = 0; i < words.size(); ++i) {
    std::string lower = words[i];
    for (char &c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "a(n)") {
      const bool vowel = i + 1 < words.size() && StartsWithVowel(words[i + 1]);
      words[i] = (words[i][0] == 'A' ? "A" : "a") + std::string(vowel ? "n" : "");
    }
  }
  std::string out;
  for (const std::string &w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  if (!out.empty()) {
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  }
  return out;
}

std::vector<PreparedTemplate> PrepareTemplates(const TemplateGrammar &grammar) {
  std::vector<PreparedTemplate> out;
  for (size_t i = 0; i < grammar.templates().size(); ++i) {
    const QuestionTemplate &t = grammar.templates()[i];
    PreparedTemplate p;
    p.index = i;
    p.tmpl = &t;
    try {
      p.skeleton = ParseProgramString(t.opseq);
    } catch (const Error &) {
      continue;
    }
    p.category = p.skeleton.category();
    p.query_name = p.skeleton.terminal().type == OpType::kQuery &&
                   p.skeleton.terminal().qualifier == "name";
    out.push_back(std::move(p));
  }
  return out;
}

constexpr int kAttemptsPerQuestion = 400;

}  // namespace

SynthOutput GenerateSynthetic(const SynthSpec &spec,
                              const TemplateGrammar &grammar) {
  spec.Validate();
  std::shared_ptr<const Vocabulary> vocab = MakeSynthVocabulary(spec);
  const Vocabulary &v = *vocab;
  for (const std::string &name : spec.answer_only) {
    if (!v.IsObjectClass(name)) {
      throw Error("answer_only names unknown class '" + name + "'");
    }
  }
  const std::set<std::string> exclude(spec.answer_exclude.begin(),
                                      spec.answer_exclude.end());
  const std::set<std::string> only(spec.answer_only.begin(),
                                   spec.answer_only.end());

  // Templates grouped by structural category, weighted by the mix.
  std::map<StructuralCategory, std::vector<PreparedTemplate>> by_category;
  for (PreparedTemplate &p : PrepareTemplates(grammar)) {
    if (!only.empty() && !p.query_name) continue;
    by_category[p.category].push_back(std::move(p));
  }
  std::vector<StructuralCategory> cats;
  std::vector<double> weights;
  for (const auto &[cat, list] : by_category) {
    auto it = spec.category_mix.find(cat);
    const double w = spec.category_mix.empty()
                         ? 1.0
                         : (it == spec.category_mix.end() ? 0.0 : it->second);
    if (w > 0) {
      cats.push_back(cat);
      weights.push_back(w);
    }
  }
  if (cats.empty()) throw Error("no usable templates for the requested mix");

  SynthOutput out;
  Dataset &ds = out.dataset;
  ds.vocabulary = vocab;
  ds.grammar = grammar;

  for (int img = 0; img < spec.num_images; ++img) {
    char id[32];
    std::snprintf(id, sizeof(id), "img%05d", img);
    TruthImage truth =
        MakeTruth(id, spec.regions_per_image, v, spec.relation_density,
                  StreamSeed(spec.seed, static_cast<uint64_t>(img), kTruthStream));
    if (!only.empty() &&
        std::none_of(truth.object_class.begin(), truth.object_class.end(),
                     [&](int c) { return only.count(v.object_classes()[c]) > 0; })) {
      // Every image must show at least one permitted answer.
      const std::string &name = spec.answer_only[img % spec.answer_only.size()];
      truth.object_class[img % truth.num_regions()] = *v.ObjectClassIndex(name);
    }
    ds.scenes[id] = std::make_shared<const SceneGraph>(NoisySceneGraph(
        truth, vocab, spec.noise, spec.relation_density,
        StreamSeed(spec.seed, static_cast<uint64_t>(img), kLeakStream)));

    Rng rng(StreamSeed(spec.seed, static_cast<uint64_t>(img), kQuestionStream));
    const double part = rng.Uniform();
    std::string partition;
    if (spec.dev_fraction + spec.test_fraction > 0) {
      partition = part < spec.test_fraction                       ? "test"
                  : part < spec.test_fraction + spec.dev_fraction ? "dev"
                                                                  : "train";
    }
    Planter planter(v, truth, rng);

    for (int qi = 0; qi < spec.questions_per_image; ++qi) {
      bool done = false;
      for (int attempt = 0; attempt < kAttemptsPerQuestion && !done; ++attempt) {
        const StructuralCategory cat = cats[rng.Weighted(weights)];
        const PreparedTemplate &p = rng.Pick(by_category[cat]);
        auto bindings = planter.Plant(p.skeleton);
        if (!bindings) continue;
        const bool yes_no = cat == StructuralCategory::kVerify ||
                            cat == StructuralCategory::kLogical;
        if (yes_no && rng.Coin()) {
          Mutate(&*bindings, v, rng);
          if (rng.Coin()) Mutate(&*bindings, v, rng);
        }
        OperationSequence seq;
        std::vector<std::vector<std::vector<int>>> chains;
        try {
          seq = InstantiateSkeleton(p.tmpl->opseq, *bindings, v);
          chains = WitnessChains(seq, truth, v);
        } catch (const Error &) {
          continue;
        } catch (const ChainOverflow &) {
          continue;
        }
        const std::string answer = TruthAnswerFromChains(seq, truth, v, chains);
        if (answer == kUnknown) continue;
        if (!yes_no) {
          // Open and option questions need one unambiguous referent.
          bool unique = true;
          std::vector<int> finals;
          for (const auto &branch : chains) {
            const std::vector<int> f = Finals(branch);
            unique = unique && f.size() == 1;
            if (!f.empty()) finals.push_back(f[0]);
          }
          if (!unique) continue;
          if (finals.size() == 2 && finals[0] == finals[1]) continue;
        }
        if (exclude.count(answer)) continue;
        if (!only.empty() && !only.count(answer)) continue;

        char qid[48];
        std::snprintf(qid, sizeof(qid), "%s-q%03d", id, qi);
        Question q;
        q.qid = qid;
        q.image_id = id;
        q.text = Render(p.tmpl->pattern, *bindings);
        q.program = RenderProgramString(seq);
        q.answer = answer;
        q.category = cat;
        q.partition = partition;
        ds.questions.push_back(std::move(q));

        const bool witnessed =
            std::all_of(chains.begin(), chains.end(),
                        [](const auto &b) { return !b.empty(); });
        if (witnessed) {
          std::set<int> all, finals;
          for (const auto &branch : chains) {
            for (const auto &c : branch) {
              all.insert(c.begin(), c.end());
              finals.insert(c.back());
            }
          }
          GroundingAnnotation ann;
          ann.qid = qid;
          for (int r : all) ann.question.push_back(truth.boxes[r]);
          for (int r : finals) ann.answer.push_back(truth.boxes[r]);
          ann.full_answer = ann.question;
          ds.annotations[ann.qid] = std::move(ann);
        }
        done = true;
      }
      if (!done) {
        throw Error("unsatisfiable synth spec: no question could be planted in " +
                    std::string(id) +
                    " (relation chains may need more regions or edges)");
      }
    }
    out.truth.push_back(std::move(truth));
  }
  return out;
}

}  // namespace vlr
