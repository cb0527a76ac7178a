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

#include "vlr/lattice.h"

#include <algorithm>

namespace vlr {

namespace {

std::string Canonical(const std::string &name, const Vocabulary &vocab) {
  auto n = NormalizeName(name, vocab);
  return n ? *n : name;
}

bool IsAttributeCheck(const OperationTuple &t, const Vocabulary &vocab) {
  return t.type == OpType::kFilter ||
         (t.type == OpType::kVerify &&
          (!t.qualifier.empty() ||
           !vocab.IsObjectName(Canonical(t.args[0], vocab))));
}

void FloorEmission(EmissionVector *e) {
  for (double &v : e->values) v = std::max(v, kProbabilityFloor);
}

void FloorRelation(TransitionMatrix *m) {
  for (int x = 0; x < m->n; ++x) {
    for (int r = 0; r < m->n; ++r) {
      if (x == r) continue;
      double &v = m->values[static_cast<size_t>(x) * m->n + r];
      v = std::max(v, kProbabilityFloor);
    }
  }
}

LatticeLayer CompileLayer(const OperationTuple &t, const SceneGraph &sg,
                          bool first, Diagnostics *diag) {
  const Vocabulary &vocab = sg.vocabulary();
  const int n = sg.num_regions();
  LatticeLayer layer;
  layer.source = t;

  if (t.type == OpType::kRelate) {
    if (first) throw BuildError("relate cannot open a branch: " + RenderTuple(t));
    const std::string &target = t.args[0];
    if (target == "_") {
      layer.emission.values.assign(n, 1.0);
      layer.emission.source = EmissionSource::kUnconstrained;
    } else {
      layer.emission = EmissionForObject(sg, Canonical(target, vocab), diag);
    }
    const RelationDirection dir = t.args[2] == "s"
                                      ? RelationDirection::kSubjectToObject
                                      : RelationDirection::kObjectToSubject;
    TransitionMatrix m =
        TransitionForRelation(sg, Canonical(t.args[1], vocab), dir, diag);
    FloorRelation(&m);
    layer.transition = std::move(m);
  } else if (IsAttributeCheck(t, vocab)) {
    layer.emission = EmissionForAttribute(sg, t.qualifier,
                                          Canonical(t.args[0], vocab),
                                          t.negated, diag);
    if (!first) layer.transition = TransitionMatrix::Identity(n);
  } else {
    // select, verify on an object, exist with an object argument.
    layer.emission = EmissionForObject(sg, Canonical(t.args[0], vocab), diag);
    if (!first) layer.transition = TransitionMatrix::Identity(n);
  }
  FloorEmission(&layer.emission);
  return layer;
}

Lattice BuildBranch(const std::vector<OperationTuple> &tuples, size_t begin,
                    size_t end, const OperationTuple &terminal,
                    const SceneGraph &sg, Diagnostics *diag) {
  if (begin >= end) throw BuildError("empty branch in operation sequence");
  if (!tuples[begin].EmitsLayer()) {
    throw BuildError("branch must start with a region-describing operation: " +
                     RenderTuple(tuples[begin]));
  }
  Lattice lattice;
  lattice.num_regions = sg.num_regions();
  lattice.terminal_op = terminal;
  for (size_t i = begin; i < end; ++i) {
    const OperationTuple &t = tuples[i];
    if (t.EmitsLayer()) {
      lattice.layers.push_back(CompileLayer(t, sg, lattice.layers.empty(), diag));
    }
  }
  return lattice;
}

}  // namespace

std::vector<Lattice> BuildLattices(const OperationSequence &seq,
                                   const SceneGraph &sg, Diagnostics *diag) {
  if (seq.tuples.empty()) throw BuildError("empty operation sequence");
  const auto &ts = seq.tuples;
  std::vector<Lattice> out;
  if (!seq.branch_split) {
    out.push_back(BuildBranch(ts, 0, ts.size(), seq.terminal(), sg, diag));
    return out;
  }
  const size_t split = *seq.branch_split;
  out.push_back(BuildBranch(ts, 0, split, seq.terminal(), sg, diag));
  out.push_back(BuildBranch(ts, split, ts.size() - 1, seq.terminal(), sg, diag));
  return out;
}

std::string FinalObjectName(const Lattice &lattice,
                            const Vocabulary &vocabulary) {
  for (auto it = lattice.layers.rbegin(); it != lattice.layers.rend(); ++it) {
    const OperationTuple &t = it->source;
    if (t.type == OpType::kRelate) {
      return t.args[0] == "_" ? std::string() : Canonical(t.args[0], vocabulary);
    }
    if (IsAttributeCheck(t, vocabulary)) continue;
    return Canonical(t.args[0], vocabulary);
  }
  return std::string();
}

Json LatticeToJson(const Lattice &lattice) {
  Json layers = Json::array();
  for (const LatticeLayer &layer : lattice.layers) {
    Json nonzeros = Json::array();
    std::string kind = "none";
    if (layer.transition) {
      const TransitionMatrix &m = *layer.transition;
      kind = TransitionKindName(m.kind);
      for (int x = 0; x < m.n; ++x) {
        for (int r = 0; r < m.n; ++r) {
          const double v = m.at(x, r);
          if (v > kProbabilityFloor) nonzeros.push_back({x, r, v});
        }
      }
    }
    layers.push_back({{"emissions", layer.emission.values},
                      {"emission_source", EmissionSourceName(layer.emission.source)},
                      {"transition_kind", kind},
                      {"transition_nonzeros", nonzeros},
                      {"source_tuple", RenderTuple(layer.source)}});
  }
  return {{"prior", lattice.prior},
          {"floor", kProbabilityFloor},
          {"terminal", RenderTuple(lattice.terminal_op)},
          {"layers", layers}};
}

}  // namespace vlr
