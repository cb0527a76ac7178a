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

#include "vlr/engine.h"

namespace vlr {

namespace {

std::string Canonical(const std::string &name, const Vocabulary &vocab) {
  auto n = NormalizeName(name, vocab);
  return n ? *n : name;
}

}  // namespace

Answer ProduceAnswer(const OperationSequence &seq,
                     const std::vector<Lattice> &lattices,
                     const std::vector<ViterbiPath> &paths,
                     const SceneGraph &sg, const AnswerConfig &cfg) {
  const OperationTuple &terminal = seq.terminal();
  const Vocabulary &vocab = sg.vocabulary();
  switch (terminal.type) {
    case OpType::kQuery: {
      const std::string object = FinalObjectName(lattices[0], vocab);
      const ObjectCategory *category = vocab.FindObjectCategory(object);
      return AnswerQuery(paths[0], sg,
                         category != nullptr ? &category->members : nullptr,
                         terminal.qualifier);
    }
    case OpType::kChoose:
      return AnswerChoose(paths[0], sg, terminal.qualifier,
                          {Canonical(terminal.args[0], vocab),
                           Canonical(terminal.args[1], vocab)});
    case OpType::kAnd:
    case OpType::kOr:
      return AnswerLogical(paths[0], paths[1], terminal.type, cfg);
    case OpType::kCompare:
      return AnswerCompare(
          paths[0], paths[1], sg, terminal.qualifier,
          terminal.args[0] == "same" ? CompareMode::kSame
                                     : CompareMode::kDifferent);
    default:
      return AnswerVerify(paths[0], cfg);
  }
}

QuestionResult AnswerProgram(const OperationSequence &seq, const SceneGraph &sg,
                             const EngineOptions &options, Diagnostics *diag) {
  std::vector<Lattice> lattices = BuildLattices(seq, sg, diag);
  QuestionResult result;
  std::vector<ViterbiPath> best;
  for (const Lattice &lattice : lattices) {
    if (options.with_nbest) {
      std::vector<ViterbiPath> list = ListViterbi(lattice, options.answer.nbest);
      // The 1-best path is reported even when infeasible.
      best.push_back(list.empty() ? Viterbi(lattice) : list.front());
      result.nbest.push_back(std::move(list));
    } else {
      best.push_back(Viterbi(lattice));
    }
  }
  result.answer = ProduceAnswer(seq, lattices, best, sg, options.answer);
  result.attention = ComputeAttention(best, sg.num_regions());
  if (options.keep_lattices) result.lattices = std::move(lattices);
  return result;
}

Json QuestionResultToJson(const QuestionResult &result) {
  Json paths = Json::array();
  for (const ViterbiPath &p : result.answer.paths) paths.push_back(PathToJson(p));
  Json nbest = Json::array();
  for (const auto &list : result.nbest) {
    Json l = Json::array();
    for (const ViterbiPath &p : list) l.push_back(PathToJson(p));
    nbest.push_back(l);
  }
  Json out = {{"answer", result.answer.text},
              {"type", StructuralCategoryName(result.answer.type)},
              {"confidence", result.answer.confidence},
              {"paths", paths},
              {"attention", result.attention.weights}};
  if (!result.nbest.empty()) out["nbest"] = nbest;
  return out;
}

}  // namespace vlr
