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

// Program -> lattices -> ranked paths -> answer + attention.

#ifndef VLR_ENGINE_H_
#define VLR_ENGINE_H_

#include <vector>

#include "vlr/answer.h"
#include "vlr/decode.h"
#include "vlr/lattice.h"
#include "vlr/opseq.h"
#include "vlr/sgraph.h"

namespace vlr {

struct QuestionResult {
  Answer answer;
  AttentionMap attention;
  // Per lattice; filled only when requested.
  std::vector<std::vector<ViterbiPath>> nbest;
  std::vector<Lattice> lattices;
};

struct EngineOptions {
  AnswerConfig answer;
  bool with_nbest = false;
  bool keep_lattices = false;
};

// Throws BuildError for programs that cannot be compiled.
QuestionResult AnswerProgram(const OperationSequence &seq, const SceneGraph &sg,
                             const EngineOptions &options,
                             Diagnostics *diag = nullptr);

// Produces the answer for already decoded 1-best paths (one per lattice).
Answer ProduceAnswer(const OperationSequence &seq,
                     const std::vector<Lattice> &lattices,
                     const std::vector<ViterbiPath> &paths,
                     const SceneGraph &sg, const AnswerConfig &cfg);

// {answer, type, confidence, paths, attention}
Json QuestionResultToJson(const QuestionResult &result);

}  // namespace vlr

#endif  // VLR_ENGINE_H_
