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

// Dataset-level evaluation and threshold calibration.

#ifndef VLR_EVALUATE_H_
#define VLR_EVALUATE_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vlr/answer.h"
#include "vlr/dataset.h"
#include "vlr/diagnostics.h"
#include "vlr/grounding.h"

namespace vlr {

enum class ProgramSource { kGold, kParsed };

const char *ProgramSourceName(ProgramSource source);
std::optional<ProgramSource> ProgramSourceFromName(std::string_view name);

struct EvalConfig {
  ProgramSource programs = ProgramSource::kGold;
  AnswerConfig answer;
  GroundingConfig grounding;
  // Echoed only; describes where the scene graphs came from.
  std::string scene_graph_source = "dataset";
  // Worker threads; never affects the report.
  int workers = 1;
  // Per-question JSON lines, written in dataset order. Empty: none.
  std::string jsonl_path;
  // Keep per-question records in the report.
  bool keep_records = true;
};

struct QuestionRecord {
  std::string qid;
  StructuralCategory category = StructuralCategory::kVerify;
  std::string gold;
  std::string predicted;
  bool correct = false;
  // No program could be obtained or compiled.
  bool unanswerable = false;
  std::string program;
  // Regions with non-zero attention.
  std::vector<int> attended;
  // Grounding per annotation category; absent when the category is empty or
  // the question is unannotated.
  std::optional<double> ground_q, ground_a, ground_fa, ground_pooled;
  std::optional<double> gqa_style;
  std::optional<PrfScore> prf;
};

Json QuestionRecordToJson(const QuestionRecord &r);

struct MeanStat {
  double sum = 0.0;
  int count = 0;

  void Add(double x) {
    sum += x;
    ++count;
  }
  double mean() const { return count == 0 ? 0.0 : sum / count; }
};

struct EvalReport {
  int total = 0;
  int correct = 0;
  int binary_total = 0;
  int binary_correct = 0;
  int open_total = 0;
  int open_correct = 0;
  int unanswerable = 0;
  std::map<StructuralCategory, std::pair<int, int>> by_category;  // correct, total

  MeanStat ground_q, ground_a, ground_fa, ground_pooled, gqa_style;
  MeanStat precision, recall, f1;

  std::vector<QuestionRecord> records;
  Json config;

  double accuracy() const { return total == 0 ? 0.0 : double(correct) / total; }
  double binary_accuracy() const {
    return binary_total == 0 ? 0.0 : double(binary_correct) / binary_total;
  }
  double open_accuracy() const {
    return open_total == 0 ? 0.0 : double(open_correct) / open_total;
  }
};

Json EvalReportToJson(const EvalReport &report);

// Evaluates every question. Deterministic for fixed inputs whatever the
// worker count.
EvalReport Evaluate(const Dataset &ds, const EvalConfig &cfg);

struct SweepResult {
  double best_tau = 0.5;
  // (tau, accuracy) in ascending tau order.
  std::vector<std::pair<double, double>> accuracy_by_tau;
  bool defaulted = false;
};

Json SweepResultToJson(const SweepResult &result);

// Picks the grid value maximizing dev accuracy; ties go to the smallest tau.
// Returns 0.5 with a warning when no question depends on tau. Throws Error
// on an empty grid.
SweepResult SweepThreshold(const Dataset &dev, const std::vector<double> &grid,
                           const EvalConfig &cfg, Diagnostics *diag = nullptr);

// "start:stop:step" (inclusive) or a comma-separated list.
std::vector<double> ParseGrid(std::string_view text);

}  // namespace vlr

#endif  // VLR_EVALUATE_H_
