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

#include "vlr/evaluate.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "vlr/engine.h"

namespace vlr {

const char *ProgramSourceName(ProgramSource source) {
  return source == ProgramSource::kGold ? "gold" : "parsed";
}

std::optional<ProgramSource> ProgramSourceFromName(std::string_view name) {
  if (name == "gold") return ProgramSource::kGold;
  if (name == "parsed") return ProgramSource::kParsed;
  return std::nullopt;
}

namespace {

std::optional<OperationSequence> ObtainProgram(const Dataset &ds,
                                               const Question &q,
                                               ProgramSource source) {
  if (source == ProgramSource::kGold && q.program) {
    try {
      return ParseProgramString(*q.program);
    } catch (const Error &) {
      return std::nullopt;
    }
  }
  auto parse = ParseQuestion(q.text, ds.grammar, *ds.vocabulary);
  if (!parse) return std::nullopt;
  return std::move(parse->program);
}

// Runs fn(i) for i in [begin, end) on up to `workers` threads.
template <typename Fn>
void ParallelFor(size_t begin, size_t end, int workers, Fn fn) {
  const size_t count = end - begin;
  const size_t threads =
      std::min<size_t>(static_cast<size_t>(std::max(1, workers)), count);
  if (threads <= 1) {
    for (size_t i = begin; i < end; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{begin};
  std::vector<std::thread> pool;
  for (size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < end; i = next++) fn(i);
    });
  }
  for (std::thread &th : pool) th.join();
}

QuestionRecord EvaluateOne(const Dataset &ds, const Question &q,
                           const EvalConfig &cfg) {
  QuestionRecord rec;
  rec.qid = q.qid;
  rec.category = q.category;
  rec.gold = q.answer;
  const SceneGraph &sg = *ds.scenes.at(q.image_id);
  AttentionMap attention;
  attention.weights.assign(sg.num_regions(), 0.0);

  std::optional<OperationSequence> seq = ObtainProgram(ds, q, cfg.programs);
  if (seq) {
    rec.program = RenderProgramString(*seq);
    try {
      EngineOptions options;
      options.answer = cfg.answer;
      QuestionResult result = AnswerProgram(*seq, sg, options);
      rec.predicted = result.answer.text;
      attention = std::move(result.attention);
    } catch (const Error &) {
      rec.unanswerable = true;
    }
  } else {
    rec.unanswerable = true;
  }
  if (rec.unanswerable) rec.predicted = std::string(kUnknown);
  rec.correct = !rec.unanswerable && rec.predicted == rec.gold;
  for (int r = 0; r < sg.num_regions(); ++r) {
    if (attention.weights[r] > 0) rec.attended.push_back(r);
  }

  if (const GroundingAnnotation *ann = ds.FindAnnotation(q.qid)) {
    const std::span<const Box> regions(sg.boxes());
    auto score = [&](const std::vector<Box> &boxes) -> std::optional<double> {
      if (boxes.empty()) return std::nullopt;
      return IouGroundingScore(attention, boxes, regions, cfg.grounding);
    };
    const std::vector<Box> pooled = ann->Pooled();
    rec.ground_q = score(ann->question);
    rec.ground_a = score(ann->answer);
    rec.ground_fa = score(ann->full_answer);
    rec.ground_pooled = score(pooled);
    if (!pooled.empty()) {
      rec.gqa_style = GqaStyleGrounding(attention, pooled, regions, cfg.grounding);
      rec.prf = GroundingPrf(attention, pooled, regions, cfg.grounding);
    }
  }
  return rec;
}

void Accumulate(const QuestionRecord &r, EvalReport *report) {
  ++report->total;
  const int ok = r.correct ? 1 : 0;
  report->correct += ok;
  if (IsBinary(r.category)) {
    ++report->binary_total;
    report->binary_correct += ok;
  } else {
    ++report->open_total;
    report->open_correct += ok;
  }
  report->unanswerable += r.unanswerable ? 1 : 0;
  auto &cat = report->by_category[r.category];
  cat.first += ok;
  ++cat.second;
  if (r.ground_q) report->ground_q.Add(*r.ground_q);
  if (r.ground_a) report->ground_a.Add(*r.ground_a);
  if (r.ground_fa) report->ground_fa.Add(*r.ground_fa);
  if (r.ground_pooled) report->ground_pooled.Add(*r.ground_pooled);
  if (r.gqa_style) report->gqa_style.Add(*r.gqa_style);
  if (r.prf) {
    report->precision.Add(r.prf->precision);
    report->recall.Add(r.prf->recall);
    report->f1.Add(r.prf->f1);
  }
}

Json ConfigEcho(const EvalConfig &cfg) {
  return {{"programs", ProgramSourceName(cfg.programs)},
          {"scene_graphs", cfg.scene_graph_source},
          {"tau", cfg.answer.verify_threshold},
          {"nbest", cfg.answer.nbest},
          {"iou_threshold", cfg.grounding.iou_threshold}};
}

Json StatJson(const MeanStat &s) {
  return {{"mean", s.mean()}, {"count", s.count}};
}

constexpr size_t kChunk = 4096;

}  // namespace

Json QuestionRecordToJson(const QuestionRecord &r) {
  Json j = {{"qid", r.qid},
            {"category", StructuralCategoryName(r.category)},
            {"gold", r.gold},
            {"predicted", r.predicted},
            {"correct", r.correct},
            {"unanswerable", r.unanswerable},
            {"program", r.program},
            {"attended", r.attended}};
  Json g = Json::object();
  if (r.ground_q) g["Q"] = *r.ground_q;
  if (r.ground_a) g["A"] = *r.ground_a;
  if (r.ground_fa) g["FA"] = *r.ground_fa;
  if (r.ground_pooled) g["Q+A+FA"] = *r.ground_pooled;
  if (r.gqa_style) g["gqa-style (approx)"] = *r.gqa_style;
  if (r.prf) {
    g["prf"] = {{"precision", r.prf->precision},
                {"recall", r.prf->recall},
                {"f1", r.prf->f1}};
  }
  if (!g.empty()) j["grounding"] = g;
  return j;
}

Json EvalReportToJson(const EvalReport &report) {
  Json by_cat = Json::object();
  for (const auto &[cat, ct] : report.by_category) {
    by_cat[StructuralCategoryName(cat)] = {
        {"accuracy", ct.second == 0 ? 0.0 : double(ct.first) / ct.second},
        {"correct", ct.first},
        {"total", ct.second}};
  }
  Json records = Json::array();
  for (const QuestionRecord &r : report.records) {
    records.push_back(QuestionRecordToJson(r));
  }
  return {
      {"config", report.config},
      {"counts",
       {{"total", report.total},
        {"binary", report.binary_total},
        {"open", report.open_total},
        {"unanswerable", report.unanswerable}}},
      {"accuracy",
       {{"overall", report.accuracy()},
        {"binary", report.binary_accuracy()},
        {"open", report.open_accuracy()},
        {"by_category", by_cat}}},
      {"grounding",
       {{"Q", StatJson(report.ground_q)},
        {"A", StatJson(report.ground_a)},
        {"FA", StatJson(report.ground_fa)},
        {"Q+A+FA", StatJson(report.ground_pooled)},
        {"gqa-style (approx)", StatJson(report.gqa_style)},
        {"prf",
         {{"precision", report.precision.mean()},
          {"recall", report.recall.mean()},
          {"f1", report.f1.mean()},
          {"count", report.f1.count}}}}},
      {"questions", records}};
}

EvalReport Evaluate(const Dataset &ds, const EvalConfig &cfg) {
  cfg.answer.Validate();
  cfg.grounding.Validate();
  ds.Validate();
  EvalReport report;
  report.config = ConfigEcho(cfg);

  std::ofstream jsonl;
  if (!cfg.jsonl_path.empty()) {
    jsonl.open(cfg.jsonl_path);
    if (!jsonl) throw Error("cannot write '" + cfg.jsonl_path + "'");
  }
  // Chunks bound memory when records are streamed instead of kept.
  std::vector<QuestionRecord> chunk;
  for (size_t begin = 0; begin < ds.questions.size(); begin += kChunk) {
    const size_t end = std::min(ds.questions.size(), begin + kChunk);
    chunk.assign(end - begin, QuestionRecord{});
    ParallelFor(begin, end, cfg.workers, [&](size_t i) {
      chunk[i - begin] = EvaluateOne(ds, ds.questions[i], cfg);
    });
    for (QuestionRecord &r : chunk) {
      Accumulate(r, &report);
      if (jsonl.is_open()) jsonl << QuestionRecordToJson(r).dump() << '\n';
      if (cfg.keep_records) report.records.push_back(std::move(r));
    }
  }
  return report;
}

Json SweepResultToJson(const SweepResult &result) {
  Json grid = Json::array();
  for (const auto &[tau, acc] : result.accuracy_by_tau) {
    grid.push_back({{"tau", tau}, {"accuracy", acc}});
  }
  return {{"best_tau", result.best_tau},
          {"defaulted", result.defaulted},
          {"grid", grid}};
}

SweepResult SweepThreshold(const Dataset &dev, const std::vector<double> &grid,
                           const EvalConfig &cfg, Diagnostics *diag) {
  if (grid.empty()) throw Error("empty threshold grid");
  std::vector<double> taus = grid;
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
  for (double tau : taus) {
    AnswerConfig probe = cfg.answer;
    probe.verify_threshold = tau;
    probe.Validate();
  }

  SweepResult result;
  const bool any_threshold_question = std::any_of(
      dev.questions.begin(), dev.questions.end(), [](const Question &q) {
        return q.category == StructuralCategory::kVerify ||
               q.category == StructuralCategory::kLogical;
      });
  if (!any_threshold_question) {
    Warn(diag, "dev set has no verify or logical questions; using tau 0.5");
    result.defaulted = true;
    return result;
  }

  // Decode once; only the answer step depends on tau.
  struct Decoded {
    std::optional<OperationSequence> seq;
    std::vector<Lattice> lattices;
    std::vector<ViterbiPath> paths;
  };
  std::vector<Decoded> decoded(dev.questions.size());
  ParallelFor(0, dev.questions.size(), cfg.workers, [&](size_t i) {
    const Question &q = dev.questions[i];
    Decoded &d = decoded[i];
    d.seq = ObtainProgram(dev, q, cfg.programs);
    if (!d.seq) return;
    try {
      const SceneGraph &sg = *dev.scenes.at(q.image_id);
      d.lattices = BuildLattices(*d.seq, sg, nullptr);
      for (const Lattice &l : d.lattices) d.paths.push_back(Viterbi(l));
    } catch (const Error &) {
      d.seq.reset();
    }
  });

  double best_acc = -1.0;
  for (double tau : taus) {
    AnswerConfig ac = cfg.answer;
    ac.verify_threshold = tau;
    int correct = 0;
    for (size_t i = 0; i < decoded.size(); ++i) {
      const Decoded &d = decoded[i];
      if (!d.seq) continue;
      const Question &q = dev.questions[i];
      const Answer a = ProduceAnswer(*d.seq, d.lattices, d.paths,
                                     *dev.scenes.at(q.image_id), ac);
      correct += a.text == q.answer ? 1 : 0;
    }
    const double acc =
        dev.questions.empty() ? 0.0 : double(correct) / dev.questions.size();
    result.accuracy_by_tau.emplace_back(tau, acc);
    if (acc > best_acc) {
      best_acc = acc;
      result.best_tau = tau;
    }
  }
  return result;
}

std::vector<double> ParseGrid(std::string_view text) {
  auto number = [&](std::string_view s) {
    const std::string str(s);
    size_t used = 0;
    double v = 0;
    try {
      v = std::stod(str, &used);
    } catch (const std::exception &) {
      used = std::string::npos;
    }
    if (used != str.size()) throw Error("bad grid value '" + str + "'");
    return v;
  };
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    std::vector<double> parts;
    size_t pos = 0;
    while (true) {
      const size_t c = text.find(':', pos);
      parts.push_back(number(text.substr(pos, c == std::string_view::npos
                                                  ? std::string_view::npos
                                                  : c - pos)));
      if (c == std::string_view::npos) break;
      pos = c + 1;
    }
    if (parts.size() != 3 || parts[2] <= 0 || parts[1] < parts[0]) {
      throw Error("grid must be start:stop:step with step > 0");
    }
    for (int i = 0;; ++i) {
      // Rounded to 12 decimals so 0.05 * 3 prints as 0.15.
      const double v = std::round((parts[0] + i * parts[2]) * 1e12) / 1e12;
      if (v > parts[1] + 1e-9) break;
      out.push_back(v);
    }
  } else {
    size_t pos = 0;
    while (pos <= text.size()) {
      const size_t c = text.find(',', pos);
      const std::string_view item =
          text.substr(pos, c == std::string_view::npos ? std::string_view::npos
                                                       : c - pos);
      if (!item.empty()) out.push_back(number(item));
      if (c == std::string_view::npos) break;
      pos = c + 1;
    }
  }
  if (out.empty()) throw Error("empty threshold grid");
  return out;
}

}  // namespace vlr
