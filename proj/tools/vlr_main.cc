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

// vlr: command-line front end.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "vlr/dataset.h"
#include "vlr/engine.h"
#include "vlr/evaluate.h"
#include "vlr/lattice.h"
#include "vlr/sgraph_io.h"
#include "vlr/splits.h"
#include "vlr/synth.h"
#include "vlr/template_grammar.h"

namespace fs = std::filesystem;

namespace {

using vlr::Json;

void PrintWarnings(const vlr::Diagnostics &diag) {
  for (const std::string &w : diag.warnings()) {
    std::cerr << "warning: " << w << "\n";
  }
}

// First existing candidate, or empty.
std::string FirstExisting(std::initializer_list<fs::path> candidates) {
  for (const fs::path &p : candidates) {
    if (!p.empty() && fs::exists(p)) return p.string();
  }
  return "";
}

std::string DefaultDataFile(const std::string &name) {
#ifdef VLR_DATA_DIR
  return (fs::path(VLR_DATA_DIR) / name).string();
#else
  return name;
#endif
}

struct SceneInputs {
  std::string scene_graph;
  std::string vocab;
  std::string grammar;
  std::string question;
  std::string program;
  int nbest = 1;
  double tau = 0.5;
};

void AddSceneOptions(CLI::App *cmd, SceneInputs *in) {
  cmd->add_option("--scene-graph", in->scene_graph, "Scene graph JSON")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--vocab", in->vocab,
                  "Vocabulary JSON (default: vocab.json next to or above the "
                  "scene graph)");
  cmd->add_option("--grammar", in->grammar, "Template grammar JSON");
  cmd->add_option("--question", in->question, "Question text");
  cmd->add_option("--program", in->program, "Program in tuple notation");
  cmd->add_option("--nbest", in->nbest, "Paths per lattice")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tau", in->tau, "Verify threshold")
      ->check(CLI::Range(0.0, 1.0));
}

struct Loaded {
  std::shared_ptr<const vlr::Vocabulary> vocab;
  std::shared_ptr<const vlr::SceneGraph> sg;
  vlr::OperationSequence program;
};

Loaded LoadSceneAndProgram(const SceneInputs &in) {
  const fs::path sg_path(in.scene_graph);
  const fs::path dir = sg_path.parent_path();
  std::string vocab_path = in.vocab;
  if (vocab_path.empty()) {
    vocab_path = FirstExisting({dir / "vocab.json", dir.parent_path() / "vocab.json"});
    if (vocab_path.empty()) throw vlr::Error("no vocabulary found; pass --vocab");
  }
  Loaded out;
  out.vocab = vlr::LoadVocabulary(vocab_path);
  out.sg = std::make_shared<const vlr::SceneGraph>(
      vlr::LoadSceneGraph(in.scene_graph, out.vocab));
  if (!in.program.empty()) {
    out.program = vlr::ParseProgramString(in.program);
  } else {
    if (in.question.empty()) throw vlr::Error("pass --question or --program");
    std::string grammar_path = in.grammar;
    if (grammar_path.empty()) {
      grammar_path = FirstExisting({dir / "templates.json",
                                    dir.parent_path() / "templates.json",
                                    DefaultDataFile("templates.json")});
    }
    if (grammar_path.empty()) throw vlr::Error("no grammar found; pass --grammar");
    const vlr::TemplateGrammar grammar = vlr::TemplateGrammar::Load(grammar_path);
    auto parse = vlr::ParseQuestion(in.question, grammar, *out.vocab);
    if (!parse) {
      throw vlr::Error("no template matches question '" + in.question + "'");
    }
    out.program = std::move(parse->program);
  }
  return out;
}

int RunAnswer(const SceneInputs &in) {
  Loaded l = LoadSceneAndProgram(in);
  vlr::EngineOptions options;
  options.answer.verify_threshold = in.tau;
  options.answer.nbest = in.nbest;
  options.answer.Validate();
  options.with_nbest = in.nbest > 1;
  vlr::Diagnostics diag;
  vlr::QuestionResult result = vlr::AnswerProgram(l.program, *l.sg, options, &diag);
  PrintWarnings(diag);
  Json out = vlr::QuestionResultToJson(result);
  if (!in.question.empty()) out["question"] = in.question;
  out["program"] = vlr::RenderProgramString(l.program);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int RunDumpPaths(const SceneInputs &in) {
  Loaded l = LoadSceneAndProgram(in);
  vlr::Diagnostics diag;
  const std::vector<vlr::Lattice> lattices =
      vlr::BuildLattices(l.program, *l.sg, &diag);
  PrintWarnings(diag);
  Json out = {{"program", vlr::RenderProgramString(l.program)},
              {"lattices", Json::array()}};
  for (const vlr::Lattice &lattice : lattices) {
    Json entry = {{"lattice", vlr::LatticeToJson(lattice)},
                  {"paths", Json::array()}};
    for (const vlr::ViterbiPath &p : vlr::ListViterbi(lattice, in.nbest)) {
      entry["paths"].push_back(vlr::PathToJson(p));
    }
    out["lattices"].push_back(std::move(entry));
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

vlr::ProgramSource ProgramSourceOrThrow(const std::string &name) {
  auto source = vlr::ProgramSourceFromName(name);
  if (!source) throw vlr::Error("--programs must be gold or parsed");
  return *source;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Lattice-based visual question answering over scene graphs"};
  app.require_subcommand(1);

  SceneInputs answer_in;
  CLI::App *answer = app.add_subcommand("answer", "Answer one question");
  AddSceneOptions(answer, &answer_in);

  SceneInputs dump_in;
  dump_in.nbest = 5;
  CLI::App *dump =
      app.add_subcommand("dump-paths", "Print lattices and ranked paths");
  AddSceneOptions(dump, &dump_in);

  std::string eval_dataset, eval_programs = "gold", eval_out, eval_jsonl;
  double eval_tau = 0.5;
  int eval_workers = 1, eval_nbest = 5;
  double eval_iou = 0.5;
  CLI::App *evaluate = app.add_subcommand("evaluate", "Evaluate a dataset");
  evaluate->add_option("--dataset", eval_dataset, "Dataset directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  evaluate->add_option("--programs", eval_programs, "gold or parsed");
  evaluate->add_option("--tau", eval_tau, "Verify threshold");
  evaluate->add_option("--out", eval_out, "Report JSON")->required();
  evaluate->add_option("--jsonl", eval_jsonl, "Per-question JSON lines");
  evaluate->add_option("--workers", eval_workers, "Worker threads")
      ->check(CLI::PositiveNumber);
  evaluate->add_option("--nbest", eval_nbest, "Echoed path count")
      ->check(CLI::PositiveNumber);
  evaluate->add_option("--iou-threshold", eval_iou, "Grounding IoU threshold");

  std::string synth_spec, synth_out, synth_templates;
  CLI::App *synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--spec", synth_spec, "Synth spec JSON")
      ->required()
      ->check(CLI::ExistingFile);
  synth->add_option("--out", synth_out, "Output dataset directory")->required();
  synth->add_option("--templates", synth_templates, "Template grammar JSON");

  std::string split_dataset, split_pairs, split_out;
  int split_min = 10;
  CLI::App *split = app.add_subcommand("split", "Build generalization splits");
  split->add_option("--dataset", split_dataset, "Dataset directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  split->add_option("--pairs", split_pairs, "Variant pair JSON")
      ->required()
      ->check(CLI::ExistingFile);
  split->add_option("--min-count", split_min, "Per-variant template threshold")
      ->check(CLI::PositiveNumber);
  split->add_option("--out", split_out, "Output directory")->required();

  std::string sweep_dev, sweep_grid = "0.05:0.95:0.05", sweep_programs = "gold",
                         sweep_out;
  int sweep_workers = 1;
  CLI::App *sweep = app.add_subcommand("sweep-tau", "Calibrate the verify threshold");
  sweep->add_option("--dev", sweep_dev, "Dev dataset directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  sweep->add_option("--grid", sweep_grid, "start:stop:step or a,b,c");
  sweep->add_option("--programs", sweep_programs, "gold or parsed");
  sweep->add_option("--out", sweep_out, "Result JSON");
  sweep->add_option("--workers", sweep_workers, "Worker threads")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (answer->parsed()) return RunAnswer(answer_in);
    if (dump->parsed()) return RunDumpPaths(dump_in);

    if (evaluate->parsed()) {
      vlr::Dataset ds = vlr::LoadDataset(eval_dataset);
      vlr::EvalConfig cfg;
      cfg.programs = ProgramSourceOrThrow(eval_programs);
      cfg.answer.verify_threshold = eval_tau;
      cfg.answer.nbest = eval_nbest;
      cfg.grounding.iou_threshold = eval_iou;
      cfg.workers = eval_workers;
      cfg.jsonl_path = eval_jsonl;
      const vlr::EvalReport report = vlr::Evaluate(ds, cfg);
      vlr::WriteJsonFile(eval_out, vlr::EvalReportToJson(report));
      std::cout << "questions " << report.total << "  accuracy "
                << report.accuracy() << "  binary " << report.binary_accuracy()
                << "  open " << report.open_accuracy() << "  unanswerable "
                << report.unanswerable << "  grounding(A) "
                << report.ground_a.mean() << "\n";
      return 0;
    }

    if (synth->parsed()) {
      const vlr::SynthSpec spec =
          vlr::SynthSpecFromJson(vlr::ReadJsonFile(synth_spec));
      const std::string grammar_path =
          synth_templates.empty() ? DefaultDataFile("templates.json")
                                  : synth_templates;
      const vlr::Dataset ds =
          vlr::GenSynthetic(spec, vlr::TemplateGrammar::Load(grammar_path));
      vlr::SaveDataset(ds, synth_out);
      std::cout << "wrote " << ds.questions.size() << " questions over "
                << ds.scenes.size() << " images to " << synth_out << "\n";
      return 0;
    }

    if (split->parsed()) {
      const vlr::Dataset ds = vlr::LoadDataset(split_dataset);
      const std::vector<vlr::VariantPair> pairs =
          vlr::VariantPairsFromJson(vlr::ReadJsonFile(split_pairs));
      vlr::Diagnostics diag;
      const std::vector<vlr::SplitResult> results =
          vlr::MakeGeneralizationSplits(ds, pairs, split_min, &diag);
      PrintWarnings(diag);
      fs::create_directories(split_out);
      Json report = Json::array();
      for (const vlr::SplitResult &r : results) {
        const fs::path dir = fs::path(split_out) / r.pair_name;
        fs::create_directories(dir);
        vlr::WriteJsonFile((dir / "train.json").string(), Json(r.train_ids));
        vlr::WriteJsonFile((dir / "test.json").string(), Json(r.test_ids));
        report.push_back(vlr::SplitResultToJson(r));
        std::cout << r.pair_name << ": train " << r.train_ids.size()
                  << "  test " << r.test_ids.size() << "  templates "
                  << r.qualifying_templates.size() << "\n";
      }
      vlr::WriteJsonFile((fs::path(split_out) / "split_report.json").string(),
                         report);
      return 0;
    }

    if (sweep->parsed()) {
      const vlr::Dataset dev = vlr::LoadDataset(sweep_dev);
      vlr::EvalConfig cfg;
      cfg.programs = ProgramSourceOrThrow(sweep_programs);
      cfg.workers = sweep_workers;
      vlr::Diagnostics diag;
      const vlr::SweepResult result =
          vlr::SweepThreshold(dev, vlr::ParseGrid(sweep_grid), cfg, &diag);
      PrintWarnings(diag);
      const Json out = vlr::SweepResultToJson(result);
      if (!sweep_out.empty()) vlr::WriteJsonFile(sweep_out, out);
      std::cout << out.dump(2) << "\n";
      return 0;
    }
  } catch (const vlr::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
