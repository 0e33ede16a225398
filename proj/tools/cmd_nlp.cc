// Copyright 2026 The advocr Authors. All Rights Reserved.
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

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "advocr/experiments.h"
#include "advocr/render.h"
#include "advocr/reports.h"
#include "advocr/textattack.h"
#include "cli_common.h"
#include "commands.h"

namespace advocr::cli {
namespace {

// 0 selects the adaptive per-word threshold.
std::optional<std::size_t> TauOrAdaptive(std::size_t tau) {
  return tau == 0 ? std::nullopt : std::optional<std::size_t>(tau);
}

std::string TauString(std::size_t tau) {
  return tau == 0 ? "adaptive" : std::to_string(tau);
}

// --- nlp-target ------------------------------------------------------------

struct TargetOptions {
  CommonOptions common;
  std::string corpus;
  std::string inputs;
  std::string text;
  std::string label;
  std::size_t tau = 2;
  CriterionFlags criterion;
  BowTrainConfig bow;
};

int RunTarget(const TargetOptions& o) {
  const std::vector<LabeledText> corpus = LoadCorpus(o.corpus);
  const FailureCriterion criterion = o.criterion.Resolve();
  BowTrainConfig bow = o.bow;
  bow.seed = o.common.seed;
  const BowTrainResult trained = TrainBow(corpus, bow);
  const BowClassifier& clf = trained.classifier;

  std::vector<LabeledText> inputs;
  if (!o.text.empty()) {
    if (o.label.empty()) throw InvalidArgument("--text needs --label");
    inputs.push_back({o.label, o.text});
  } else {
    inputs = o.inputs.empty() ? corpus : LoadCorpus(o.inputs);
  }
  if (inputs.empty()) throw InvalidArgument("no input texts");

  std::vector<TargetRow> rows;
  std::size_t attempted = 0, succeeded = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    TargetRow row{.id = i, .input = inputs[i], .result = {}, .error = {}};
    if (clf.Predict(row.input.text) != row.input.label) {
      row.error = "input is misclassified";
    } else {
      try {
        row.result = GenerateTargetText(clf, row.input.text, row.input.label,
                                        TauOrAdaptive(o.tau), criterion);
        ++attempted;
        succeeded += row.result.success;
      } catch (const Error& e) {
        row.error = e.what();
      }
    }
    rows.push_back(std::move(row));
  }

  const std::string dir = EnsureDir(o.common.out_dir);
  std::ostringstream csv, jsonl;
  WriteTargetCsv(csv, rows);
  WriteTargetJsonl(jsonl, rows);
  WriteText(dir, "targets.csv", csv.str());
  WriteText(dir, "targets.jsonl", jsonl.str());
  const double rate = attempted ? static_cast<double>(succeeded) / attempted
                                : 0.0;
  std::ostringstream summary;
  summary << "inputs,attempted,succeeded,success_rate\n"
          << inputs.size() << ',' << attempted << ',' << succeeded << ','
          << FormatDouble(rate) << '\n';
  WriteText(dir, "summary.csv", summary.str());

  ResolvedConfig rc = BaseConfig("nlp-target", o.common);
  rc.Set("corpus", o.corpus);
  rc.Set("inputs", o.text.empty() ? (o.inputs.empty() ? o.corpus : o.inputs)
                                  : std::string("<--text>"));
  rc.Set("tau", TauString(o.tau));
  rc.Set("criterion", criterion.ToString());
  AddBowConfig(rc, bow);
  rc.Write(JoinPath(dir, "config.txt"));

  if (!o.text.empty() && !rows[0].error.empty()) {
    throw ExperimentFailure(rows[0].error);
  }
  if (!o.text.empty()) {
    std::cout << (rows[0].result.success ? "success: " : "failure: ")
              << rows[0].result.text << '\n';
  } else {
    std::cout << "transformed " << succeeded << "/" << attempted
              << " correctly classified texts (" << FormatDouble(rate)
              << ")\n";
  }
  if (succeeded == 0) throw ExperimentFailure("no text was transformed");
  return kExitOk;
}

void AddTarget(CLI::App& root, std::vector<Command>& out) {
  auto o = std::make_shared<TargetOptions>();
  o->corpus = DataPath("sentiment.tsv");
  CLI::App* app = root.add_subcommand(
      "nlp-target", "Generate adversarial target texts against a classifier");
  AddCommon(app, o->common);
  app->add_option("--corpus", o->corpus,
                  "label<TAB>text corpus the classifier is trained on")
      ->capture_default_str();
  app->add_option("--inputs", o->inputs,
                  "label<TAB>text file to transform (default: the corpus)");
  app->add_option("--text", o->text, "Transform this single text");
  app->add_option("--label", o->label, "True label of --text");
  app->add_option("--tau", o->tau, "Edit-distance bound; 0 = adaptive")
      ->capture_default_str();
  AddCriterionFlags(app, o->criterion);
  out.push_back({app, [o] { return RunTarget(*o); }});
}

// --- nlp-evasion -----------------------------------------------------------

struct EvasionCmdOptions {
  CommonOptions common;
  std::string model;
  std::string corpus;
  std::size_t count = 50;
  double test_fraction = 0.25;
  bool text_only = false;
  bool no_images = false;
  CriterionFlags criterion;
  AttackFlags attack;
  BowTrainConfig bow;
};

int RunEvasionCmd(const EvasionCmdOptions& o) {
  if (!o.text_only && o.model.empty()) {
    throw InvalidArgument("--model is required unless --text-only is given");
  }
  const std::vector<LabeledText> corpus = LoadCorpus(o.corpus);
  const CorpusSplit split = SplitCorpus(corpus, o.test_fraction, o.common.seed);
  BowTrainConfig bow = o.bow;
  bow.seed = o.common.seed;
  const BowClassifier clf = TrainBow(split.train, bow).classifier;
  const std::vector<LabeledText> texts =
      SelectCorrect(clf, split.test, o.count, o.common.seed);
  if (texts.empty()) {
    throw ExperimentFailure("no correctly classified test texts");
  }

  EvasionOptions eo;
  eo.criterion = o.criterion.Resolve();
  eo.text_only = o.text_only;
  eo.attack = o.attack.Resolve();
  const std::optional<ModelParams> model =
      o.text_only ? std::nullopt
                  : std::optional<ModelParams>(LoadParams(o.model));
  const ModelParams& params =
      model ? *model : ModelParams::Initialize(ModelConfig{}, 0);
  const EvasionReport report = RunEvasion(params, clf, texts, eo);

  const std::string dir = EnsureDir(o.common.out_dir);
  std::ostringstream csv, jsonl, summary;
  WriteEvasionCsv(csv, report.rows);
  WriteEvasionJsonl(jsonl, report.rows);
  WriteEvasionSummary(summary, report.summary);
  WriteText(dir, "evasion.csv", csv.str());
  WriteText(dir, "evasion.jsonl", jsonl.str());
  WriteText(dir, "summary.json", summary.str());
  if (!o.text_only && !o.no_images) {
    const std::string img_dir = EnsureDir(JoinPath(dir, "images"));
    const std::size_t h = params.config().input_height;
    for (const EvasionRow& r : report.rows) {
      if (r.adversarial.size() == 0) continue;
      char stem[32];
      std::snprintf(stem, sizeof stem, "%03zu", r.id);
      WritePgm(JoinPath(img_dir, std::string(stem) + "_clean.pgm"),
               NormalizeLine(RenderLine(r.text), h));
      WritePgm(JoinPath(img_dir, std::string(stem) + "_adv.pgm"),
               r.adversarial);
    }
  }

  ResolvedConfig rc = BaseConfig("nlp-evasion", o.common);
  rc.Set("model", o.model);
  rc.Set("corpus", o.corpus);
  rc.Set("count", o.count);
  rc.Set("test_fraction", o.test_fraction);
  rc.Set("text_only", o.text_only);
  rc.Set("tau", std::size_t{2});
  rc.Set("criterion", eo.criterion.ToString());
  AddBowConfig(rc, bow);
  if (!o.text_only) {
    rc.Set("preset", o.attack.preset);
    AddAttackConfig(rc, eo.attack);
  }
  rc.Write(JoinPath(dir, "config.txt"));

  const EvasionSummary& s = report.summary;
  std::cout << "texts " << s.texts << "  baseline "
            << FormatDouble(s.baseline_accuracy) << "  text_success "
            << FormatDouble(s.text_success_rate);
  if (!o.text_only) {
    std::cout << "  ocr_target " << FormatDouble(s.ocr_target_accuracy);
  }
  std::cout << "  adversarial_accuracy "
            << FormatDouble(s.adversarial_accuracy) << '\n';
  if (s.text_success_rate == 0.0) {
    throw ExperimentFailure("no text could be transformed");
  }
  return kExitOk;
}

void AddEvasion(CLI::App& root, std::vector<Command>& out) {
  auto o = std::make_shared<EvasionCmdOptions>();
  o->corpus = DataPath("sentiment.tsv");
  CLI::App* app = root.add_subcommand(
      "nlp-evasion",
      "Target text -> adversarial image -> OCR -> classifier, per text");
  AddCommon(app, o->common);
  app->add_option("--model", o->model, "Recognizer weight file");
  app->add_option("--corpus", o->corpus, "label<TAB>text corpus")
      ->capture_default_str();
  app->add_option("--count", o->count, "Test texts to attack")
      ->capture_default_str();
  app->add_option("--test-fraction", o->test_fraction)->capture_default_str();
  app->add_flag("--text-only", o->text_only,
                "Skip the image stage; report the text attack alone");
  app->add_flag("--no-images", o->no_images, "Skip writing PGM images");
  AddCriterionFlags(app, o->criterion);
  AddAttackFlags(app, o->attack, "sentiment");
  out.push_back({app, [o] { return RunEvasionCmd(*o); }});
}

// --- poison ----------------------------------------------------------------

struct PoisonCmdOptions {
  CommonOptions common;
  std::string corpus;
  std::vector<double> fractions = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  std::size_t tau = 2;
  double test_fraction = 0.25;
  std::string model;
  std::size_t verify = 50;
  CriterionFlags criterion;
  AttackFlags attack;
  BowTrainConfig bow;
};

int RunPoisonCmd(const PoisonCmdOptions& o) {
  const std::vector<LabeledText> corpus = LoadCorpus(o.corpus);
  PoisonConfig pc;
  pc.fractions = o.fractions;
  pc.criterion = o.criterion.Resolve();
  pc.tau = TauOrAdaptive(o.tau);
  pc.test_fraction = o.test_fraction;
  pc.train = o.bow;
  pc.train.seed = o.common.seed;
  pc.seed = o.common.seed;
  const PoisonReport report = PoisonExperiment(corpus, pc);

  const std::string dir = EnsureDir(o.common.out_dir);
  std::ostringstream curve, samples;
  WritePoisonCsv(curve, report.curve);
  WritePoisonSamplesTsv(samples, report.samples);
  WriteText(dir, "poison.csv", curve.str());
  WriteText(dir, "samples.tsv", samples.str());

  ResolvedConfig rc = BaseConfig("poison", o.common);
  rc.Set("corpus", o.corpus);
  rc.Set("fractions", std::span<const double>(o.fractions));
  rc.Set("tau", TauString(o.tau));
  rc.Set("test_fraction", o.test_fraction);
  rc.Set("criterion", pc.criterion.ToString());
  AddBowConfig(rc, pc.train);

  for (const PoisonPoint& p : report.curve) {
    std::cout << "fraction " << FormatDouble(p.fraction) << "  accuracy "
              << FormatDouble(p.accuracy) << "  baseline "
              << FormatDouble(p.baseline) << "  poisoned " << p.poisoned
              << "/" << p.attempted << '\n';
  }
  if (!o.model.empty() && o.verify > 0) {
    const ModelParams model = LoadParams(o.model);
    const AttackConfig attack = o.attack.Resolve();
    const std::vector<PoisonedText> picked =
        SamplePoisoned(report.samples, o.verify, o.common.seed);
    const RoundTripReport rt = VerifyPoisonImages(model, picked, attack);
    std::ostringstream csv, jsonl;
    WriteEvasionCsv(csv, rt.rows);
    WriteEvasionJsonl(jsonl, rt.rows);
    WriteText(dir, "roundtrip.csv", csv.str());
    WriteText(dir, "roundtrip.jsonl", jsonl.str());
    std::ostringstream summary;
    summary << "attempted,verified,rate\n"
            << rt.attempted << ',' << rt.verified << ','
            << FormatDouble(rt.rate()) << '\n';
    WriteText(dir, "roundtrip_summary.csv", summary.str());
    rc.Set("model", o.model);
    rc.Set("verify", o.verify);
    rc.Set("preset", o.attack.preset);
    AddAttackConfig(rc, attack);
    std::cout << "image round trip " << rt.verified << "/" << rt.attempted
              << " (" << FormatDouble(rt.rate()) << ")\n";
  }
  rc.Write(JoinPath(dir, "config.txt"));
  return kExitOk;
}

void AddPoison(CLI::App& root, std::vector<Command>& out) {
  auto o = std::make_shared<PoisonCmdOptions>();
  o->corpus = DataPath("sentiment.tsv");
  CLI::App* app = root.add_subcommand(
      "poison", "Accuracy versus fraction of poisoned training texts");
  AddCommon(app, o->common);
  app->add_option("--corpus", o->corpus, "label<TAB>text corpus")
      ->capture_default_str();
  app->add_option("--fractions", o->fractions, "Poison fractions")
      ->delimiter(',')
      ->capture_default_str();
  app->add_option("--tau", o->tau, "Edit-distance bound; 0 = adaptive")
      ->capture_default_str();
  app->add_option("--test-fraction", o->test_fraction)->capture_default_str();
  app->add_option("--model", o->model,
                  "Recognizer for the image round-trip check");
  app->add_option("--verify", o->verify,
                  "Poisoned texts to re-render, attack and read back")
      ->capture_default_str();
  AddCriterionFlags(app, o->criterion);
  AddAttackFlags(app, o->attack, "poisoning");
  out.push_back({app, [o] { return RunPoisonCmd(*o); }});
}

}  // namespace

void RegisterNlpCommands(CLI::App& root, std::vector<Command>& out) {
  AddTarget(root, out);
  AddEvasion(root, out);
  AddPoison(root, out);
}

}  // namespace advocr::cli
