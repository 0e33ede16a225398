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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "advocr/attack.h"
#include "advocr/experiments.h"
#include "advocr/recognizer.h"
#include "advocr/render.h"
#include "advocr/reports.h"
#include "advocr/textattack.h"
#include "cli_common.h"
#include "commands.h"

namespace advocr::cli {
namespace {

std::string Padded(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", i);
  return buf;
}

std::vector<std::string> ReadLines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

// |x - x'| mapped to ink: unchanged pixels white, the largest change black.
Image DiffImage(const Image& a, const Image& b) {
  Image out(a.height(), a.width());
  double peak = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    peak = std::max(peak, std::abs(a.pixels()[i] - b.pixels()[i]));
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = peak > 0.0 ? std::abs(a.pixels()[i] - b.pixels()[i]) / peak
                                : 0.0;
    out.pixels()[i] = 1.0 - 2.0 * d;
  }
  return out;
}

// --- train -----------------------------------------------------------------

struct TrainOptions {
  CommonOptions common;
  std::string words;
  std::string model_out;
  std::size_t held_out = 60;
  std::string alphabet;
  bool quiet = false;
  TrainConfig train = DeskTrainConfig();
  DeskDataConfig data;
};

int RunTrain(const TrainOptions& o) {
  const std::string dir = EnsureDir(o.common.out_dir);
  const std::vector<std::string> words = LoadWordList(o.words);
  ModelConfig mc;
  if (!o.alphabet.empty()) mc.alphabet = Alphabet(o.alphabet);
  mc.Validate();
  for (const std::string& w : words) mc.alphabet.Encode(w);

  TrainConfig tc = o.train;
  tc.seed = o.common.seed;
  if (!o.quiet) {
    tc.on_epoch = [](std::size_t epoch, double loss) {
      std::cout << "epoch " << epoch << " loss " << FormatDouble(loss)
                << std::endl;
    };
  }
  DeskTrainRun run =
      TrainDeskModel(words, mc, tc, o.data, o.held_out, o.common.seed);

  const std::string model_path =
      o.model_out.empty() ? JoinPath(dir, "model.bin") : o.model_out;
  SaveParams(model_path, run.params);

  std::ostringstream loss;
  WriteLossCsv(loss, run.loss_history);
  WriteText(dir, "loss.csv", loss.str());
  std::ostringstream metrics;
  metrics << "held_out_words,held_out_images,correct,rejected,accuracy\n"
          << run.split.held_out.size() << ',' << run.held_out.total << ','
          << run.held_out.correct << ',' << run.held_out.rejected << ','
          << FormatDouble(run.held_out.accuracy()) << '\n';
  WriteText(dir, "metrics.csv", metrics.str());
  std::string held;
  for (const std::string& w : run.split.held_out) held += w + "\n";
  WriteText(dir, "held_out_words.txt", held);

  ResolvedConfig cfg = BaseConfig("train", o.common);
  cfg.Set("words", o.words);
  cfg.Set("model_out", model_path);
  cfg.Set("held_out", o.held_out);
  AddModelConfig(cfg, mc);
  AddTrainConfig(cfg, tc);
  cfg.Set("data.phrases", o.data.phrases);
  cfg.Set("data.max_phrase_words", o.data.max_phrase_words);
  cfg.Set("data.random_strings", o.data.random_strings);
  cfg.Set("data.max_random_length", o.data.max_random_length);
  cfg.Set("data.seed", static_cast<std::size_t>(o.data.seed));
  cfg.Write(JoinPath(dir, "config.txt"));

  std::cout << "held-out accuracy " << FormatDouble(run.held_out.accuracy())
            << " (" << run.held_out.correct << "/" << run.held_out.total
            << ", rejected " << run.held_out.rejected << ")\n"
            << "model written to " << model_path << '\n';
  return kExitOk;
}

void AddTrain(CLI::App& root, std::vector<Command>& out) {
  auto o = std::make_shared<TrainOptions>();
  o->words = DataPath("words.txt");
  CLI::App* app = root.add_subcommand(
      "train", "Train the line recognizer on rendered words");
  AddCommon(app, o->common);
  app->add_option("--words", o->words, "Word list, one word per line")
      ->capture_default_str();
  app->add_option("--model-out", o->model_out,
                  "Weight file (default: <out>/model.bin)");
  app->add_option("--held-out", o->held_out, "Words held out for evaluation")
      ->capture_default_str();
  app->add_option("--alphabet", o->alphabet,
                  "Recognizer symbols (default: a-z and space)");
  app->add_option("--epochs", o->train.epochs)->capture_default_str();
  app->add_option("--lr", o->train.learning_rate)->capture_default_str();
  app->add_option("--batch", o->train.batch_size)->capture_default_str();
  app->add_option("--noise", o->train.noise_augment_std,
                  "Gaussian augmentation std")
      ->capture_default_str();
  app->add_option("--width-jitter", o->train.width_jitter)
      ->capture_default_str();
  app->add_option("--degrade-prob", o->train.degrade_prob)
      ->capture_default_str();
  app->add_option("--outlier-rate", o->train.outlier_rate)
      ->capture_default_str();
  app->add_option("--phrases", o->data.phrases)->capture_default_str();
  app->add_option("--random-strings", o->data.random_strings)
      ->capture_default_str();
  app->add_flag("-q,--quiet", o->quiet, "No per-epoch progress");
  out.push_back({app, [o] { return RunTrain(*o); }});
}

// --- recognize -------------------------------------------------------------

struct RecognizeCmdOptions {
  CommonOptions common;
  std::string model;
  std::vector<std::string> images;
  std::vector<std::string> texts;
  RecognizeOptions recognize;
};

int RunRecognize(const RecognizeCmdOptions& o) {
  if (o.images.empty() && o.texts.empty()) {
    throw InvalidArgument("give PGM images or --text lines to recognize");
  }
  const ModelParams model = LoadParams(o.model);
  const std::string dir = EnsureDir(o.common.out_dir);
  std::ostringstream csv;
  csv << "source,text,confidence,rejected,score\n";
  auto emit = [&](const std::string& source, const Image& img) {
    const Prediction p = Recognize(model, img, o.recognize);
    csv << CsvField(source) << ',' << CsvField(p.text) << ','
        << FormatDouble(p.per_step_confidence) << ','
        << (p.rejected ? "true" : "false") << ',' << FormatDouble(p.score)
        << '\n';
    std::cout << source << '\t' << (p.rejected ? "<rejected>" : p.text) << '\t'
              << FormatDouble(p.per_step_confidence) << '\n';
  };
  for (const std::string& path : o.images) emit(path, ReadPgm(path));
  for (const std::string& text : o.texts) emit(text, RenderLine(text));
  WriteText(dir, "recognize.csv", csv.str());
  ResolvedConfig cfg = BaseConfig("recognize", o.common);
  cfg.Set("model", o.model);
  cfg.Set("beam_width", o.recognize.beam_width);
  cfg.Set("rejection_threshold", o.recognize.rejection_threshold);
  cfg.Write(JoinPath(dir, "config.txt"));
  return kExitOk;
}

void AddRecognize(CLI::App& root, std::vector<Command>& out) {
  auto o = std::make_shared<RecognizeCmdOptions>();
  CLI::App* app =
      root.add_subcommand("recognize", "Recognize PGM line images or text");
  AddCommon(app, o->common);
  app->add_option("--model", o->model, "Weight file")->required();
  app->add_option("images", o->images, "PGM line images");
  app->add_option("--text", o->texts, "Render and recognize this text");
  app->add_option("--beam", o->recognize.beam_width)->capture_default_str();
  app->add_option("--reject-threshold", o->recognize.rejection_threshold)
      ->capture_default_str();
  out.push_back({app, [o] { return RunRecognize(*o); }});
}

// --- attack ----------------------------------------------------------------

struct AttackCmdOptions {
  CommonOptions common;
  std::string model;
  std::string text;
  std::string image;
  std::string target;
  AttackFlags attack;
};

int RunAttack(const AttackCmdOptions& o) {
  if (o.text.empty() == o.image.empty()) {
    throw InvalidArgument("give exactly one of --text or --image");
  }
  const ModelParams model = LoadParams(o.model);
  const ModelConfig& mc = model.config();
  const AttackConfig cfg = o.attack.Resolve();
  const Image clean = NormalizeLine(
      o.text.empty() ? ReadPgm(o.image) : RenderLine(o.text), mc.input_height);
  const Transcript target = mc.alphabet.Encode(o.target);
  const std::string dir = EnsureDir(o.common.out_dir);

  const AttackResult r = cfg.eot_scales.empty()
                             ? AttackLine(model, clean, target, cfg)
                             : AttackLineEot(model, clean, target, cfg);
  WritePgm(JoinPath(dir, "clean.pgm"), clean);
  WritePgm(JoinPath(dir, "adversarial.pgm"), r.adversarial);
  WritePgm(JoinPath(dir, "diff.pgm"), DiffImage(clean, r.adversarial));

  SuiteRow row;
  row.clean_text = o.text.empty() ? o.image : o.text;
  row.target_text = o.target;
  row.decoded = r.decoded_text;
  row.success = r.success;
  row.rejected = r.rejected;
  row.l2 = r.l2;
  row.iterations = r.iterations_used;
  std::ostringstream csv, jsonl, trace;
  WriteSuiteCsv(csv, std::span<const SuiteRow>(&row, 1));
  WriteSuiteJsonl(jsonl, std::span<const SuiteRow>(&row, 1));
  WriteText(dir, "report.csv", csv.str());
  WriteText(dir, "report.jsonl", jsonl.str());
  WriteLossCsv(trace, r.objective_trace);
  WriteText(dir, "objective.csv", trace.str());

  ResolvedConfig rc = BaseConfig("attack", o.common);
  rc.Set("model", o.model);
  rc.Set("input", row.clean_text);
  rc.Set("target", o.target);
  rc.Set("preset", o.attack.preset);
  AddAttackConfig(rc, cfg);
  rc.Write(JoinPath(dir, "config.txt"));

  std::cout << (r.success ? "success" : "failure") << ": decoded \""
            << r.decoded_text << "\"" << (r.rejected ? " (rejected)" : "")
            << ", l2 " << FormatDouble(r.l2) << ", " << r.iterations_used
            << " iterations\n";
  return r.success ? kExitOk : kExitExperimentFailure;
}

void AddAttack(CLI::App& root, std::vector<Command>& out) {
  auto o = std::make_shared<AttackCmdOptions>();
  CLI::App* app =
      root.add_subcommand("attack", "Targeted attack on one line image");
  AddCommon(app, o->common);
  app->add_option("--model", o->model, "Weight file")->required();
  app->add_option("--text", o->text, "Render this clean text");
  app->add_option("--image", o->image, "Clean PGM line image");
  app->add_option("--target", o->target, "Text the image should decode to")
      ->required();
  AddAttackFlags(app, o->attack, "word-pairs");
  out.push_back({app, [o] { return RunAttack(*o); }});
}

// --- attack-words ----------------------------------------------------------

struct AttackWordsOptions {
  CommonOptions common;
  std::string model;
  std::string pairs;
  bool no_images = false;
  bool rejection_study = false;
  AttackFlags attack;
};

int RunAttackWords(const AttackWordsOptions& o) {
  const WordPairLexicon lexicon = WordPairLexicon::Load(o.pairs);
  if (lexicon.pairs.empty()) throw InvalidArgument("pairs file is empty");
  const ModelParams model = LoadParams(o.model);
  const AttackConfig cfg = o.attack.Resolve();
  const std::string dir = EnsureDir(o.common.out_dir);

  const SuiteReport report = EvaluateSuite(model, LexiconPairs(lexicon), cfg);
  std::ostringstream csv, jsonl, summary;
  WriteSuiteCsv(csv, report.rows);
  WriteSuiteJsonl(jsonl, report.rows);
  WriteSuiteSummaryCsv(summary, report.metrics);
  WriteText(dir, "report.csv", csv.str());
  WriteText(dir, "report.jsonl", jsonl.str());
  WriteText(dir, "summary.csv", summary.str());
  if (!o.no_images) {
    const std::string img_dir = EnsureDir(JoinPath(dir, "images"));
    for (const SuiteRow& r : report.rows) {
      if (!r.error.empty()) continue;
      const std::string stem = Padded(r.id) + "_" + r.clean_text + "_" +
                               r.target_text;
      WritePgm(JoinPath(img_dir, stem + "_clean.pgm"),
               NormalizeLine(RenderLine(r.clean_text),
                             model.config().input_height));
      WritePgm(JoinPath(img_dir, stem + "_adv.pgm"), r.adversarial);
    }
  }
  if (o.rejection_study) {
    const RejectionStudy study = StudyRejection(model, report.rows);
    std::ostringstream rej;
    WriteRejectionCsv(rej, study.bins);
    WriteText(dir, "rejection.csv", rej.str());
  }

  ResolvedConfig rc = BaseConfig("attack-words", o.common);
  rc.Set("model", o.model);
  rc.Set("pairs", o.pairs);
  rc.Set("preset", o.attack.preset);
  AddAttackConfig(rc, cfg);
  rc.Write(JoinPath(dir, "config.txt"));

  const SuiteMetrics& m = report.metrics;
  std::cout << "pairs " << m.count << "  clean " << FormatDouble(m.clean_acc)
            << "  target " << FormatDouble(m.target_acc) << "  rejected "
            << FormatDouble(m.rejected_rate) << "  avg_l2 "
            << FormatDouble(m.avg_l2) << '\n';
  if (m.target_acc == 0.0) {
    throw ExperimentFailure("no pair reached its target");
  }
  return kExitOk;
}

void AddAttackWords(CLI::App& root, std::vector<Command>& out) {
  auto o = std::make_shared<AttackWordsOptions>();
  o->pairs = DataPath("antonyms.tsv");
  CLI::App* app = root.add_subcommand(
      "attack-words", "Attack every word/antonym pair of a lexicon");
  AddCommon(app, o->common);
  app->add_option("--model", o->model, "Weight file")->required();
  app->add_option("--pairs", o->pairs, "word<TAB>antonym<TAB>pos file")
      ->capture_default_str();
  app->add_flag("--no-images", o->no_images, "Skip writing PGM images");
  app->add_flag("--rejection-study", o->rejection_study,
                "Also bin outputs and noise images by L2 (rejection.csv)");
  AddAttackFlags(app, o->attack, "word-pairs");
  out.push_back({app, [o] { return RunAttackWords(*o); }});
}

// --- attack-doc ------------------------------------------------------------

struct AttackDocOptions {
  CommonOptions common;
  std::string model;
  std::string doc;
  std::string edits;
  AttackFlags attack;
};

// line_index <TAB> target text; '#' lines and blank lines are skipped.
std::vector<std::pair<std::size_t, std::string>> ReadEdits(
    const std::string& path) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::size_t n = 0;
  for (const std::string& line : ReadLines(path)) {
    ++n;
    if (line.empty() || line[0] == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw FormatError("edits line " + std::to_string(n) +
                        ": expected line_index<TAB>target");
    }
    std::size_t index = 0;
    try {
      std::size_t used = 0;
      index = std::stoul(line.substr(0, tab), &used);
      if (used != tab) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw FormatError("edits line " + std::to_string(n) +
                        ": bad line index \"" + line.substr(0, tab) + "\"");
    }
    out.emplace_back(index, line.substr(tab + 1));
  }
  return out;
}

int RunAttackDoc(const AttackDocOptions& o) {
  const ModelParams model = LoadParams(o.model);
  const ModelConfig& mc = model.config();
  const AttackConfig cfg = o.attack.Resolve();
  const std::vector<std::string> lines = ReadLines(o.doc);
  const auto edits_in =
      o.edits.empty() ? std::vector<std::pair<std::size_t, std::string>>{}
                      : ReadEdits(o.edits);
  const RenderedDocument doc = RenderDocument(lines);
  if (doc.boxes.empty()) throw InvalidArgument("document has no lines");
  for (const LineBox& b : doc.boxes) {
    if (b.height() != mc.input_height) {
      throw InvalidArgument("rendered line height " +
                            std::to_string(b.height()) +
                            " differs from the model input height");
    }
  }
  std::vector<LineEdit> edits;
  for (const auto& [index, text] : edits_in) {
    edits.push_back({index, mc.alphabet.Encode(text)});
  }
  const DocumentAttackResult result =
      AttackDocument(model, doc.image, doc.boxes, edits, cfg);
  const std::string dir = EnsureDir(o.common.out_dir);
  WritePgm(JoinPath(dir, "clean.pgm"), doc.image);
  WritePgm(JoinPath(dir, "adversarial.pgm"), result.image);
  WritePgm(JoinPath(dir, "diff.pgm"), DiffImage(doc.image, result.image));

  auto read_line = [&](const Image& img, std::size_t i) -> std::string {
    try {
      const Prediction p =
          Recognize(model, Crop(img, doc.boxes[i]), cfg.recognize);
      return p.rejected ? "<rejected>" : p.text;
    } catch (const Error& e) {
      return std::string("error: ") + e.what();
    }
  };
  std::ostringstream csv;
  csv << "line,text,before,after,target,success,l2,error\n";
  std::size_t successes = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string target, success, l2, error;
    for (std::size_t k = 0; k < edits_in.size(); ++k) {
      if (edits_in[k].first != i) continue;
      const LineAttackOutcome& lo = result.lines[k];
      target = edits_in[k].second;
      if (lo.result) {
        success = lo.result->success ? "true" : "false";
        l2 = FormatDouble(lo.result->l2);
        successes += lo.result->success;
      } else {
        success = "false";
      }
      error = lo.error;
    }
    const std::string before = read_line(doc.image, i);
    const std::string after = read_line(result.image, i);
    csv << i << ',' << CsvField(lines[i]) << ',' << CsvField(before) << ','
        << CsvField(after) << ',' << CsvField(target) << ',' << success << ','
        << l2 << ',' << CsvField(error) << '\n';
    if (!target.empty()) {
      std::cout << "line " << i << ": \"" << before << "\" -> \"" << after
                << "\" (target \"" << target << "\")"
                << (error.empty() ? "" : " error: " + error) << '\n';
    }
  }
  WriteText(dir, "lines.csv", csv.str());

  ResolvedConfig rc = BaseConfig("attack-doc", o.common);
  rc.Set("model", o.model);
  rc.Set("doc", o.doc);
  rc.Set("edits", o.edits);
  rc.Set("preset", o.attack.preset);
  AddAttackConfig(rc, cfg);
  rc.Write(JoinPath(dir, "config.txt"));

  if (!edits.empty() && successes == 0) {
    throw ExperimentFailure("no edited line reached its target");
  }
  return kExitOk;
}

void AddAttackDoc(CLI::App& root, std::vector<Command>& out) {
  auto o = std::make_shared<AttackDocOptions>();
  CLI::App* app = root.add_subcommand(
      "attack-doc", "Render a text document and attack selected lines");
  AddCommon(app, o->common);
  app->add_option("--model", o->model, "Weight file")->required();
  app->add_option("--doc", o->doc, "Text file, one document line per line")
      ->required();
  app->add_option("--edits", o->edits,
                  "line_index<TAB>target text (0-based line index)");
  AddAttackFlags(app, o->attack, "word-pairs");
  out.push_back({app, [o] { return RunAttackDoc(*o); }});
}

// --- export-font -----------------------------------------------------------

struct ExportFontOptions {
  CommonOptions common;
  bool to_stdout = false;
};

void AddExportFont(CLI::App& root, std::vector<Command>& out) {
  auto o = std::make_shared<ExportFontOptions>();
  CLI::App* app = root.add_subcommand(
      "export-font", "Write the embedded bitmap font as a hex table");
  AddCommon(app, o->common);
  app->add_flag("--stdout", o->to_stdout, "Print instead of writing font.hex");
  out.push_back({app, [o] {
                   const std::string table = EmbeddedFont().HexTable();
                   if (o->to_stdout) {
                     std::cout << table;
                   } else {
                     const std::string dir = EnsureDir(o->common.out_dir);
                     WriteText(dir, "font.hex", table);
                     std::cout << "wrote " << JoinPath(dir, "font.hex") << '\n';
                   }
                   return kExitOk;
                 }});
}

}  // namespace

void RegisterOcrCommands(CLI::App& root, std::vector<Command>& out) {
  AddTrain(root, out);
  AddRecognize(root, out);
  AddAttack(root, out);
  AddAttackWords(root, out);
  AddAttackDoc(root, out);
  AddExportFont(root, out);
}

}  // namespace advocr::cli
