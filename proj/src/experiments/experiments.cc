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

#include "advocr/experiments.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>

#include "advocr/error.h"
#include "advocr/render.h"

#ifndef ADVOCR_DATA_DIR_DEFAULT
#define ADVOCR_DATA_DIR_DEFAULT "data"
#endif
#ifndef ADVOCR_VERSION_STRING
#define ADVOCR_VERSION_STRING "0.1.0"
#endif

namespace advocr {

std::string VersionString() { return ADVOCR_VERSION_STRING; }

std::string DefaultDataDir() {
  if (const char* env = std::getenv("ADVOCR_DATA_DIR"); env && *env) {
    return env;
  }
  return ADVOCR_DATA_DIR_DEFAULT;
}

std::string DataPath(const std::string& name) {
  return DefaultDataDir() + "/" + name;
}

std::vector<std::string> LoadWordList(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open word list " + path);
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    words.push_back(line);
  }
  if (words.empty()) throw InvalidArgument("word list " + path + " is empty");
  return words;
}

WordSplit SplitWords(std::vector<std::string> words, std::size_t held_out,
                     std::uint64_t seed) {
  if (held_out >= words.size()) {
    throw InvalidArgument("held-out count must be below the word count");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(words.begin(), words.end(), rng);
  WordSplit split;
  const std::size_t cut = words.size() - held_out;
  split.train.assign(words.begin(), words.begin() + cut);
  split.held_out.assign(words.begin() + cut, words.end());
  return split;
}

std::vector<TrainSample> BuildDeskDataset(std::span<const std::string> words,
                                          const ModelConfig& config,
                                          const DeskDataConfig& data) {
  if (words.empty()) throw InvalidArgument("no training words");
  std::vector<TrainSample> out;
  auto add = [&](const std::string& text) {
    out.push_back({NormalizeLine(RenderLine(text), config.input_height),
                   config.alphabet.Encode(text)});
  };
  for (const std::string& w : words) add(w);

  std::mt19937_64 rng(data.seed);
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  const std::size_t max_words = std::max<std::size_t>(2, data.max_phrase_words);
  std::uniform_int_distribution<std::size_t> phrase_len(2, max_words);
  for (std::size_t i = 0; i < data.phrases; ++i) {
    const std::size_t n = phrase_len(rng);
    std::string line;
    for (std::size_t j = 0; j < n; ++j) {
      if (j) line += ' ';
      line += words[pick(rng)];
    }
    add(line);
  }

  std::string letters;
  for (char c : config.alphabet.symbols()) {
    if (c != ' ') letters += c;
  }
  std::uniform_int_distribution<std::size_t> letter(0, letters.size() - 1);
  std::uniform_int_distribution<std::size_t> length(
      1, std::max<std::size_t>(1, data.max_random_length));
  for (std::size_t i = 0; i < data.random_strings; ++i) {
    std::string s(length(rng), ' ');
    for (char& c : s) c = letters[letter(rng)];
    add(s);
  }
  return out;
}

TrainConfig DeskTrainConfig() {
  TrainConfig cfg;
  cfg.learning_rate = 3e-3;
  cfg.batch_size = 8;
  cfg.epochs = 40;
  cfg.seed = 1;
  cfg.noise_augment_std = 0.05;
  cfg.width_jitter = 0.3;
  cfg.degrade_prob = 0.5;
  cfg.outlier_rate = 0.25;
  return cfg;
}

HeldOutReport EvaluateHeldOut(const ModelParams& params,
                              std::span<const std::string> words,
                              double noise_std, std::size_t repeats,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  HeldOutReport report;
  for (const std::string& w : words) {
    const Image clean =
        NormalizeLine(RenderLine(w), params.config().input_height);
    for (std::size_t r = 0; r < repeats; ++r) {
      Image img = clean;
      for (double& v : img.pixels()) {
        v = std::clamp(v + noise_std * noise(rng), -1.0, 1.0);
      }
      const Prediction p = Recognize(params, img);
      ++report.total;
      report.correct += p.text == w;
      report.rejected += p.rejected;
    }
  }
  return report;
}

DeskTrainRun TrainDeskModel(const std::vector<std::string>& words,
                            const ModelConfig& config,
                            const TrainConfig& train,
                            const DeskDataConfig& data,
                            std::size_t held_out_count, std::uint64_t seed) {
  WordSplit split = SplitWords(words, held_out_count, seed);
  const std::vector<TrainSample> dataset =
      BuildDeskDataset(split.train, config, data);
  TrainResult trained =
      Train(ModelParams::Initialize(config, seed), dataset, train);
  const HeldOutReport held = EvaluateHeldOut(
      trained.params, split.held_out, train.noise_augment_std, 3, seed + 7);
  return DeskTrainRun{.params = std::move(trained.params),
                      .loss_history = std::move(trained.loss_history),
                      .split = std::move(split),
                      .held_out = held};
}

std::vector<WordPair> LexiconPairs(const WordPairLexicon& lexicon) {
  std::vector<WordPair> out;
  for (const LexiconEntry& e : lexicon.pairs) out.push_back({e.word, e.antonym});
  return out;
}

bool RejectionStudy::non_decreasing() const {
  for (std::size_t i = 1; i < bins.size(); ++i) {
    if (bins[i].rate() < bins[i - 1].rate()) return false;
  }
  return true;
}

RejectionStudy StudyRejection(const ModelParams& model,
                              std::span<const SuiteRow> rows,
                              const RejectionStudyConfig& config) {
  RejectionStudy study;
  for (const SuiteRow& r : rows) {
    if (r.error.empty()) study.samples.push_back({r.l2, r.rejected});
  }
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const std::size_t h = model.config().input_height;
  for (const SuiteRow& r : rows) {
    const Image clean = NormalizeLine(RenderLine(r.clean_text), h);
    for (double sigma : config.noise_std) {
      Image img = clean;
      for (double& v : img.pixels()) {
        v = std::clamp(v + sigma * noise(rng), -1.0, 1.0);
      }
      study.samples.push_back(
          {L2Distance(clean, img), Recognize(model, img).rejected});
    }
  }
  study.bins = BinByL2(study.samples, config.bins);
  return study;
}

std::vector<LabeledText> SelectCorrect(const BowClassifier& clf,
                                       std::span<const LabeledText> corpus,
                                       std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<LabeledText> out;
  for (std::size_t i : order) {
    if (out.size() >= count) break;
    if (clf.Predict(corpus[i].text) == corpus[i].label) {
      out.push_back(corpus[i]);
    }
  }
  return out;
}

namespace {

// Attacks the rendered `clean_text` toward `target_text` and fills the OCR
// columns of `row`.
void AttackText(const ModelParams& model, const std::string& clean_text,
                const std::string& target_text, const AttackConfig& attack,
                EvasionRow& row) {
  const ModelConfig& mc = model.config();
  const Image clean = NormalizeLine(RenderLine(clean_text), mc.input_height);
  const AttackResult r =
      AttackLine(model, clean, mc.alphabet.Encode(target_text), attack);
  const Prediction p = Recognize(model, r.adversarial, attack.recognize);
  row.ocr_text = p.text;
  row.rejected = p.rejected;
  row.ocr_success = p.text == target_text && !p.rejected;
  row.l2 = r.l2;
  row.iterations = r.iterations_used;
  row.adversarial = r.adversarial;
}

}  // namespace

EvasionReport RunEvasion(const ModelParams& model, const BowClassifier& clf,
                         std::span<const LabeledText> texts,
                         const EvasionOptions& options) {
  EvasionReport report;
  std::size_t baseline_ok = 0, text_ok = 0, with_target = 0, ocr_ok = 0,
              adv_ok = 0;
  double replaced_sum = 0.0;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const LabeledText& t = texts[i];
    EvasionRow row;
    row.id = i;
    row.label = t.label;
    row.text = t.text;
    baseline_ok += clf.Predict(t.text) == t.label;
    std::string final_text = t.text;
    try {
      const TargetTextResult gen =
          GenerateTargetText(clf, t.text, t.label, 2, options.criterion);
      replaced_sum += gen.replaced_fraction();
      row.replacements = gen.applied;
      row.text_attack_success = gen.success;
      if (gen.success) {
        ++text_ok;
        row.target_text = gen.text;
        final_text = gen.text;
        if (!options.text_only && gen.applied > 0) {
          ++with_target;
          AttackText(model, t.text, gen.text, options.attack, row);
          ocr_ok += row.ocr_success;
          final_text = row.ocr_text;
        }
      }
    } catch (const Error& err) {
      row.error = err.what();
    }
    row.predicted = clf.Predict(final_text);
    adv_ok += row.predicted == t.label;
    report.rows.push_back(std::move(row));
  }
  const double n = texts.empty() ? 1.0 : static_cast<double>(texts.size());
  EvasionSummary& s = report.summary;
  s.texts = texts.size();
  s.baseline_accuracy = baseline_ok / n;
  s.text_success_rate = text_ok / n;
  s.ocr_target_accuracy =
      with_target == 0 ? 0.0 : ocr_ok / static_cast<double>(with_target);
  s.adversarial_accuracy = adv_ok / n;
  s.mean_replaced_fraction = replaced_sum / n;
  return report;
}

std::vector<PoisonedText> SamplePoisoned(std::span<const PoisonedText> samples,
                                         std::size_t count,
                                         std::uint64_t seed) {
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(std::min(count, order.size()));
  std::sort(order.begin(), order.end());
  std::vector<PoisonedText> out;
  for (std::size_t i : order) out.push_back(samples[i]);
  return out;
}

RoundTripReport VerifyPoisonImages(const ModelParams& model,
                                   std::span<const PoisonedText> poisoned,
                                   const AttackConfig& attack) {
  RoundTripReport report;
  for (std::size_t i = 0; i < poisoned.size(); ++i) {
    EvasionRow row;
    row.id = i;
    row.label = poisoned[i].label;
    row.text = poisoned[i].original;
    row.target_text = poisoned[i].poisoned;
    try {
      AttackText(model, poisoned[i].original, poisoned[i].poisoned, attack,
                 row);
    } catch (const Error& err) {
      row.error = err.what();
    }
    ++report.attempted;
    report.verified += row.ocr_success;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace advocr
