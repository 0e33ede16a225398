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

// Reusable experiment drivers shared by the command-line tool and the
// acceptance suite: the desk-scale training recipe, the word-pair suite,
// and the image+classifier evasion and poisoning pipelines.

#ifndef ADVOCR_EXPERIMENTS_H_
#define ADVOCR_EXPERIMENTS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "advocr/attack.h"
#include "advocr/recognizer.h"
#include "advocr/textattack.h"

namespace advocr {

// Directory holding the bundled data files.
std::string DefaultDataDir();
std::string DataPath(const std::string& name);
// Release plus git-describe suffix, embedded in every report.
std::string VersionString();

// One lowercase word per line; blank lines and '#' comments are skipped.
std::vector<std::string> LoadWordList(const std::string& path);

struct WordSplit {
  std::vector<std::string> train;
  std::vector<std::string> held_out;
};
// Seeded shuffle, then the last `held_out` words are held out.
WordSplit SplitWords(std::vector<std::string> words, std::size_t held_out,
                     std::uint64_t seed);

struct DeskDataConfig {
  // Lines of 2..max_phrase_words training words joined by spaces.
  std::size_t phrases = 300;
  std::size_t max_phrase_words = 4;
  // Random letter strings of length 1..max_random_length.
  std::size_t random_strings = 1500;
  std::size_t max_random_length = 8;
  std::uint64_t seed = 11;
};

// Every training word once, then the phrases, then the random strings, all
// rendered with the embedded font at the model height.
std::vector<TrainSample> BuildDeskDataset(std::span<const std::string> words,
                                          const ModelConfig& config,
                                          const DeskDataConfig& data);

// The training recipe used for the bundled desk model.
TrainConfig DeskTrainConfig();

struct HeldOutReport {
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t rejected = 0;
  double accuracy() const {
    return total == 0 ? 0.0 : static_cast<double>(correct) / total;
  }
};

// Renders each word `repeats` times with fresh Gaussian noise of the given
// standard deviation and counts exact-sequence matches.
HeldOutReport EvaluateHeldOut(const ModelParams& params,
                              std::span<const std::string> words,
                              double noise_std, std::size_t repeats,
                              std::uint64_t seed);

struct DeskTrainRun {
  ModelParams params;
  std::vector<double> loss_history;
  WordSplit split;
  HeldOutReport held_out;
};

// Split, build the dataset, train from a seeded initialization, evaluate.
DeskTrainRun TrainDeskModel(const std::vector<std::string>& words,
                            const ModelConfig& config,
                            const TrainConfig& train,
                            const DeskDataConfig& data,
                            std::size_t held_out_count,
                            std::uint64_t seed);

// Antonym lexicon -> clean/target word pairs.
std::vector<WordPair> LexiconPairs(const WordPairLexicon& lexicon);

// --- Rejection versus perturbation -----------------------------------------

struct RejectionStudyConfig {
  // Gaussian noise levels applied to each clean render; wide enough that
  // the top levels destroy the glyphs.
  std::vector<double> noise_std = {0.1, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0};
  std::size_t bins = 5;
  std::uint64_t seed = 5;
};

struct RejectionStudy {
  std::vector<RejectionSample> samples;  // attack outputs, then noise images
  std::vector<RejectionBin> bins;
  bool non_decreasing() const;
};

// Pools the suite's attack outputs with noise-injected renders of the clean
// words and bins everything by L2 to the clean image.
RejectionStudy StudyRejection(const ModelParams& model,
                              std::span<const SuiteRow> rows,
                              const RejectionStudyConfig& config = {});

// --- Image + classifier pipelines -----------------------------------------

struct EvasionRow {
  std::size_t id = 0;
  std::string label;
  std::string text;
  std::string target_text;       // Algorithm output, empty when not found
  bool text_attack_success = false;
  std::size_t replacements = 0;
  std::string ocr_text;          // recognizer output on the adversarial image
  bool ocr_success = false;      // ocr_text == target_text, not rejected
  bool rejected = false;
  double l2 = 0.0;
  std::size_t iterations = 0;
  std::string predicted;         // classifier label on ocr_text
  std::string error;
  Image adversarial;             // empty unless the image stage ran
};

struct EvasionSummary {
  std::size_t texts = 0;
  double baseline_accuracy = 0.0;      // classifier on the clean texts
  double text_success_rate = 0.0;      // Algorithm success over texts
  double ocr_target_accuracy = 0.0;    // over texts with a target
  double adversarial_accuracy = 0.0;   // classifier on OCR output
  double mean_replaced_fraction = 0.0;
};

struct EvasionReport {
  std::vector<EvasionRow> rows;
  EvasionSummary summary;
};

struct EvasionOptions {
  FailureCriterion criterion = FailureCriterion::ScoreBelow(0.1);
  bool text_only = false;
  AttackConfig attack = AttackPreset("sentiment");
};

// For each text: Algorithm target -> render -> attack -> recognize ->
// classify. Texts are expected to be correctly classified already.
EvasionReport RunEvasion(const ModelParams& model, const BowClassifier& clf,
                         std::span<const LabeledText> texts,
                         const EvasionOptions& options);

// Picks up to `count` texts the classifier labels correctly, in a seeded
// order.
std::vector<LabeledText> SelectCorrect(const BowClassifier& clf,
                                       std::span<const LabeledText> corpus,
                                       std::size_t count, std::uint64_t seed);

struct RoundTripReport {
  std::size_t attempted = 0;
  std::size_t verified = 0;  // OCR output equals the poisoned text
  double rate() const {
    return attempted == 0 ? 0.0 : static_cast<double>(verified) / attempted;
  }
  std::vector<EvasionRow> rows;
};

// Seeded sample of up to `count` poisoned texts, kept in their original
// relative order.
std::vector<PoisonedText> SamplePoisoned(std::span<const PoisonedText> samples,
                                         std::size_t count, std::uint64_t seed);

// Renders each poisoned text's clean original, attacks it toward the
// poisoned text and checks what the recognizer reads back.
RoundTripReport VerifyPoisonImages(const ModelParams& model,
                                   std::span<const PoisonedText> poisoned,
                                   const AttackConfig& attack);

}  // namespace advocr

#endif  // ADVOCR_EXPERIMENTS_H_
