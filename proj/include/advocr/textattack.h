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

#ifndef ADVOCR_TEXTATTACK_H_
#define ADVOCR_TEXTATTACK_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace advocr {

// --- Tokens ----------------------------------------------------------------

struct Token {
  enum class Kind { kWord, kPunct, kSpace };
  Kind kind = Kind::kWord;
  std::string text;
  bool operator==(const Token&) const = default;
};

// Whitespace runs are kept as tokens; leading/trailing punctuation of each
// whitespace-separated chunk is split into its own tokens. Detokenize of the
// result reproduces the input exactly.
std::vector<Token> Tokenize(std::string_view text);
std::string Detokenize(std::span<const Token> tokens);

// Lowercased word tokens, in order.
std::vector<std::string> WordFeatures(std::string_view text);

// --- Edit distance ---------------------------------------------------------

// Levenshtein distance with unit costs, ignoring ASCII case.
std::size_t EditDistance(std::string_view a, std::string_view b);

// 2 for words of at most 5 characters, 3 up to 9, 4 beyond. Throws
// InvalidArgument for an empty word.
std::size_t AdaptiveThreshold(std::string_view word);

// Vocabulary words within `tau` edits of `word`, excluding the word itself,
// sorted.
std::vector<std::string> CandidateSet(std::string_view word,
                                      std::span<const std::string> vocabulary,
                                      std::size_t tau);

// --- Data files ------------------------------------------------------------

struct LexiconEntry {
  std::string word;
  std::string antonym;
  std::string pos;
  bool operator==(const LexiconEntry&) const = default;
};

// word <TAB> antonym <TAB> part-of-speech, one pair per line.
struct WordPairLexicon {
  std::vector<LexiconEntry> pairs;

  // Throws FormatError naming the line for malformed rows and for pairs
  // farther apart than AdaptiveThreshold(word).
  static WordPairLexicon Parse(std::istream& in);
  static WordPairLexicon Load(const std::string& path);
};

struct LabeledText {
  std::string label;
  std::string text;
  bool operator==(const LabeledText&) const = default;
};

// label <TAB> text, one example per line; blank lines are skipped.
std::vector<LabeledText> ParseCorpus(std::istream& in);
std::vector<LabeledText> LoadCorpus(const std::string& path);

struct CorpusSplit {
  std::vector<LabeledText> train;
  std::vector<LabeledText> test;
};
// Seeded shuffle; the first round(test_fraction * n) examples become test.
CorpusSplit SplitCorpus(std::span<const LabeledText> corpus,
                        double test_fraction, std::uint64_t seed);

// --- Bag-of-words classifier -----------------------------------------------

// Logistic regression on word counts. Two classes use one weight vector
// (scoring classes()[1]); more classes use one-vs-all.
class BowClassifier {
 public:
  BowClassifier(std::vector<std::string> classes,
                std::vector<std::string> vocabulary,
                std::vector<std::vector<double>> weights,
                std::vector<double> biases);

  const std::vector<std::string>& classes() const { return classes_; }
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  bool binary() const { return classes_.size() == 2; }
  std::size_t ClassIndex(std::string_view label) const;  // throws if unknown
  const std::vector<std::vector<double>>& weights() const { return weights_; }
  const std::vector<double>& biases() const { return biases_; }

  // Per-class scores: the two class probabilities for a binary model, the
  // k one-vs-all sigmoid outputs otherwise.
  std::vector<double> Scores(std::span<const std::string> words) const;
  std::vector<double> Scores(std::string_view text) const;
  std::string Predict(std::string_view text) const;

 private:
  std::vector<std::string> classes_;
  std::vector<std::string> vocabulary_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<std::vector<double>> weights_;
  std::vector<double> biases_;
};

struct BowTrainConfig {
  double learning_rate = 1.0;
  std::size_t epochs = 3000;
  double l2 = 1e-5;
  // Fraction held out for the reported accuracy; 0 trains on everything.
  double holdout_fraction = 0.0;
  std::uint64_t seed = 1;
};

struct BowTrainResult {
  BowClassifier classifier;
  double train_accuracy = 0.0;
  std::optional<double> held_out_accuracy;
};

// Full-batch gradient descent on the L2-regularized logistic loss. Throws
// InvalidArgument when fewer than two classes are present.
BowTrainResult TrainBow(std::span<const LabeledText> corpus,
                        const BowTrainConfig& config = {});

double Accuracy(const BowClassifier& clf, std::span<const LabeledText> data);

// --- Target-text generation ------------------------------------------------

struct FailureCriterion {
  enum class Mode { kScoreBelow, kMisclassified, kTargetClass };
  Mode mode = Mode::kScoreBelow;
  double threshold = 0.1;     // kScoreBelow: score of the true class
  std::string target_class;   // kTargetClass
  double margin = 0.0;        // kTargetClass: lead over every other class

  static FailureCriterion ScoreBelow(double threshold);
  static FailureCriterion Misclassified();
  static FailureCriterion TargetClass(std::string cls, double margin = 0.0);
  void Validate() const;
  std::string ToString() const;
  bool Met(const BowClassifier& clf, std::span<const std::string> words,
           std::string_view label) const;
};

struct Replacement {
  std::string word;
  std::string replacement;
  // Change of the tracked score; always negative (see GenerateTargetText).
  double delta = 0.0;
  bool operator==(const Replacement&) const = default;
};

struct TargetTextResult {
  bool success = false;
  std::string text;                // t*, or the last attempt on failure
  std::vector<Replacement> plan;   // sorted by |delta| descending
  std::size_t applied = 0;         // plan prefix that was used
  std::size_t replaced_tokens = 0;
  std::size_t word_tokens = 0;
  double replaced_fraction() const {
    return word_tokens == 0 ? 0.0
                            : static_cast<double>(replaced_tokens) / word_tokens;
  }
};

// Greedy word substitution against a bag-of-words model. Every occurrence of
// a chosen word is replaced. The tracked score is the true class's score, or
// for a target-class criterion the negated target-class score, so a
// replacement is kept only when it lowers it. `tau` of nullopt selects
// AdaptiveThreshold per word. Throws InvalidArgument for a text without
// words.
TargetTextResult GenerateTargetText(const BowClassifier& clf,
                                    std::string_view text,
                                    std::string_view label,
                                    std::optional<std::size_t> tau,
                                    const FailureCriterion& criterion);

// --- Poisoning -------------------------------------------------------------

struct PoisonedText {
  std::string label;
  std::string original;
  std::string poisoned;
};

struct PoisonPoint {
  double fraction = 0.0;
  double accuracy = 0.0;
  double baseline = 0.0;
  std::size_t poisoned = 0;   // substituted training texts
  std::size_t attempted = 0;  // selected for poisoning
};

struct PoisonReport {
  std::vector<PoisonPoint> curve;
  // Every successful substitution at the largest fraction.
  std::vector<PoisonedText> samples;
};

struct PoisonConfig {
  std::vector<double> fractions = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  FailureCriterion criterion = FailureCriterion::ScoreBelow(0.1);
  std::optional<std::size_t> tau = 2;
  double test_fraction = 0.25;
  BowTrainConfig train;
  std::uint64_t seed = 1;
};

// Trains h0 on the clean training split, replaces a seeded fraction-p subset
// of training texts (nested across fractions) by their generated targets,
// retrains and scores on the untouched test split.
PoisonReport PoisonExperiment(std::span<const LabeledText> corpus,
                              const PoisonConfig& config);

}  // namespace advocr

#endif  // ADVOCR_TEXTATTACK_H_
