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

#include "advocr/textattack.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "advocr/error.h"

namespace advocr {

namespace {

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)); }
bool IsPunct(char c) { return std::ispunct(static_cast<unsigned char>(c)); }
char Lower(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

std::string LowerCopy(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = Lower(c);
  return out;
}

// Carries the capitalization pattern of `like` over to `word`.
std::string MatchCase(std::string_view like, std::string_view word) {
  std::string out = LowerCopy(word);
  const bool has_alpha = std::any_of(like.begin(), like.end(), [](char c) {
    return std::isalpha(static_cast<unsigned char>(c));
  });
  if (!has_alpha) return out;
  const bool all_upper = std::none_of(like.begin(), like.end(), [](char c) {
    return std::islower(static_cast<unsigned char>(c));
  });
  if (all_upper && like.size() > 1) {
    for (char& c : out) c = static_cast<char>(std::toupper(c));
  } else if (std::isupper(static_cast<unsigned char>(like.front())) &&
             !out.empty()) {
    out[0] = static_cast<char>(std::toupper(out[0]));
  }
  return out;
}

double Sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z))
                : std::exp(z) / (1.0 + std::exp(z));
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, '\t')) out.push_back(field);
  if (!line.empty() && line.back() == '\t') out.emplace_back();
  return out;
}

void StripCr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

// --- Tokens ----------------------------------------------------------------

std::vector<Token> Tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t j = i;
    if (IsSpace(text[i])) {
      while (j < text.size() && IsSpace(text[j])) ++j;
      out.push_back({Token::Kind::kSpace, std::string(text.substr(i, j - i))});
      i = j;
      continue;
    }
    while (j < text.size() && !IsSpace(text[j])) ++j;
    const std::string_view chunk = text.substr(i, j - i);
    std::size_t lead = 0;
    while (lead < chunk.size() && IsPunct(chunk[lead])) ++lead;
    if (lead == chunk.size()) {
      out.push_back({Token::Kind::kPunct, std::string(chunk)});
    } else {
      std::size_t trail = chunk.size();
      while (trail > lead && IsPunct(chunk[trail - 1])) --trail;
      if (lead > 0) {
        out.push_back({Token::Kind::kPunct, std::string(chunk.substr(0, lead))});
      }
      out.push_back(
          {Token::Kind::kWord, std::string(chunk.substr(lead, trail - lead))});
      if (trail < chunk.size()) {
        out.push_back({Token::Kind::kPunct, std::string(chunk.substr(trail))});
      }
    }
    i = j;
  }
  return out;
}

std::string Detokenize(std::span<const Token> tokens) {
  std::string out;
  for (const Token& t : tokens) out += t.text;
  return out;
}

std::vector<std::string> WordFeatures(std::string_view text) {
  std::vector<std::string> out;
  for (const Token& t : Tokenize(text)) {
    if (t.kind == Token::Kind::kWord) out.push_back(LowerCopy(t.text));
  }
  return out;
}

// --- Edit distance ---------------------------------------------------------

std::size_t EditDistance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (Lower(a[i - 1]) != Lower(b[j - 1]));
      row[j] = std::min({up + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[b.size()];
}

std::size_t AdaptiveThreshold(std::string_view word) {
  if (word.empty()) throw InvalidArgument("threshold of an empty word");
  if (word.size() <= 5) return 2;
  if (word.size() <= 9) return 3;
  return 4;
}

std::vector<std::string> CandidateSet(std::string_view word,
                                      std::span<const std::string> vocabulary,
                                      std::size_t tau) {
  std::set<std::string> found;
  const std::string self = LowerCopy(word);
  for (const std::string& v : vocabulary) {
    if (LowerCopy(v) == self) continue;
    if (EditDistance(word, v) <= tau) found.insert(v);
  }
  return {found.begin(), found.end()};
}

// --- Data files ------------------------------------------------------------

WordPairLexicon WordPairLexicon::Parse(std::istream& in) {
  WordPairLexicon lex;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    StripCr(line);
    if (line.empty() || line[0] == '#') continue;
    const auto f = SplitTabs(line);
    if (f.size() != 3 || f[0].empty() || f[1].empty() || f[2].empty()) {
      throw FormatError("lexicon line " + std::to_string(n) +
                        ": expected word<TAB>antonym<TAB>pos");
    }
    const std::size_t d = EditDistance(f[0], f[1]);
    if (d > AdaptiveThreshold(f[0])) {
      throw FormatError("lexicon line " + std::to_string(n) + ": \"" + f[0] +
                        "\" and \"" + f[1] + "\" are " + std::to_string(d) +
                        " edits apart, above the threshold " +
                        std::to_string(AdaptiveThreshold(f[0])));
    }
    lex.pairs.push_back({f[0], f[1], f[2]});
  }
  return lex;
}

WordPairLexicon WordPairLexicon::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open lexicon " + path);
  return Parse(in);
}

std::vector<LabeledText> ParseCorpus(std::istream& in) {
  std::vector<LabeledText> out;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    StripCr(line);
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw FormatError("corpus line " + std::to_string(n) +
                        ": expected label<TAB>text");
    }
    out.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  return out;
}

std::vector<LabeledText> LoadCorpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open corpus " + path);
  return ParseCorpus(in);
}

CorpusSplit SplitCorpus(std::span<const LabeledText> corpus,
                        double test_fraction, std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
    throw InvalidArgument("test fraction must lie in [0, 1)");
  }
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_test = static_cast<std::size_t>(
      std::lround(test_fraction * static_cast<double>(corpus.size())));
  CorpusSplit split;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_test ? split.test : split.train).push_back(corpus[order[i]]);
  }
  return split;
}

// --- Bag-of-words classifier -----------------------------------------------

BowClassifier::BowClassifier(std::vector<std::string> classes,
                             std::vector<std::string> vocabulary,
                             std::vector<std::vector<double>> weights,
                             std::vector<double> biases)
    : classes_(std::move(classes)),
      vocabulary_(std::move(vocabulary)),
      weights_(std::move(weights)),
      biases_(std::move(biases)) {
  if (classes_.size() < 2) {
    throw InvalidArgument("classifier needs at least two classes");
  }
  const std::size_t sets = binary() ? 1 : classes_.size();
  if (weights_.size() != sets || biases_.size() != sets) {
    throw ShapeError("bow", "expected " + std::to_string(sets) +
                                " weight vectors and biases");
  }
  for (const auto& w : weights_) {
    if (w.size() != vocabulary_.size()) {
      throw ShapeError("bow", "weight vector size differs from vocabulary");
    }
  }
  for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
    index_.emplace(vocabulary_[i], i);
  }
}

std::size_t BowClassifier::ClassIndex(std::string_view label) const {
  const auto it = std::find(classes_.begin(), classes_.end(), label);
  if (it == classes_.end()) {
    throw InvalidArgument("unknown class \"" + std::string(label) + "\"");
  }
  return static_cast<std::size_t>(it - classes_.begin());
}

std::vector<double> BowClassifier::Scores(
    std::span<const std::string> words) const {
  std::vector<double> z(biases_);
  for (const std::string& w : words) {
    const auto it = index_.find(w);
    if (it == index_.end()) continue;
    for (std::size_t k = 0; k < z.size(); ++k) z[k] += weights_[k][it->second];
  }
  if (binary()) {
    const double p = Sigmoid(z[0]);
    return {1.0 - p, p};
  }
  for (double& v : z) v = Sigmoid(v);
  return z;
}

std::vector<double> BowClassifier::Scores(std::string_view text) const {
  const auto words = WordFeatures(text);
  return Scores(words);
}

std::string BowClassifier::Predict(std::string_view text) const {
  const auto s = Scores(text);
  return classes_[static_cast<std::size_t>(
      std::max_element(s.begin(), s.end()) - s.begin())];
}

namespace {

// Sparse counts per document over a fixed vocabulary.
using SparseDoc = std::vector<std::pair<std::size_t, double>>;

std::vector<double> FitLogistic(const std::vector<SparseDoc>& docs,
                                const std::vector<double>& y, std::size_t dim,
                                const BowTrainConfig& cfg, double& bias) {
  std::vector<double> w(dim, 0.0), grad(dim);
  bias = 0.0;
  const double inv_n = 1.0 / static_cast<double>(docs.size());
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double gb = 0.0;
    for (std::size_t d = 0; d < docs.size(); ++d) {
      double z = bias;
      for (const auto& [i, c] : docs[d]) z += w[i] * c;
      const double err = Sigmoid(z) - y[d];
      gb += err;
      for (const auto& [i, c] : docs[d]) grad[i] += err * c;
    }
    for (std::size_t i = 0; i < dim; ++i) {
      w[i] -= cfg.learning_rate * (grad[i] * inv_n + cfg.l2 * w[i]);
    }
    bias -= cfg.learning_rate * gb * inv_n;
  }
  return w;
}

}  // namespace

BowTrainResult TrainBow(std::span<const LabeledText> corpus,
                        const BowTrainConfig& config) {
  if (!(config.learning_rate > 0.0)) {
    throw InvalidArgument("learning rate must be positive");
  }
  std::vector<LabeledText> train(corpus.begin(), corpus.end()), held;
  if (config.holdout_fraction > 0.0) {
    CorpusSplit s = SplitCorpus(corpus, config.holdout_fraction, config.seed);
    train = std::move(s.train);
    held = std::move(s.test);
  }
  std::set<std::string> labels, vocab;
  for (const LabeledText& t : train) {
    labels.insert(t.label);
    for (const std::string& w : WordFeatures(t.text)) vocab.insert(w);
  }
  if (labels.size() < 2) {
    throw InvalidArgument("training corpus has fewer than two classes");
  }
  std::vector<std::string> classes(labels.begin(), labels.end());
  std::vector<std::string> vocabulary(vocab.begin(), vocab.end());
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < vocabulary.size(); ++i) index[vocabulary[i]] = i;

  std::vector<SparseDoc> docs;
  for (const LabeledText& t : train) {
    std::map<std::size_t, double> counts;
    for (const std::string& w : WordFeatures(t.text)) counts[index.at(w)] += 1;
    docs.emplace_back(counts.begin(), counts.end());
  }
  const bool binary = classes.size() == 2;
  std::vector<std::vector<double>> weights;
  std::vector<double> biases;
  for (std::size_t k = binary ? 1 : 0; k < classes.size(); ++k) {
    std::vector<double> y;
    for (const LabeledText& t : train) y.push_back(t.label == classes[k]);
    double b = 0.0;
    weights.push_back(FitLogistic(docs, y, vocabulary.size(), config, b));
    biases.push_back(b);
  }
  BowTrainResult result{
      .classifier = BowClassifier(classes, vocabulary, weights, biases),
      .train_accuracy = 0.0,
      .held_out_accuracy = std::nullopt};
  result.train_accuracy = Accuracy(result.classifier, train);
  if (!held.empty()) result.held_out_accuracy = Accuracy(result.classifier, held);
  return result;
}

double Accuracy(const BowClassifier& clf, std::span<const LabeledText> data) {
  if (data.empty()) return 0.0;
  std::size_t ok = 0;
  for (const LabeledText& t : data) ok += clf.Predict(t.text) == t.label;
  return static_cast<double>(ok) / static_cast<double>(data.size());
}

// --- Target-text generation ------------------------------------------------

FailureCriterion FailureCriterion::ScoreBelow(double threshold) {
  FailureCriterion c;
  c.mode = Mode::kScoreBelow;
  c.threshold = threshold;
  c.Validate();
  return c;
}

FailureCriterion FailureCriterion::Misclassified() {
  FailureCriterion c;
  c.mode = Mode::kMisclassified;
  return c;
}

FailureCriterion FailureCriterion::TargetClass(std::string cls, double margin) {
  FailureCriterion c;
  c.mode = Mode::kTargetClass;
  c.target_class = std::move(cls);
  c.margin = margin;
  c.Validate();
  return c;
}

void FailureCriterion::Validate() const {
  if (mode == Mode::kScoreBelow && !(threshold > 0.0 && threshold < 1.0)) {
    throw InvalidArgument("score threshold must lie in (0, 1)");
  }
  if (mode == Mode::kTargetClass) {
    if (target_class.empty()) throw InvalidArgument("target class is empty");
    if (!(margin >= 0.0 && margin < 1.0)) {
      throw InvalidArgument("target-class margin must lie in [0, 1)");
    }
  }
}

std::string FailureCriterion::ToString() const {
  std::ostringstream out;
  switch (mode) {
    case Mode::kScoreBelow:
      out << "score_below(" << threshold << ")";
      break;
    case Mode::kMisclassified:
      out << "misclassified";
      break;
    case Mode::kTargetClass:
      out << "target_class(" << target_class << ", " << margin << ")";
      break;
  }
  return out.str();
}

bool FailureCriterion::Met(const BowClassifier& clf,
                           std::span<const std::string> words,
                           std::string_view label) const {
  const std::vector<double> s = clf.Scores(words);
  const auto best = static_cast<std::size_t>(
      std::max_element(s.begin(), s.end()) - s.begin());
  switch (mode) {
    case Mode::kScoreBelow:
      return s[clf.ClassIndex(label)] < threshold;
    case Mode::kMisclassified:
      return best != clf.ClassIndex(label);
    case Mode::kTargetClass: {
      const std::size_t j = clf.ClassIndex(target_class);
      if (best != j) return false;
      for (std::size_t k = 0; k < s.size(); ++k) {
        if (k != j && s[j] - s[k] < margin) return false;
      }
      return true;
    }
  }
  return false;
}

TargetTextResult GenerateTargetText(const BowClassifier& clf,
                                    std::string_view text,
                                    std::string_view label,
                                    std::optional<std::size_t> tau,
                                    const FailureCriterion& criterion) {
  criterion.Validate();
  std::vector<Token> tokens = Tokenize(text);
  std::vector<std::size_t> word_pos;
  std::vector<std::string> words;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].kind != Token::Kind::kWord) continue;
    word_pos.push_back(i);
    words.push_back(LowerCopy(tokens[i].text));
  }
  if (words.empty()) throw InvalidArgument("text has no words");

  const bool toward_target =
      criterion.mode == FailureCriterion::Mode::kTargetClass;
  const std::size_t tracked = toward_target
                                  ? clf.ClassIndex(criterion.target_class)
                                  : clf.ClassIndex(label);
  auto score = [&](std::span<const std::string> ws) {
    const double s = clf.Scores(ws)[tracked];
    return toward_target ? -s : s;
  };

  TargetTextResult result;
  result.word_tokens = words.size();
  result.text = std::string(text);
  if (criterion.Met(clf, words, label)) {
    result.success = true;
    return result;
  }

  const double base = score(words);
  std::vector<std::string> seen;
  for (const std::string& w : words) {
    if (std::find(seen.begin(), seen.end(), w) != seen.end()) continue;
    seen.push_back(w);
    const std::size_t t = tau ? *tau : AdaptiveThreshold(w);
    std::optional<Replacement> best;
    for (const std::string& cand : CandidateSet(w, clf.vocabulary(), t)) {
      std::vector<std::string> trial = words;
      std::replace(trial.begin(), trial.end(), w, cand);
      const double delta = score(trial) - base;
      // Candidates arrive sorted, so a strict comparison keeps the
      // lexicographically first among equal deltas.
      if (!best || delta < best->delta) best = Replacement{w, cand, delta};
    }
    if (best && best->delta < 0.0) result.plan.push_back(*best);
  }
  std::stable_sort(result.plan.begin(), result.plan.end(),
                   [](const Replacement& a, const Replacement& b) {
                     return std::abs(a.delta) > std::abs(b.delta);
                   });

  // Positions are matched against the original words so that one
  // replacement never feeds another.
  std::vector<std::string> current = words;
  for (const Replacement& r : result.plan) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (words[i] != r.word) continue;
      current[i] = r.replacement;
      tokens[word_pos[i]].text = MatchCase(tokens[word_pos[i]].text,
                                           r.replacement);
      ++result.replaced_tokens;
    }
    ++result.applied;
    if (criterion.Met(clf, current, label)) {
      result.success = true;
      break;
    }
  }
  result.text = Detokenize(tokens);
  return result;
}

// --- Poisoning -------------------------------------------------------------

PoisonReport PoisonExperiment(std::span<const LabeledText> corpus,
                              const PoisonConfig& config) {
  for (double f : config.fractions) {
    if (!(f >= 0.0 && f <= 1.0)) {
      throw InvalidArgument("poison fractions must lie in [0, 1]");
    }
  }
  BowTrainConfig train_cfg = config.train;
  train_cfg.holdout_fraction = 0.0;
  const CorpusSplit split =
      SplitCorpus(corpus, config.test_fraction, config.seed);
  const BowClassifier h0 = TrainBow(split.train, train_cfg).classifier;
  const double baseline = Accuracy(h0, split.test);

  std::vector<std::size_t> order(split.train.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed + 1);
  std::shuffle(order.begin(), order.end(), rng);

  // Generated lazily along the shared order so subsets nest.
  std::vector<std::optional<std::string>> targets(split.train.size());
  std::vector<bool> done(split.train.size(), false);
  auto target_of = [&](std::size_t i) -> const std::optional<std::string>& {
    if (!done[i]) {
      done[i] = true;
      const LabeledText& t = split.train[i];
      const TargetTextResult r =
          GenerateTargetText(h0, t.text, t.label, config.tau, config.criterion);
      if (r.success && r.applied > 0) targets[i] = r.text;
    }
    return targets[i];
  };

  PoisonReport report;
  double largest = -1.0;
  for (double f : config.fractions) {
    const auto k = static_cast<std::size_t>(
        std::lround(f * static_cast<double>(order.size())));
    std::vector<LabeledText> poisoned_set = split.train;
    PoisonPoint point{.fraction = f, .accuracy = 0.0, .baseline = baseline,
                      .poisoned = 0, .attempted = k};
    std::vector<PoisonedText> samples;
    for (std::size_t r = 0; r < k; ++r) {
      const std::size_t i = order[r];
      if (const auto& t = target_of(i)) {
        poisoned_set[i].text = *t;
        ++point.poisoned;
        samples.push_back({split.train[i].label, split.train[i].text, *t});
      }
    }
    point.accuracy =
        Accuracy(TrainBow(poisoned_set, train_cfg).classifier, split.test);
    if (f > largest) {
      largest = f;
      report.samples = std::move(samples);
    }
    report.curve.push_back(point);
  }
  return report;
}

}  // namespace advocr
