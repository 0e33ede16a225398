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

// End-to-end acceptance runner. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails. Thresholds live in the constants below and
// are not configurable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "advocr/attack.h"
#include "advocr/ctc.h"
#include "advocr/error.h"
#include "advocr/experiments.h"
#include "advocr/gradcheck.h"
#include "advocr/graph.h"
#include "advocr/recognizer.h"
#include "advocr/render.h"
#include "advocr/reports.h"
#include "advocr/textattack.h"
#include "oracles.h"

namespace advocr {
namespace {

// --- pinned thresholds -----------------------------------------------------
constexpr std::size_t kCtcInstances = 200;
constexpr std::size_t kCtcMaxTimesteps = 8;
constexpr std::size_t kCtcMaxLabels = 3;
constexpr double kCtcTolerance = 1e-9;
constexpr double kCtcSeconds = 10.0;

constexpr double kFdStep = 1e-5;
constexpr double kFdRelTolerance = 1e-4;
// Below this |analytic| + |numeric| a central difference at kFdStep cannot
// resolve the value (roundoff ~1e-11); such coordinates are held to the
// absolute bound kFdRelTolerance * kFdFloor instead.
constexpr double kFdFloor = 1e-6;
constexpr std::uint64_t kFdSeeds = 8;
constexpr double kGradSeconds = 120.0;

constexpr std::size_t kBeamLattices = 100;
constexpr std::size_t kBeamMaxTimesteps = 6;
constexpr double kBeamTolerance = 1e-9;
constexpr double kBeamSeconds = 30.0;

constexpr std::size_t kHeldOutWords = 60;
constexpr std::size_t kMinTrainingWords = 200;
constexpr double kHeldOutAccuracy = 0.95;
constexpr double kTrainSeconds = 30 * 60.0;

constexpr double kSuiteTargetAccuracy = 0.80;
constexpr double kSuiteRejectedRate = 0.10;
constexpr double kSuiteSeconds = 3600.0;

constexpr std::size_t kOracleInstancesPerMode = 300;
constexpr std::size_t kOracleMaxTokens = 6;
constexpr std::size_t kOracleMaxVocabulary = 20;
constexpr double kTextTransformRate = 0.90;

constexpr std::size_t kEvasionTexts = 50;
constexpr double kMaxAdversarialAccuracy = 0.20;
constexpr double kMinOcrTargetAccuracy = 0.80;

constexpr double kCurveNoise = 0.02;
constexpr double kMinDropAtHalf = 0.10;
constexpr std::size_t kRoundTripSamples = 50;
constexpr double kMinRoundTrip = 0.80;

constexpr std::size_t kMinRejectionBins = 5;

constexpr std::uint64_t kSeed = 1;
constexpr std::size_t kTau = 2;
constexpr double kTestFraction = 0.25;
constexpr double kScoreThreshold = 0.1;

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string Fmt(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

struct Verdict {
  int id = 0;
  bool pass = false;
  std::string detail;
};

void Print(const Verdict& v) {
  std::cout << "criterion " << v.id << ": " << (v.pass ? "PASS" : "FAIL")
            << " - " << v.detail << std::endl;
}

// --- 1: CTC against enumeration ---------------------------------------------

std::vector<int> RandomTarget(std::mt19937_64& rng, std::size_t labels,
                              std::size_t timesteps) {
  std::uniform_int_distribution<std::size_t> len(1, timesteps);
  std::uniform_int_distribution<int> lab(0, static_cast<int>(labels) - 1);
  while (true) {
    std::vector<int> t(len(rng));
    for (int& v : t) v = lab(rng);
    if (MinTimesteps(t) <= timesteps) return t;
  }
}

Verdict CheckCtc() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> m_of(1, kCtcMaxTimesteps),
      labels_of(1, kCtcMaxLabels);
  double worst = 0.0;
  for (std::size_t i = 0; i < kCtcInstances; ++i) {
    const std::size_t m = m_of(rng), labels = labels_of(rng), k = labels + 1;
    const auto probs = oracle::RandomLattice(rng, m, k);
    const auto target = RandomTarget(rng, labels, m);
    const double brute = oracle::BruteCtcLoss(probs, m, k, target);
    const double dp = CtcLoss(ProbLattice(m, k, probs), target).loss;
    worst = std::max(worst, std::abs(dp - brute));
  }
  const double secs = Since(t0);
  return {1, worst <= kCtcTolerance && secs < kCtcSeconds,
          std::to_string(kCtcInstances) + " instances, max |dp - brute| " +
              Fmt("%.3g", worst) + ", " + Fmt("%.2f", secs) + " s"};
}

// --- 2: gradients ------------------------------------------------------------

ModelConfig TinyConfig() {
  ModelConfig c;
  c.input_height = 6;
  c.conv_channels = 2;
  c.vertical_hidden = 3;
  c.horizontal_hidden = 3;
  c.alphabet = Alphabet("ab");
  return c;
}

struct FdStats {
  double max_rel = 0.0;       // plain relative error, every coordinate
  double max_floored = 0.0;   // error / max(kFdFloor, |a| + |n|)
  std::size_t coords = 0;
};

void Accumulate(FdStats& s, double analytic, double numeric) {
  s.max_rel = std::max(s.max_rel, RelativeError(analytic, numeric));
  s.max_floored = std::max(
      s.max_floored, std::abs(analytic - numeric) /
                         std::max(kFdFloor, std::abs(analytic) + std::abs(numeric)));
  ++s.coords;
}

template <typename F>
void CentralDifferences(FdStats& s, const Tensor& at, const Tensor& analytic,
                        F&& f) {
  Tensor x = at;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i];
    x[i] = v + kFdStep;
    const double up = f(x);
    x[i] = v - kFdStep;
    const double down = f(x);
    x[i] = v;
    Accumulate(s, analytic[i], (up - down) / (2 * kFdStep));
  }
}

Verdict CheckGradients() {
  const auto t0 = Clock::now();
  FdStats lattice, pixels, params;
  const ModelConfig cfg = TinyConfig();
  for (std::uint64_t seed = 1; seed <= kFdSeeds; ++seed) {
    std::mt19937_64 rng(seed + 200);
    // CTC w.r.t. the log-lattice.
    const std::size_t m = 3 + seed % 4;
    const auto probs = oracle::RandomLattice(rng, m, 3);
    const auto target = RandomTarget(rng, 2, m);
    const Tensor logp = ProbLattice(m, 3, probs).LogProbs();
    CentralDifferences(lattice, logp, CtcLossFromLogProbs(logp, target).grad,
                       [&](const Tensor& lp) {
                         return CtcLossFromLogProbs(lp, target).loss;
                       });

    // Full model w.r.t. pixels and parameters.
    const ModelParams p = ModelParams::Initialize(cfg, seed);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    Image img(cfg.input_height, 12);
    for (double& v : img.pixels()) v = u(rng);
    const Transcript t = {0, 1};
    auto loss_of = [&](const ModelParams& q, const Image& im) {
      return CtcLoss(Forward(q, im), t).loss;
    };

    Graph g;
    const Node x = g.Leaf(img.ToTensor());
    const Node loss =
        AddCtcLoss(g, BuildForward(g, p, x, false).log_probs, t);
    const Gradients grads = g.Backward(loss);
    CentralDifferences(pixels, img.ToTensor(), grads.of(x),
                       [&](const Tensor& im) {
                         return loss_of(p, Image::FromTensor(im));
                       });

    const std::vector<TrainSample> batch = {{img, t}};
    const BatchGradient bg = ComputeBatchGradient(p, batch);
    for (const auto& [name, value] : p.tensors()) {
      CentralDifferences(params, value, bg.grads.at(name),
                         [&, name = name](const Tensor& w) {
                           ModelParams q = p;
                           q.mutable_tensors().at(name) = w;
                           return loss_of(q, img);
                         });
    }
  }
  const double secs = Since(t0);
  const bool pass = lattice.max_rel <= kFdRelTolerance &&
                    pixels.max_rel <= kFdRelTolerance &&
                    params.max_floored <= kFdRelTolerance &&
                    secs < kGradSeconds;
  return {2, pass,
          "lattice rel " + Fmt("%.2g", lattice.max_rel) + " (" +
              std::to_string(lattice.coords) + "), pixels rel " +
              Fmt("%.2g", pixels.max_rel) + " (" +
              std::to_string(pixels.coords) + "), params rel " +
              Fmt("%.2g", params.max_floored) + " with 1e-6 floor, " +
              Fmt("%.2g", params.max_rel) + " unfloored (" +
              std::to_string(params.coords) + "), " + Fmt("%.1f", secs) +
              " s"};
}

// --- 3: beam search ------------------------------------------------------------

Verdict CheckBeam() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<std::size_t> m_of(1, kBeamMaxTimesteps),
      labels_of(1, kCtcMaxLabels);
  std::size_t exact = 0, monotone = 0;
  for (std::size_t i = 0; i < kBeamLattices; ++i) {
    const std::size_t m = m_of(rng), k = labels_of(rng) + 1;
    const auto probs = oracle::RandomLattice(rng, m, k);
    const auto masses = oracle::TranscriptMasses(probs, m, k);
    auto best = masses.begin();
    for (auto it = masses.begin(); it != masses.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    std::size_t full = 1;
    for (std::size_t j = 0; j < m; ++j) full *= k;
    const ProbLattice l(m, k, probs);
    const BeamResult r = BeamDecode(l, full);
    exact += r.transcript == best->first &&
             std::abs(r.log_score - std::log(best->second)) <= kBeamTolerance;
    bool mono = true;
    double prev = -INFINITY;
    for (std::size_t w = 1; w <= full; w *= 2) {
      const double s = BeamDecode(l, w).log_score;
      mono = mono && s >= prev - kBeamTolerance;
      prev = s;
    }
    mono = mono && r.log_score >= prev - kBeamTolerance;
    monotone += mono;
  }
  const double secs = Since(t0);
  return {3,
          exact == kBeamLattices && monotone == kBeamLattices &&
              secs < kBeamSeconds,
          std::to_string(exact) + "/" + std::to_string(kBeamLattices) +
              " exhaustive-width matches, " + std::to_string(monotone) + "/" +
              std::to_string(kBeamLattices) + " monotone in width, " +
              Fmt("%.2f", secs) + " s"};
}

// --- 6a: greedy substitution against the enumeration oracle ------------------

oracle::ToyBow RandomToy(std::mt19937_64& rng, std::size_t classes) {
  std::uniform_int_distribution<int> len(2, 4), ch(0, 2);
  std::uniform_int_distribution<std::size_t> size(4, kOracleMaxVocabulary);
  std::normal_distribution<double> w(0.0, 2.0);
  std::set<std::string> vocab;
  const std::size_t n = size(rng);
  while (vocab.size() < n) {
    std::string s(len(rng), 'a');
    for (char& c : s) c = static_cast<char>('a' + ch(rng));
    vocab.insert(s);
  }
  oracle::ToyBow toy;
  for (std::size_t c = 0; c < classes; ++c) {
    toy.classes.push_back(std::string(1, static_cast<char>('p' + c)));
  }
  toy.vocabulary.assign(vocab.begin(), vocab.end());
  std::shuffle(toy.vocabulary.begin(), toy.vocabulary.end(), rng);
  const std::size_t rows = classes == 2 ? 1 : classes;
  toy.weights.assign(rows, std::vector<double>(toy.vocabulary.size()));
  for (auto& row : toy.weights) {
    for (double& v : row) v = w(rng);
  }
  for (std::size_t r = 0; r < rows; ++r) toy.biases.push_back(0.25 * w(rng));
  return toy;
}

struct OracleTally {
  std::size_t instances = 0;
  std::size_t matches = 0;
  std::size_t successes = 0;
};

OracleTally RunOracleComparison() {
  using Mode = FailureCriterion::Mode;
  OracleTally tally;
  const FailureCriterion crits[] = {FailureCriterion::ScoreBelow(kScoreThreshold),
                                    FailureCriterion::Misclassified(),
                                    FailureCriterion::TargetClass("q", 0.05)};
  std::mt19937_64 rng(606);
  for (const FailureCriterion& crit : crits) {
    const std::size_t classes = crit.mode == Mode::kScoreBelow ? 2 : 3;
    oracle::Criterion oc;
    oc.mode = crit.mode == Mode::kScoreBelow ? oracle::Criterion::Mode::kScoreBelow
              : crit.mode == Mode::kMisclassified
                  ? oracle::Criterion::Mode::kMisclassified
                  : oracle::Criterion::Mode::kTargetClass;
    oc.threshold = crit.threshold;
    oc.target = crit.target_class;
    oc.margin = crit.margin;
    for (std::size_t i = 0; i < kOracleInstancesPerMode; ++i) {
      const oracle::ToyBow toy = RandomToy(rng, classes);
      const BowClassifier clf(toy.classes, toy.vocabulary, toy.weights,
                              toy.biases);
      std::uniform_int_distribution<std::size_t> nt(1, kOracleMaxTokens),
          pick(0, toy.vocabulary.size() - 1), lab(0, classes - 1);
      std::vector<std::string> words(nt(rng));
      for (std::string& w : words) w = toy.vocabulary[pick(rng)];
      std::string label = toy.classes[lab(rng)];
      if (crit.mode == Mode::kTargetClass && label == crit.target_class) {
        label = toy.classes[0];
      }
      std::string text;
      for (const std::string& w : words) text += (text.empty() ? "" : " ") + w;

      const oracle::GreedyOutcome want =
          oracle::GreedySubstitution(toy, words, label, kTau, oc);
      const TargetTextResult got =
          GenerateTargetText(clf, text, label, kTau, crit);
      std::string want_text;
      for (const std::string& w : want.final_words) {
        want_text += (want_text.empty() ? "" : " ") + w;
      }
      bool same = got.success == want.success &&
                  got.applied == want.applied && got.text == want_text &&
                  got.plan.size() == want.plan.size();
      for (std::size_t j = 0; same && j < want.plan.size(); ++j) {
        same = got.plan[j].word == want.plan[j].first &&
               got.plan[j].replacement == want.plan[j].second;
      }
      ++tally.instances;
      tally.matches += same;
      tally.successes += want.success;
    }
  }
  return tally;
}

// --- 4-9: the trained-model pipeline ---------------------------------------

struct PipelineResult {
  std::vector<Verdict> verdicts;               // criteria 4-9
  std::map<std::string, std::string> reports;  // name -> bytes
};

template <typename F>
std::string Capture(F&& write) {
  std::ostringstream out;
  write(out);
  return out.str();
}

bool InBox(const Image& img) {
  return std::all_of(img.pixels().begin(), img.pixels().end(),
                     [](double v) { return std::isfinite(v) && v >= -1.0 && v <= 1.0; });
}

PipelineResult RunPipeline(const OracleTally& oracle_tally) {
  PipelineResult out;
  auto& rep = out.reports;

  // 4. Train on the bundled word list, evaluate on held-out noisy renders.
  auto t0 = Clock::now();
  const std::vector<std::string> words =
      LoadWordList(DataPath("words.txt"));
  const DeskTrainRun run =
      TrainDeskModel(words, ModelConfig{}, DeskTrainConfig(), DeskDataConfig{},
                     kHeldOutWords, kSeed);
  const double train_secs = Since(t0);
  const ModelParams& model = run.params;
  rep["model.bin"] = SerializeParams(model);
  rep["loss.csv"] = Capture([&](std::ostream& o) {
    WriteLossCsv(o, run.loss_history);
  });
  rep["held_out.txt"] =
      std::to_string(run.held_out.correct) + "/" +
      std::to_string(run.held_out.total) + " rejected " +
      std::to_string(run.held_out.rejected) + "\n";
  {
    std::set<std::string> distinct(words.begin(), words.end());
    const bool pass = distinct.size() == words.size() &&
                      run.split.train.size() >= kMinTrainingWords &&
                      run.held_out.accuracy() >= kHeldOutAccuracy &&
                      train_secs <= kTrainSeconds;
    out.verdicts.push_back(
        {4, pass,
         "held-out accuracy " + Fmt("%.4f", run.held_out.accuracy()) + " (" +
             std::to_string(run.held_out.correct) + "/" +
             std::to_string(run.held_out.total) + " renders of " +
             std::to_string(run.split.held_out.size()) + " words; trained on " +
             std::to_string(run.split.train.size()) + "), " +
             Fmt("%.0f", train_secs) + " s"});
  }

  // 5. Word-pair suite.
  t0 = Clock::now();
  const WordPairLexicon lexicon =
      WordPairLexicon::Load(DataPath("antonyms.tsv"));
  const std::vector<WordPair> pairs = LexiconPairs(lexicon);
  const SuiteReport suite =
      EvaluateSuite(model, pairs, AttackPreset("word-pairs"));
  const double suite_secs = Since(t0);
  rep["suite.csv"] = Capture([&](std::ostream& o) { WriteSuiteCsv(o, suite.rows); });
  rep["suite.jsonl"] =
      Capture([&](std::ostream& o) { WriteSuiteJsonl(o, suite.rows); });
  rep["suite_summary.csv"] = Capture(
      [&](std::ostream& o) { WriteSuiteSummaryCsv(o, suite.metrics); });
  {
    std::size_t checked = 0, broken = 0;
    for (const SuiteRow& row : suite.rows) {
      if (!row.error.empty()) continue;
      ++checked;
      const Image clean = RenderLine(row.clean_text);
      bool ok = row.adversarial.height() == clean.height() &&
                row.adversarial.width() == clean.width() &&
                InBox(row.adversarial) &&
                std::abs(L2(clean, row.adversarial) - row.l2) <= 1e-9;
      if (ok && row.success) {
        const Prediction p = Recognize(model, row.adversarial);
        ok = p.text == row.target_text && !p.rejected;
      }
      broken += !ok;
    }
    // Locality on a document: only the edited line boxes may change.
    std::vector<std::string> lines;
    for (std::size_t i = 0; i < 4 && i < pairs.size(); ++i) {
      lines.push_back(pairs[i].clean);
    }
    const RenderedDocument doc = RenderDocument(lines);
    const Alphabet alpha = Alphabet::LowercaseWithSpace();
    const std::vector<LineEdit> edits = {{1, alpha.Encode(pairs[1].target)},
                                         {3, alpha.Encode(pairs[3].target)}};
    const DocumentAttackResult dres = AttackDocument(
        model, doc.image, doc.boxes, edits, AttackPreset("word-pairs"));
    std::size_t outside = 0;
    for (std::size_t y = 0; y < doc.image.height(); ++y) {
      for (std::size_t x = 0; x < doc.image.width(); ++x) {
        bool edited = false;
        for (const LineEdit& e : edits) {
          const LineBox& b = doc.boxes[e.line_index];
          edited = edited || (y >= b.top && y < b.bottom && x >= b.left &&
                              x < b.right);
        }
        if (!edited) outside += dres.image.at(y, x) != doc.image.at(y, x);
      }
    }
    const bool doc_box = InBox(dres.image);
    rep["document.pgm"] = EncodePgm(dres.image);

    const SuiteMetrics& m = suite.metrics;
    const bool pass = m.target_acc >= kSuiteTargetAccuracy &&
                      m.rejected_rate <= kSuiteRejectedRate && broken == 0 &&
                      outside == 0 && doc_box && suite_secs <= kSuiteSeconds;
    out.verdicts.push_back(
        {5, pass,
         "target accuracy " + Fmt("%.2f", m.target_acc) + ", rejected " +
             Fmt("%.2f", m.rejected_rate) + ", avg L2 " +
             Fmt("%.3f", m.avg_l2) + ", clean accuracy " +
             Fmt("%.2f", m.clean_acc) + "; invariants broken on " +
             std::to_string(broken) + "/" + std::to_string(checked) +
             " outputs, " + std::to_string(outside) +
             " document pixels changed outside edited lines; " +
             Fmt("%.0f", suite_secs) + " s"});
  }

  // 6. Greedy substitution: oracle equivalence + sentiment transform rate.
  const std::vector<LabeledText> corpus =
      LoadCorpus(DataPath("sentiment.tsv"));
  const CorpusSplit split = SplitCorpus(corpus, kTestFraction, kSeed);
  BowTrainConfig bow;
  bow.seed = kSeed;
  const BowClassifier clf = TrainBow(split.train, bow).classifier;
  {
    std::vector<TargetRow> rows;
    std::size_t correct = 0, transformed = 0;
    for (const LabeledText& t : split.test) {
      if (clf.Predict(t.text) != t.label) continue;
      ++correct;
      TargetRow row{.id = rows.size(), .input = t, .result = {}, .error = {}};
      row.result = GenerateTargetText(clf, t.text, t.label, kTau,
                                      FailureCriterion::ScoreBelow(kScoreThreshold));
      transformed += row.result.success;
      rows.push_back(std::move(row));
    }
    rep["targets.csv"] =
        Capture([&](std::ostream& o) { WriteTargetCsv(o, rows); });
    const double rate =
        correct == 0 ? 0.0 : static_cast<double>(transformed) / correct;
    const bool pass = oracle_tally.matches == oracle_tally.instances &&
                      rate >= kTextTransformRate;
    out.verdicts.push_back(
        {6, pass,
         "oracle agreement " + std::to_string(oracle_tally.matches) + "/" +
             std::to_string(oracle_tally.instances) + " (" +
             std::to_string(oracle_tally.successes) +
             " successful), sentiment transform rate " + Fmt("%.3f", rate) +
             " (" + std::to_string(transformed) + "/" +
             std::to_string(correct) + " correctly classified test texts)"});
  }

  // 7. Image + classifier evasion.
  {
    const std::vector<LabeledText> texts =
        SelectCorrect(clf, split.test, kEvasionTexts, kSeed);
    EvasionOptions opts;
    opts.criterion = FailureCriterion::ScoreBelow(kScoreThreshold);
    const EvasionReport ev = RunEvasion(model, clf, texts, opts);
    rep["evasion.csv"] =
        Capture([&](std::ostream& o) { WriteEvasionCsv(o, ev.rows); });
    rep["evasion_summary"] =
        Capture([&](std::ostream& o) { WriteEvasionSummary(o, ev.summary); });
    const EvasionSummary& s = ev.summary;
    const bool pass = s.texts == kEvasionTexts &&
                      s.adversarial_accuracy <= kMaxAdversarialAccuracy &&
                      s.ocr_target_accuracy >= kMinOcrTargetAccuracy;
    out.verdicts.push_back(
        {7, pass,
         "classifier accuracy " + Fmt("%.2f", s.baseline_accuracy) +
             " on clean texts -> " + Fmt("%.2f", s.adversarial_accuracy) +
             " on OCR of adversarial images; OCR target accuracy " +
             Fmt("%.2f", s.ocr_target_accuracy) + " over " +
             std::to_string(s.texts) + " texts"});
  }

  // 8. Poisoning curve and image round trip.
  {
    PoisonConfig pc;
    pc.criterion = FailureCriterion::ScoreBelow(kScoreThreshold);
    pc.tau = kTau;
    pc.test_fraction = kTestFraction;
    pc.train.seed = kSeed;
    pc.seed = kSeed;
    const PoisonReport pr = PoisonExperiment(corpus, pc);
    rep["poison.csv"] =
        Capture([&](std::ostream& o) { WritePoisonCsv(o, pr.curve); });
    rep["poison_samples.tsv"] =
        Capture([&](std::ostream& o) { WritePoisonSamplesTsv(o, pr.samples); });
    bool monotone = true;
    std::string curve;
    for (std::size_t i = 0; i < pr.curve.size(); ++i) {
      curve += (i ? " " : "") + Fmt("%.3f", pr.curve[i].accuracy);
      if (i > 0) {
        monotone = monotone &&
                   pr.curve[i].accuracy <= pr.curve[i - 1].accuracy + kCurveNoise;
      }
    }
    double drop = -1.0;
    for (const PoisonPoint& p : pr.curve) {
      if (std::abs(p.fraction - 0.5) < 1e-12) drop = p.baseline - p.accuracy;
    }
    const std::vector<PoisonedText> sampled =
        SamplePoisoned(pr.samples, kRoundTripSamples, kSeed);
    const RoundTripReport rt =
        VerifyPoisonImages(model, sampled, AttackPreset("poisoning"));
    rep["roundtrip.csv"] =
        Capture([&](std::ostream& o) { WriteEvasionCsv(o, rt.rows); });
    const bool pass = monotone && drop >= kMinDropAtHalf &&
                      rt.attempted == kRoundTripSamples &&
                      rt.rate() >= kMinRoundTrip;
    out.verdicts.push_back(
        {8, pass,
         "accuracy by fraction [" + curve + "], baseline " +
             Fmt("%.3f", pr.curve.empty() ? 0.0 : pr.curve.front().baseline) +
             ", drop at 0.5 " + Fmt("%.3f", drop) + ", round trip " +
             std::to_string(rt.verified) + "/" + std::to_string(rt.attempted)});
  }

  // 9. Rejection rate versus L2.
  {
    const RejectionStudy study = StudyRejection(model, suite.rows);
    rep["rejection.csv"] =
        Capture([&](std::ostream& o) { WriteRejectionCsv(o, study.bins); });
    std::string rates;
    for (const RejectionBin& b : study.bins) {
      rates += (rates.empty() ? "" : " ") + Fmt("%.3f", b.rate());
    }
    const bool pass =
        study.bins.size() >= kMinRejectionBins && study.non_decreasing();
    out.verdicts.push_back(
        {9, pass,
         std::to_string(study.bins.size()) + " bins over " +
             std::to_string(study.samples.size()) +
             " images, rejection rate by L2 [" + rates + "]"});
  }
  return out;
}

}  // namespace
}  // namespace advocr

int main(int argc, char** argv) {
  using namespace advocr;
  CLI::App app{"advocr acceptance runner"};
  std::string report_dir;
  app.add_option("--report-dir", report_dir,
                 "Also write the first run's reports here");
  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<Verdict> all;
    all.push_back(CheckCtc());
    Print(all.back());
    all.push_back(CheckGradients());
    Print(all.back());
    all.push_back(CheckBeam());
    Print(all.back());

    const OracleTally tally = RunOracleComparison();
    const PipelineResult first = RunPipeline(tally);
    for (const Verdict& v : first.verdicts) {
      all.push_back(v);
      Print(v);
    }
    if (!report_dir.empty()) {
      std::filesystem::create_directories(report_dir);
      for (const auto& [name, bytes] : first.reports) {
        std::ofstream(std::filesystem::path(report_dir) / name,
                      std::ios::binary)
            << bytes;
      }
    }

    // 10. Everything from 4 to 9 again, from scratch.
    const PipelineResult second = RunPipeline(tally);
    std::vector<std::string> differing;
    for (const auto& [name, bytes] : first.reports) {
      const auto it = second.reports.find(name);
      if (it == second.reports.end() || it->second != bytes) {
        differing.push_back(name);
      }
    }
    std::string detail = std::to_string(first.reports.size()) +
                         " reports compared across two runs";
    if (!differing.empty()) {
      detail += "; differing:";
      for (const std::string& d : differing) detail += " " + d;
    }
    all.push_back({10, differing.empty() && second.reports.size() ==
                                               first.reports.size(),
                   detail});
    Print(all.back());

    const auto failed = std::count_if(all.begin(), all.end(),
                                      [](const Verdict& v) { return !v.pass; });
    std::cout << (failed == 0 ? "all criteria passed"
                              : std::to_string(failed) + " criteria failed")
              << std::endl;
    return failed == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "acceptance run aborted: " << e.what() << std::endl;
    return 1;
  }
}
