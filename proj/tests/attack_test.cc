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
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "advocr/attack.h"
#include "advocr/error.h"
#include "advocr/recognizer.h"
#include "advocr/render.h"

namespace advocr {
namespace {

const Alphabet kAlpha = Alphabet::LowercaseWithSpace();

// A recognizer that has memorized a handful of short words; enough for the
// attack to have something to move.
const ModelParams& SmallModel() {
  static const ModelParams model = [] {
    std::vector<TrainSample> data;
    for (const char* w : {"cab", "dog", "cat", "bad"}) {
      data.push_back({RenderLine(w), kAlpha.Encode(w)});
    }
    TrainConfig tc;
    tc.learning_rate = 1e-2;
    tc.batch_size = 4;
    tc.epochs = 250;
    tc.noise_augment_std = 0.0;
    return Train(ModelParams::Initialize(ModelConfig{}, 1), data, tc).params;
  }();
  return model;
}

AttackConfig Quick() {
  AttackConfig c = AttackPreset("word-pairs");
  c.learning_rate = 0.05;
  c.max_iterations = 300;
  return c;
}

TEST(AttackConfig, PresetsAndValidation) {
  EXPECT_EQ(AttackPreset("word-pairs").c, 20.0);
  EXPECT_EQ(AttackPreset("word-pairs").max_iterations, 1000u);
  EXPECT_EQ(AttackPreset("sentiment").c, 25.0);
  EXPECT_EQ(AttackPreset("categorization").c, 30.0);
  EXPECT_EQ(AttackPreset("categorization").max_iterations, 2000u);
  EXPECT_EQ(AttackPreset("poisoning").c, 200.0);
  EXPECT_THROW(AttackPreset("nope"), InvalidArgument);
  EXPECT_EQ(AttackPresetNames().size(), 4u);
  for (const std::string& n : AttackPresetNames()) {
    EXPECT_NO_THROW(AttackPreset(n).Validate());
  }
  AttackConfig c;
  c.x_min = 1.0;
  EXPECT_THROW(c.Validate(), InvalidArgument);
  c = AttackConfig{};
  c.c = -1.0;
  EXPECT_THROW(c.Validate(), InvalidArgument);
  c = AttackConfig{};
  c.eot_scales = {0.4};
  EXPECT_THROW(c.Validate(), InvalidArgument);
}

TEST(AttackState, InitialIterateReproducesClean) {
  const Image clean = RenderLine("cab");
  const AttackState s = InitState(clean, AttackConfig{});
  EXPECT_LT(L2(s.Current(), clean), 1e-4);
  for (double v : s.Current().pixels()) {
    EXPECT_GT(v, -1.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(Attack, FlipsMemorizedWord) {
  const ModelParams& m = SmallModel();
  ASSERT_EQ(Recognize(m, RenderLine("cab")).text, "cab");
  const Image clean = RenderLine("cab");
  const Transcript target = kAlpha.Encode("cat");
  const AttackResult r = AttackLine(m, clean, target, Quick());
  ASSERT_TRUE(r.success);
  EXPECT_EQ(r.decoded_text, "cat");
  EXPECT_FALSE(r.rejected);
  EXPECT_GT(r.l2, 0.0);
  // Success is judged on exactly what is returned.
  const Prediction again = Recognize(m, r.adversarial);
  EXPECT_EQ(again.transcript, target);
  EXPECT_FALSE(again.rejected);
  EXPECT_NEAR(r.l2, L2(clean, r.adversarial), 1e-12);
  // Early stop: the returned iterate is the last evaluated one.
  EXPECT_EQ(r.objective_trace.size(), r.iterations_used + 1);
  // Quantized output survives an 8-bit round trip unchanged.
  EXPECT_EQ(DecodePgm(EncodePgm(r.adversarial)), r.adversarial);
}

TEST(Attack, StaysInsideBox) {
  AttackConfig c = Quick();
  c.quantize_output = false;
  c.early_stop = false;
  c.max_iterations = 40;
  c.learning_rate = 0.5;  // large steps push pixels toward the bounds
  const AttackResult r =
      AttackLine(SmallModel(), RenderLine("dog"), kAlpha.Encode("bad"), c);
  for (double v : r.adversarial.pixels()) {
    EXPECT_GT(v, -1.0);
    EXPECT_LT(v, 1.0);
  }
  c.quantize_output = true;
  const AttackResult q =
      AttackLine(SmallModel(), RenderLine("dog"), kAlpha.Encode("bad"), c);
  for (double v : q.adversarial.pixels()) {
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Attack, ZeroWeightOnRecognitionKeepsImage) {
  // With c = 0 only the distance term remains, minimized at the start.
  AttackConfig c = Quick();
  c.c = 0.0;
  c.early_stop = false;
  c.quantize_output = false;
  c.max_iterations = 30;
  const Image clean = RenderLine("cat");
  const AttackResult r =
      AttackLine(SmallModel(), clean, kAlpha.Encode("dog"), c);
  EXPECT_FALSE(r.success);
  EXPECT_LT(r.l2, 1e-3);
  EXPECT_EQ(r.objective_trace.size(), 31u);
}

TEST(Attack, UnitScaleEotEqualsPlainAttack) {
  AttackConfig c = Quick();
  c.max_iterations = 20;
  c.early_stop = false;
  const Image clean = RenderLine("bad");
  const Transcript t = kAlpha.Encode("cab");
  const AttackResult plain = AttackLine(SmallModel(), clean, t, c);
  c.eot_scales = {1.0};
  const AttackResult eot = AttackLineEot(SmallModel(), clean, t, c);
  EXPECT_EQ(plain.objective_trace, eot.objective_trace);
  EXPECT_EQ(plain.adversarial, eot.adversarial);
  c.eot_scales.clear();
  EXPECT_THROW(AttackLineEot(SmallModel(), clean, t, c), InvalidArgument);
}

TEST(Attack, DeterministicAcrossRuns) {
  AttackConfig c = Quick();
  c.max_iterations = 25;
  const Image clean = RenderLine("dog");
  const Transcript t = kAlpha.Encode("cat");
  const AttackResult a = AttackLine(SmallModel(), clean, t, c);
  const AttackResult b = AttackLine(SmallModel(), clean, t, c);
  EXPECT_EQ(a.objective_trace, b.objective_trace);
  EXPECT_EQ(a.adversarial, b.adversarial);
}

TEST(Attack, InfeasibleTargetThrowsBeforeOptimizing) {
  // "cab" renders 32 columns -> 10 timesteps; 11 distinct letters need 11.
  const Image clean = RenderLine("cab");
  try {
    AttackLine(SmallModel(), clean, kAlpha.Encode("abcdefghijk"), Quick());
    FAIL();
  } catch (const InfeasibleTargetError& e) {
    EXPECT_EQ(e.required(), 11u);
    EXPECT_EQ(e.available(), 10u);
  }
}

TEST(Attack, BadInputsThrow) {
  const ModelParams& m = SmallModel();
  EXPECT_THROW(AttackLine(m, RenderLine("cab"), Transcript{}, Quick()),
               InvalidArgument);
  EXPECT_THROW(AttackLine(m, RenderLine("cab"), Transcript{99}, Quick()),
               InvalidArgument);
  const Image tall = RenderLine("cab", EmbeddedFont(), 6);
  EXPECT_THROW(AttackLine(m, tall, kAlpha.Encode("cat"), Quick()), ShapeError);
}

TEST(Document, OnlyEditedLinesChange) {
  const std::vector<std::string> lines = {"cab", "dog", "bad"};
  const RenderedDocument doc = RenderDocument(lines);
  const std::vector<LineEdit> edits = {{1, kAlpha.Encode("cat")}};
  const DocumentAttackResult r =
      AttackDocument(SmallModel(), doc.image, doc.boxes, edits, Quick());
  ASSERT_EQ(r.lines.size(), 1u);
  ASSERT_TRUE(r.lines[0].result.has_value());
  ASSERT_TRUE(r.lines[0].result->success);
  EXPECT_EQ(Crop(r.image, doc.boxes[1]), r.lines[0].result->adversarial);
  const LineBox& b = doc.boxes[1];
  for (std::size_t y = 0; y < doc.image.height(); ++y) {
    for (std::size_t x = 0; x < doc.image.width(); ++x) {
      const bool inside = y >= b.top && y < b.bottom && x >= b.left && x < b.right;
      if (!inside) ASSERT_EQ(r.image.at(y, x), doc.image.at(y, x));
    }
  }
  EXPECT_EQ(Recognize(SmallModel(), Crop(r.image, doc.boxes[1])).text, "cat");
  EXPECT_EQ(Recognize(SmallModel(), Crop(r.image, doc.boxes[0])).text, "cab");
}

TEST(Document, NoEditsReturnsInputAndBadIndicesThrow) {
  const std::vector<std::string> lines = {"cab", "dog"};
  const RenderedDocument doc = RenderDocument(lines);
  EXPECT_EQ(AttackDocument(SmallModel(), doc.image, doc.boxes, {}, Quick()).image,
            doc.image);
  const std::vector<LineEdit> out_of_range = {{2, kAlpha.Encode("cat")}};
  EXPECT_THROW(
      AttackDocument(SmallModel(), doc.image, doc.boxes, out_of_range, Quick()),
      InvalidArgument);
  const std::vector<LineEdit> twice = {{0, kAlpha.Encode("cat")},
                                       {0, kAlpha.Encode("bad")}};
  EXPECT_THROW(AttackDocument(SmallModel(), doc.image, doc.boxes, twice, Quick()),
               InvalidArgument);
}

TEST(Document, InfeasibleLineIsReportedNotThrown) {
  const std::vector<std::string> lines = {"cab", "dog"};
  const RenderedDocument doc = RenderDocument(lines);
  const std::vector<LineEdit> edits = {{0, kAlpha.Encode("abcdefghijkl")}};
  const DocumentAttackResult r =
      AttackDocument(SmallModel(), doc.image, doc.boxes, edits, Quick());
  ASSERT_EQ(r.lines.size(), 1u);
  EXPECT_FALSE(r.lines[0].result.has_value());
  EXPECT_FALSE(r.lines[0].error.empty());
  EXPECT_EQ(r.image, doc.image);
}

TEST(Suite, MetricsAggregateRows) {
  const std::vector<WordPair> pairs = {{"cab", "cat"}, {"dog", "abcdefghijkl"}};
  const SuiteReport rep = EvaluateSuite(SmallModel(), pairs, Quick());
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_EQ(rep.metrics.count, 2u);
  EXPECT_DOUBLE_EQ(rep.metrics.clean_acc, 1.0);
  EXPECT_TRUE(rep.rows[0].success);
  EXPECT_FALSE(rep.rows[1].success);
  EXPECT_FALSE(rep.rows[1].error.empty());
  EXPECT_DOUBLE_EQ(rep.metrics.target_acc, 0.5);
  EXPECT_THROW(EvaluateSuite(SmallModel(), {}, Quick()), InvalidArgument);
}

TEST(Suite, CsvQuotesAwkwardFields) {
  SuiteRow row;
  row.id = 3;
  row.clean_text = "a,b";
  row.target_text = "say \"hi\"";
  row.decoded = "x";
  std::ostringstream out;
  WriteSuiteCsv(out, {&row, 1});
  const std::string csv = out.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "id,clean_text,target_text,decoded,success,rejected,l2,iterations");
  EXPECT_NE(csv.find("\"a,b\""), std::string::npos);
  EXPECT_NE(csv.find("\"say \"\"hi\"\"\""), std::string::npos);
}

TEST(L2, WorkedExamples) {
  const Image a(1, 3, std::vector<double>{1.0, 1.0, 1.0});
  const Image b(1, 3, std::vector<double>{-1.0, 1.0, 1.0});
  EXPECT_DOUBLE_EQ(L2(a, b), 2.0);
  EXPECT_DOUBLE_EQ(L2(a, a), 0.0);
  EXPECT_THROW(L2(a, Image(3, 1)), ShapeError);
}

TEST(BinByL2, EqualCountQuantileBins) {
  std::vector<RejectionSample> s;
  for (int i = 9; i >= 0; --i) s.push_back({static_cast<double>(i), i >= 6});
  const auto bins = BinByL2(s, 3);
  ASSERT_EQ(bins.size(), 3u);
  EXPECT_EQ(bins[0].count, 3u);
  EXPECT_EQ(bins[1].count, 3u);
  EXPECT_EQ(bins[2].count, 4u);
  EXPECT_EQ(bins[0].l2_min, 0.0);
  EXPECT_EQ(bins[0].l2_max, 2.0);
  EXPECT_EQ(bins[2].l2_max, 9.0);
  EXPECT_EQ(bins[0].rejected, 0u);
  EXPECT_DOUBLE_EQ(bins[2].rate(), 1.0);
  for (std::size_t i = 1; i < bins.size(); ++i) {
    EXPECT_GE(bins[i].l2_min, bins[i - 1].l2_max);
  }
  EXPECT_THROW(BinByL2(s, 0), InvalidArgument);
  EXPECT_THROW(BinByL2(s, 11), InvalidArgument);
}

}  // namespace
}  // namespace advocr
