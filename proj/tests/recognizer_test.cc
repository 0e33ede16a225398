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
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "advocr/error.h"
#include "advocr/gradcheck.h"
#include "advocr/graph.h"
#include "advocr/recognizer.h"
#include "advocr/render.h"

namespace advocr {
namespace {

// Small enough for finite differences over every pixel.
ModelConfig TinyConfig() {
  ModelConfig c;
  c.input_height = 6;
  c.conv_channels = 2;
  c.vertical_hidden = 3;
  c.horizontal_hidden = 3;
  c.alphabet = Alphabet("ab");
  return c;
}

Image RandomImage(std::size_t h, std::size_t w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  Image img(h, w);
  for (double& v : img.pixels()) v = u(rng);
  return img;
}

// Loss through the plain forward pass and the DP, no graph involved.
double ReferenceLoss(const ModelParams& p, const Image& img,
                     const Transcript& target) {
  return CtcLoss(Forward(p, img), target).loss;
}

TEST(ModelConfig, Validate) {
  ModelConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.input_height = 25;
  EXPECT_THROW(c.Validate(), InvalidArgument);
  c = ModelConfig{};
  c.conv_channels = 0;
  EXPECT_THROW(c.Validate(), InvalidArgument);
}

TEST(Forward, TimestepsAndRowSums) {
  const ModelParams p = ModelParams::Initialize(ModelConfig{}, 3);
  const ProbLattice l = Forward(p, RandomImage(24, 30, 1));
  EXPECT_EQ(l.timesteps(), 10u);
  EXPECT_EQ(l.num_classes(), 28u);
  for (std::size_t t = 0; t < l.timesteps(); ++t) {
    double s = 0.0;
    for (std::size_t k = 0; k < l.num_classes(); ++k) s += l.at(t, k);
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Forward, WrongHeightOrTooNarrowThrows) {
  const ModelParams p = ModelParams::Initialize(ModelConfig{}, 3);
  EXPECT_THROW(Forward(p, RandomImage(23, 30, 1)), ShapeError);
  EXPECT_THROW(Forward(p, RandomImage(24, 2, 1)), ShapeError);
}

TEST(Forward, InitializationIsSeeded) {
  const ModelParams a = ModelParams::Initialize(ModelConfig{}, 9);
  const ModelParams b = ModelParams::Initialize(ModelConfig{}, 9);
  const ModelParams c = ModelParams::Initialize(ModelConfig{}, 10);
  EXPECT_EQ(SerializeParams(a), SerializeParams(b));
  EXPECT_NE(SerializeParams(a), SerializeParams(c));
}

TEST(Gradients, PixelGradientMatchesFiniteDifference) {
  const ModelConfig cfg = TinyConfig();
  const ModelParams p = ModelParams::Initialize(cfg, 4);
  const Image img = RandomImage(6, 12, 5);
  const Transcript target = {0, 1};

  Graph g;
  const Node x = g.Leaf(img.ToTensor());
  const ForwardNodes f = BuildForward(g, p, x, false);
  const Node loss = AddCtcLoss(g, f.log_probs, target);
  EXPECT_NEAR(g.value(loss).item(), ReferenceLoss(p, img, target), 1e-10);
  const Gradients grads = g.Backward(loss);

  const GradCheckReport r = FiniteDiffCheck(
      [&](const Tensor& t) {
        return ReferenceLoss(p, Image::FromTensor(t), target);
      },
      img.ToTensor(), grads.of(x), 1e-5);
  EXPECT_EQ(r.checked, img.size());
  EXPECT_LE(r.max_rel_error, 1e-4);
}

TEST(Gradients, ParameterGradientMatchesFiniteDifference) {
  const ModelConfig cfg = TinyConfig();
  const ModelParams p = ModelParams::Initialize(cfg, 6);
  const Image img = RandomImage(6, 9, 7);
  const Transcript target = {1};
  const std::vector<TrainSample> batch = {{img, target}};
  const BatchGradient bg = ComputeBatchGradient(p, batch);
  EXPECT_EQ(bg.used, 1u);
  EXPECT_NEAR(bg.mean_loss, ReferenceLoss(p, img, target), 1e-10);

  // Some recurrent weights carry gradients near 1e-8, where central
  // differences are dominated by roundoff; those get an absolute floor.
  constexpr double kStep = 1e-5, kRel = 1e-4, kFloor = 1e-6;
  for (const auto& [name, value] : p.tensors()) {
    const Tensor& analytic = bg.grads.at(name);
    for (std::size_t i = 0; i < value.size(); ++i) {
      ModelParams q = p;
      Tensor& t = q.mutable_tensors().at(name);
      t[i] = value[i] + kStep;
      const double up = ReferenceLoss(q, img, target);
      t[i] = value[i] - kStep;
      const double down = ReferenceLoss(q, img, target);
      const double numeric = (up - down) / (2 * kStep);
      const double scale =
          std::max(kFloor, std::abs(analytic[i]) + std::abs(numeric));
      EXPECT_LE(std::abs(analytic[i] - numeric), kRel * scale)
          << name << "[" << i << "] analytic " << analytic[i] << " numeric "
          << numeric;
    }
  }
}

TEST(Gradients, BatchGradientIsMeanOfSingles) {
  const ModelParams p = ModelParams::Initialize(TinyConfig(), 8);
  const std::vector<TrainSample> batch = {{RandomImage(6, 9, 1), {0}},
                                          {RandomImage(6, 12, 2), {1, 0}}};
  const BatchGradient both = ComputeBatchGradient(p, batch);
  const BatchGradient a = ComputeBatchGradient(p, {&batch[0], 1});
  const BatchGradient b = ComputeBatchGradient(p, {&batch[1], 1});
  EXPECT_NEAR(both.mean_loss, 0.5 * (a.mean_loss + b.mean_loss), 1e-12);
  const Tensor& g = both.grads.at("output.weight");
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(g[i], 0.5 * (a.grads.at("output.weight")[i] + b.grads.at("output.weight")[i]),
                1e-12);
  }
}

TEST(Training, MemorizesTwoWords) {
  const ModelConfig cfg;
  const std::vector<TrainSample> data = {
      {RenderLine("cab"), cfg.alphabet.Encode("cab")},
      {RenderLine("dog"), cfg.alphabet.Encode("dog")}};
  TrainConfig tc;
  tc.learning_rate = 1e-2;
  tc.batch_size = 2;
  tc.epochs = 200;
  tc.noise_augment_std = 0.0;
  const TrainResult r =
      Train(ModelParams::Initialize(cfg, 1), data, tc);
  EXPECT_EQ(r.steps, 200u);
  EXPECT_LT(r.loss_history.back(), 0.1);
  EXPECT_EQ(Recognize(r.params, RenderLine("cab")).text, "cab");
  EXPECT_EQ(Recognize(r.params, RenderLine("dog")).text, "dog");
}

TEST(Training, DeterministicForFixedSeed) {
  const ModelConfig cfg = TinyConfig();
  std::vector<TrainSample> data;
  for (int i = 0; i < 4; ++i) {
    data.push_back({RandomImage(6, 12, 20 + i), {i % 2}});
  }
  TrainConfig tc;
  tc.batch_size = 2;
  tc.epochs = 3;
  tc.width_jitter = 0.2;
  tc.degrade_prob = 0.5;
  tc.outlier_rate = 0.5;
  const TrainResult a = Train(ModelParams::Initialize(cfg, 2), data, tc);
  const TrainResult b = Train(ModelParams::Initialize(cfg, 2), data, tc);
  EXPECT_EQ(a.loss_history, b.loss_history);
  EXPECT_EQ(SerializeParams(a.params), SerializeParams(b.params));
}

TEST(Training, SkipsInfeasibleSamples) {
  const ModelConfig cfg = TinyConfig();
  // 6 columns -> 2 timesteps, too few for "aa".
  const std::vector<TrainSample> data = {{RandomImage(6, 6, 1), {0, 0}},
                                         {RandomImage(6, 9, 2), {1}}};
  TrainConfig tc;
  tc.epochs = 1;
  EXPECT_EQ(Train(ModelParams::Initialize(cfg, 1), data, tc).skipped, 1u);
  EXPECT_THROW(Train(ModelParams::Initialize(cfg, 1), {&data[0], 1}, tc),
               InvalidArgument);
}

TEST(Training, RejectsBadConfig) {
  const std::vector<TrainSample> data = {{RandomImage(6, 9, 2), {1}}};
  TrainConfig tc;
  tc.learning_rate = 0.0;
  EXPECT_THROW(Train(ModelParams::Initialize(TinyConfig(), 1), data, tc),
               InvalidArgument);
  tc = TrainConfig{};
  tc.outlier_rate = 1.5;
  EXPECT_THROW(Train(ModelParams::Initialize(TinyConfig(), 1), data, tc),
               InvalidArgument);
}

TEST(Weights, SerializeRoundTrip) {
  const ModelParams p = ModelParams::Initialize(TinyConfig(), 12);
  const ModelParams q = DeserializeParams(SerializeParams(p));
  EXPECT_EQ(q.config(), p.config());
  for (const auto& [name, t] : p.tensors()) {
    EXPECT_EQ(q.tensor(name).values(), t.values()) << name;
  }
}

TEST(Weights, FileRoundTripAndExpectedConfig) {
  const auto path =
      (std::filesystem::temp_directory_path() / "advocr_weights_test.bin")
          .string();
  const ModelParams p = ModelParams::Initialize(TinyConfig(), 12);
  SaveParams(path, p);
  EXPECT_EQ(SerializeParams(LoadParams(path, TinyConfig())),
            SerializeParams(p));
  // A model over a different alphabet has a different output layer.
  EXPECT_THROW(LoadParams(path, ModelConfig{}), ShapeError);
  ModelConfig other = TinyConfig();
  other.conv_channels = 3;
  EXPECT_THROW(LoadParams(path, other), ShapeError);
  std::remove(path.c_str());
  EXPECT_THROW(LoadParams(path), Error);
}

TEST(Weights, CorruptBytesThrowFormatError) {
  const std::string good = SerializeParams(ModelParams::Initialize(TinyConfig(), 1));
  std::string bad = good;
  bad[0] = 'X';
  EXPECT_THROW(DeserializeParams(bad), FormatError);
  EXPECT_THROW(DeserializeParams(good.substr(0, good.size() / 2)), FormatError);
  EXPECT_THROW(DeserializeParams(good + "!"), FormatError);
  EXPECT_THROW(DeserializeParams(""), FormatError);
}

TEST(Params, ValidateNamesBadTensor) {
  ModelParams p = ModelParams::Initialize(TinyConfig(), 1);
  p.mutable_tensors().at("output.weight") = Tensor({1, 1});
  EXPECT_THROW(p.Validate(), ShapeError);
}

TEST(NormalizeLine, ScalesToModelHeight) {
  const Image raw = RenderLine("scale", EmbeddedFont(), 8);  // 32 rows
  const Image n = NormalizeLine(raw, 24);
  EXPECT_EQ(n.height(), 24u);
  EXPECT_EQ(n.width(), raw.width() * 24 / 32);
  for (double v : n.pixels()) {
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 1.0);
  }
  const Image same = RenderLine("keep");
  EXPECT_EQ(NormalizeLine(same, 24), same);
}

TEST(NormalizeLine, RejectsBlankOrNarrow) {
  EXPECT_THROW(NormalizeLine(Image(24, 30), 24), InvalidArgument);
  EXPECT_THROW(NormalizeLine(Image(24, 2, -1.0), 24), InvalidArgument);
}

TEST(Decode, RejectionFollowsConfidence) {
  const Alphabet a("ab");
  const ProbLattice sure(2, 3, {0.9, 0.05, 0.05, 0.05, 0.05, 0.9});
  const Prediction p = DecodeLattice(sure, a);
  EXPECT_EQ(p.text, "a");
  EXPECT_NEAR(p.per_step_confidence, 0.9, 1e-12);
  EXPECT_FALSE(p.rejected);
  const ProbLattice flat(2, 3, std::vector<double>(6, 1.0 / 3));
  EXPECT_TRUE(DecodeLattice(flat, a).rejected);
  RecognizeOptions lax;
  lax.rejection_threshold = 0.2;
  EXPECT_FALSE(DecodeLattice(flat, a, lax).rejected);
}

}  // namespace
}  // namespace advocr
