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

#include "advocr/recognizer.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include "advocr/error.h"
#include "advocr/resample.h"

namespace advocr {

void ModelConfig::Validate() const {
  if (input_height == 0 || input_height % 3 != 0) {
    throw InvalidArgument("input height must be a positive multiple of 3, got " +
                          std::to_string(input_height));
  }
  if (conv_channels == 0 || vertical_hidden == 0 || horizontal_hidden == 0) {
    throw InvalidArgument("layer sizes must be at least 1");
  }
}

std::map<std::string, Shape> ModelParams::ExpectedShapes(
    const ModelConfig& c) {
  const std::size_t ch = c.conv_channels, hv = c.vertical_hidden,
                    hh = c.horizontal_hidden, k = c.num_outputs();
  return {
      {"conv.kernel", {3, 3, 1, ch}},
      {"conv.bias", {ch}},
      {"vertical.weight", {4 * hv, ch + hv}},
      {"vertical.bias", {4 * hv}},
      {"forward.weight", {4 * hh, hv + hh}},
      {"forward.bias", {4 * hh}},
      {"reverse.weight", {4 * hh, hv + hh}},
      {"reverse.bias", {4 * hh}},
      {"output.weight", {k, 2 * hh}},
      {"output.bias", {k}},
  };
}

ModelParams::ModelParams(ModelConfig config,
                         std::map<std::string, Tensor> tensors)
    : config_(std::move(config)), tensors_(std::move(tensors)) {
  config_.Validate();
  Validate();
}

ModelParams ModelParams::Initialize(const ModelConfig& config,
                                    std::uint64_t seed) {
  config.Validate();
  std::mt19937_64 rng(seed);
  std::map<std::string, Tensor> tensors;
  for (const auto& [name, shape] : ExpectedShapes(config)) {
    Tensor t(shape);
    const bool is_bias = name.ends_with(".bias");
    if (!is_bias) {
      double limit = 0.0;
      if (name == "conv.kernel") {
        limit = std::sqrt(6.0 / (9.0 * (shape[2] + shape[3])));
      } else if (name == "output.weight") {
        limit = std::sqrt(6.0 / static_cast<double>(shape[0] + shape[1]));
      } else {
        limit = 1.0 / std::sqrt(static_cast<double>(shape[0] / 4));
      }
      std::uniform_real_distribution<double> dist(-limit, limit);
      for (double& v : t.data()) v = dist(rng);
    } else if (name != "conv.bias" && name != "output.bias") {
      // Forget-gate block of an LSTM bias.
      const std::size_t hidden = shape[0] / 4;
      for (std::size_t j = hidden; j < 2 * hidden; ++j) t[j] = 1.0;
    }
    tensors.emplace(name, std::move(t));
  }
  return ModelParams(config, std::move(tensors));
}

const Tensor& ModelParams::tensor(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw InvalidArgument("no parameter named " + name);
  return it->second;
}

std::size_t ModelParams::ParameterCount() const {
  std::size_t n = 0;
  for (const auto& [name, t] : tensors_) n += t.size();
  return n;
}

void ModelParams::Validate() const {
  const auto expected = ExpectedShapes(config_);
  for (const auto& [name, shape] : expected) {
    auto it = tensors_.find(name);
    if (it == tensors_.end()) {
      throw ShapeError("model", "missing parameter " + name);
    }
    if (it->second.shape() != shape) {
      throw ShapeError("model", "parameter " + name + " has shape " +
                                    ShapeToString(it->second.shape()) +
                                    " but the configuration requires " +
                                    ShapeToString(shape));
    }
    for (double v : it->second.data()) {
      if (!std::isfinite(v)) {
        throw InvalidArgument("parameter " + name + " is not finite");
      }
    }
  }
  if (tensors_.size() != expected.size()) {
    throw ShapeError("model", "unexpected extra parameters");
  }
}

Image NormalizeLine(const Image& raw, std::size_t height) {
  if (raw.width() < 3) {
    throw InvalidArgument("line image must be at least 3 pixels wide, got " +
                          std::to_string(raw.width()));
  }
  const bool has_ink = std::any_of(raw.pixels().begin(), raw.pixels().end(),
                                   [](double v) { return v < 0.0; });
  if (!has_ink) throw InvalidArgument("line image is blank (no ink)");
  if (raw.height() == height) return raw;
  const ResampleMap map(raw.height(), raw.width(), height,
                        ScaledWidth(raw.height(), raw.width(), height));
  Image out = map.Apply(raw);
  for (double& v : out.pixels()) v = std::clamp(v, -1.0, 1.0);
  return out;
}

namespace {

// Runs an LSTM over a sequence of [batch, in] inputs and returns the hidden
// state after every step.
std::vector<Node> RunLstm(Graph& g, std::span<const Node> inputs,
                          std::size_t batch, std::size_t hidden, Node w,
                          Node b) {
  Node h = g.Constant(Tensor({batch, hidden}));
  Node c = g.Constant(Tensor({batch, hidden}));
  std::vector<Node> states;
  states.reserve(inputs.size());
  for (Node x : inputs) {
    const Node out = g.LstmStep(x, h, c, w, b);
    h = g.Slice(out, 1, 0, hidden);
    c = g.Slice(out, 1, hidden, 2 * hidden);
    states.push_back(h);
  }
  return states;
}

}  // namespace

ForwardNodes BuildForward(Graph& g, const ModelParams& params, Node image,
                          bool trainable) {
  const ModelConfig& cfg = params.config();
  const Tensor& img = g.value(image);
  if (img.rank() != 2 || img.dim(0) != cfg.input_height) {
    throw ShapeError("forward", "image must be [" +
                                    std::to_string(cfg.input_height) +
                                    ", w], got " + ShapeToString(img.shape()));
  }
  if (img.dim(1) < 3) {
    throw ShapeError("forward", "image width " + std::to_string(img.dim(1)) +
                                    " gives no timesteps (need >= 3)");
  }
  ForwardNodes nodes;
  for (const auto& [name, t] : params.tensors()) {
    nodes.params[name] = trainable ? g.Leaf(t) : g.Constant(t);
  }
  auto p = [&nodes](const char* name) { return nodes.params.at(name); };

  const std::size_t h = img.dim(0), w = img.dim(1);
  const Node x = g.Reshape(image, {h, w, 1});
  const Node conv = g.Tanh(g.Conv2d3x3(x, p("conv.kernel"), p("conv.bias")));
  const Node pooled = g.MaxPool3x3Stride3(conv);
  const std::size_t rows = h / 3, steps = w / 3, ch = cfg.conv_channels;

  // Vertical pass: every pooled column is a sequence read top to bottom;
  // only the final state is kept.
  std::vector<Node> row_inputs;
  for (std::size_t r = 0; r < rows; ++r) {
    row_inputs.push_back(g.Reshape(g.Slice(pooled, 0, r, r + 1), {steps, ch}));
  }
  const Node columns =
      RunLstm(g, row_inputs, steps, cfg.vertical_hidden,
              p("vertical.weight"), p("vertical.bias"))
          .back();

  std::vector<Node> step_inputs;
  for (std::size_t t = 0; t < steps; ++t) {
    step_inputs.push_back(g.Slice(columns, 0, t, t + 1));
  }
  const std::vector<Node> fwd =
      RunLstm(g, step_inputs, 1, cfg.horizontal_hidden, p("forward.weight"),
              p("forward.bias"));
  std::vector<Node> reversed_inputs(step_inputs.rbegin(), step_inputs.rend());
  std::vector<Node> rev =
      RunLstm(g, reversed_inputs, 1, cfg.horizontal_hidden,
              p("reverse.weight"), p("reverse.bias"));
  std::reverse(rev.begin(), rev.end());

  const Node both[] = {g.Concat(fwd, 0), g.Concat(rev, 0)};
  const Node features = g.Concat(both, 1);
  const Node logits = g.Affine(features, p("output.weight"), p("output.bias"));
  nodes.log_probs = g.LogSoftmaxRows(logits);
  return nodes;
}

Node AddCtcLoss(Graph& g, Node log_probs, std::span<const int> target) {
  CtcResult ctc = CtcLossFromLogProbs(g.value(log_probs), target);
  const Node inputs[] = {log_probs};
  return g.Custom(inputs, Tensor::Scalar(ctc.loss),
                  [grad = std::move(ctc.grad)](
                      const Tensor& out_grad, std::span<Tensor* const> in) {
                    if (!in[0]) return;
                    for (std::size_t i = 0; i < grad.size(); ++i) {
                      (*in[0])[i] += out_grad[0] * grad[i];
                    }
                  });
}

ProbLattice Forward(const ModelParams& params, const Image& image) {
  Graph g;
  const Node img = g.Constant(image.ToTensor());
  return ProbLattice::FromLogProbs(
      g.value(BuildForward(g, params, img, /*trainable=*/false).log_probs));
}

Prediction DecodeLattice(const ProbLattice& lattice, const Alphabet& alphabet,
                         const RecognizeOptions& options) {
  const BeamResult beam = BeamDecode(lattice, options.beam_width);
  Prediction pred;
  pred.transcript = beam.transcript;
  pred.text = alphabet.Decode(beam.transcript);
  pred.score = beam.log_score;
  pred.per_step_confidence = lattice.MeanMaxProbability();
  pred.rejected = pred.per_step_confidence < options.rejection_threshold;
  return pred;
}

Prediction Recognize(const ModelParams& params, const Image& image,
                     const RecognizeOptions& options) {
  const Image line = NormalizeLine(image, params.config().input_height);
  return DecodeLattice(Forward(params, line), params.config().alphabet,
                       options);
}

}  // namespace advocr
