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

#ifndef ADVOCR_RECOGNIZER_H_
#define ADVOCR_RECOGNIZER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "advocr/ctc.h"
#include "advocr/graph.h"
#include "advocr/image.h"
#include "advocr/tensor.h"

namespace advocr {

// Layer sizes of the line recognizer:
//   conv 3x3 (tanh) -> maxpool 3x3 -> vertical LSTM keeping its last step
//   -> bidirectional horizontal LSTM -> affine -> softmax.
struct ModelConfig {
  std::size_t input_height = 24;
  std::size_t conv_channels = 8;
  std::size_t vertical_hidden = 24;
  std::size_t horizontal_hidden = 32;  // per direction
  Alphabet alphabet = Alphabet::LowercaseWithSpace();

  // Throws InvalidArgument unless input_height % 3 == 0 and sizes >= 1.
  void Validate() const;
  std::size_t Timesteps(std::size_t width) const { return width / 3; }
  std::size_t num_outputs() const { return alphabet.num_classes(); }

  bool operator==(const ModelConfig&) const = default;
};

class ModelParams {
 public:
  // Xavier-uniform weights, zero biases except a +1 LSTM forget-gate bias.
  static ModelParams Initialize(const ModelConfig& config, std::uint64_t seed);
  static std::map<std::string, Shape> ExpectedShapes(const ModelConfig& config);

  ModelParams(ModelConfig config, std::map<std::string, Tensor> tensors);

  const ModelConfig& config() const { return config_; }
  const std::map<std::string, Tensor>& tensors() const { return tensors_; }
  std::map<std::string, Tensor>& mutable_tensors() { return tensors_; }
  const Tensor& tensor(const std::string& name) const;
  std::size_t ParameterCount() const;

  // Throws ShapeError naming the first tensor inconsistent with the config.
  void Validate() const;

 private:
  ModelConfig config_;
  std::map<std::string, Tensor> tensors_;
};

// Scales a raw line image to the model height with bilinear interpolation,
// preserving aspect ratio and clamping to [-1, 1]. Images already at the
// target height are returned unchanged. Throws InvalidArgument for images
// narrower than 3 pixels or without ink.
Image NormalizeLine(const Image& raw, std::size_t height);

struct ForwardNodes {
  Node log_probs;                      // [timesteps, classes]
  std::map<std::string, Node> params;  // leaves or constants
};

// Appends the recognizer to `g` on top of an image node of shape [h, w].
// With `trainable` the parameters become differentiable leaves.
ForwardNodes BuildForward(Graph& g, const ModelParams& params, Node image,
                          bool trainable);

// Appends -log p(target | lattice) as a custom op on a log-probability node.
Node AddCtcLoss(Graph& g, Node log_probs, std::span<const int> target);

// Lattice for an image already at the model height.
ProbLattice Forward(const ModelParams& params, const Image& image);

struct RecognizeOptions {
  std::size_t beam_width = 8;
  double rejection_threshold = 0.5;
};

struct Prediction {
  Transcript transcript;
  std::string text;
  // Mean over timesteps of the largest class probability.
  double per_step_confidence = 0.0;
  double score = 0.0;  // beam log-score
  // Emulated engine refusal: confidence below the rejection threshold.
  bool rejected = false;
};

Prediction DecodeLattice(const ProbLattice& lattice, const Alphabet& alphabet,
                         const RecognizeOptions& options = {});

// normalize -> forward -> beam search -> rejection rule.
Prediction Recognize(const ModelParams& params, const Image& image,
                     const RecognizeOptions& options = {});

struct TrainSample {
  Image image;
  Transcript target;
  // Noise image with no text: trained toward uniform output rows instead of
  // a CTC target, so the confidence statistic drops on garbage input.
  bool outlier = false;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t batch_size = 16;
  std::size_t epochs = 10;
  std::uint64_t seed = 1;
  // Gaussian pixel noise added to every sample each epoch, then clamped.
  double noise_augment_std = 0.05;
  // Per-epoch geometric/photometric augmentation, applied before the noise.
  // Each sample is stretched horizontally by a factor drawn from
  // [1 - width_jitter, 1 + width_jitter] (kept unstretched when that would
  // leave too few timesteps for its target) ...
  double width_jitter = 0.0;
  // ... and with this probability blurred by a random 3x3 box-filter mix and
  // contrast-scaled by a factor in [0.4, 1].
  double degrade_prob = 0.0;
  // Up to this many columns of background added to or trimmed from each
  // side (trimming only removes columns without ink).
  std::size_t pad_jitter = 0;
  // Per regular sample, probability of also drawing an outlier: uniform
  // noise, or the sample buried under Gaussian noise of std in
  // [outlier_min_std, outlier_max_std].
  double outlier_rate = 0.0;
  double outlier_min_std = 0.6;
  double outlier_max_std = 1.5;
  // Rescales the batch gradient when its norm exceeds this; 0 disables.
  double max_grad_norm = 0.0;
  // Called after every epoch with its mean loss.
  std::function<void(std::size_t epoch, double mean_loss)> on_epoch;
};

struct TrainResult {
  ModelParams params;
  std::vector<double> loss_history;  // per-epoch mean batch loss
  std::size_t skipped = 0;           // infeasible samples
  std::size_t steps = 0;
};

TrainResult Train(ModelParams params, std::span<const TrainSample> dataset,
                  const TrainConfig& config);

// Mean CTC loss and gradient over a set of samples at fixed parameters.
// Gradients are summed in index order; the result is independent of any
// evaluation order.
struct BatchGradient {
  double mean_loss = 0.0;
  std::map<std::string, Tensor> grads;
  std::size_t used = 0;
};
BatchGradient ComputeBatchGradient(const ModelParams& params,
                                   std::span<const TrainSample> batch);

// Little-endian "CTCM" weight file; see docs/weights-format.md.
inline constexpr std::uint32_t kWeightFormatVersion = 1;
std::string SerializeParams(const ModelParams& params);
ModelParams DeserializeParams(std::string_view bytes);
void SaveParams(const std::string& path, const ModelParams& params);
ModelParams LoadParams(const std::string& path);
// Additionally requires the stored configuration to equal `expected`.
ModelParams LoadParams(const std::string& path, const ModelConfig& expected);

}  // namespace advocr

#endif  // ADVOCR_RECOGNIZER_H_
