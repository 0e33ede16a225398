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

#ifndef ADVOCR_ATTACK_H_
#define ADVOCR_ATTACK_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "advocr/ctc.h"
#include "advocr/image.h"
#include "advocr/recognizer.h"
#include "advocr/render.h"
#include "advocr/tensor.h"

namespace advocr {

struct AttackConfig {
  // Weight of the CTC term against the squared L2 distance.
  double c = 20.0;
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t max_iterations = 1000;
  double x_min = -1.0;
  double x_max = 1.0;
  // Saturated pixels are pulled this far inside the box before atanh.
  double atanh_margin = 1e-6;
  // Stop at the first iterate that decodes to the target unrejected.
  bool early_stop = true;
  // Judge and return iterates after an 8-bit PGM round trip, so a reported
  // success survives export.
  bool quantize_output = true;
  // Non-empty: average the CTC term over these rescaling factors.
  std::vector<double> eot_scales;
  RecognizeOptions recognize;

  double alpha() const { return (x_max - x_min) / 2.0; }
  double beta() const { return (x_max + x_min) / 2.0; }
  void Validate() const;
};

// Named hyperparameter sets: "word-pairs", "sentiment", "categorization",
// "poisoning". Throws InvalidArgument for other names.
AttackConfig AttackPreset(std::string_view name);
std::vector<std::string> AttackPresetNames();

// x' = alpha * tanh(omega) + beta, so x' stays strictly inside the box.
struct AttackState {
  Image clean;
  Tensor omega;  // [height, width]
  AttackConfig config;

  Image Current() const;
};

AttackState InitState(const Image& clean, const AttackConfig& config);

struct AttackResult {
  Image adversarial;
  bool success = false;
  Transcript decoded;
  std::string decoded_text;
  bool rejected = false;
  double confidence = 0.0;
  double l2 = 0.0;
  // Optimizer steps taken before the returned iterate.
  std::size_t iterations_used = 0;
  // Objective of every evaluated iterate, starting with the initial one.
  std::vector<double> objective_trace;
};

// Targeted attack on a line image already at the model's input height.
// Throws InfeasibleTargetError (before optimizing) when the image has too few
// timesteps for the target, InvalidArgument for an empty target.
AttackResult AttackLine(const ModelParams& params, const Image& clean,
                        std::span<const int> target,
                        const AttackConfig& config);

// As AttackLine, but requires config.eot_scales (each in [0.5, 2]).
AttackResult AttackLineEot(const ModelParams& params, const Image& clean,
                           std::span<const int> target,
                           const AttackConfig& config);

// Rescale by `factor` then recognize (which renormalizes the height).
Prediction RecognizeRescaled(const ModelParams& params, const Image& image,
                             double factor,
                             const RecognizeOptions& options = {});

struct LineEdit {
  std::size_t line_index = 0;
  Transcript target;
};

struct LineAttackOutcome {
  std::size_t line_index = 0;
  std::optional<AttackResult> result;
  std::string error;  // set when the line could not be attacked
};

struct DocumentAttackResult {
  Image image;
  std::vector<LineAttackOutcome> lines;  // in edit order
};

// Attacks the listed lines in place; every other pixel is copied unchanged.
// Throws InvalidArgument for an out-of-range or repeated line index.
DocumentAttackResult AttackDocument(const ModelParams& params,
                                    const Image& doc,
                                    std::span<const LineBox> boxes,
                                    std::span<const LineEdit> edits,
                                    const AttackConfig& config);

struct WordPair {
  std::string clean;
  std::string target;
};

struct SuiteRow {
  std::size_t id = 0;
  std::string clean_text;
  std::string target_text;
  bool clean_correct = false;
  std::string decoded;
  bool success = false;
  bool rejected = false;
  double l2 = 0.0;
  std::size_t iterations = 0;
  std::string error;
  Image adversarial;
};

struct SuiteMetrics {
  double clean_acc = 0.0;
  // Fraction of pairs whose adversarial image decodes to the target and is
  // not rejected.
  double target_acc = 0.0;
  double rejected_rate = 0.0;
  double avg_l2 = 0.0;
  std::size_t count = 0;
};

struct SuiteReport {
  std::vector<SuiteRow> rows;
  SuiteMetrics metrics;
};

// Renders each clean word, attacks it toward its target and aggregates.
// Throws InvalidArgument for an empty pair list.
SuiteReport EvaluateSuite(const ModelParams& params,
                          std::span<const WordPair> pairs,
                          const AttackConfig& config);

// Columns: id, clean_text, target_text, decoded, success, rejected, l2,
// iterations.
void WriteSuiteCsv(std::ostream& out, std::span<const SuiteRow> rows);
void WriteSuiteJsonl(std::ostream& out, std::span<const SuiteRow> rows);

// Euclidean pixel distance; throws ShapeError on mismatched shapes.
double L2(const Image& a, const Image& b);

struct RejectionSample {
  double l2 = 0.0;
  bool rejected = false;
};

struct RejectionBin {
  double l2_min = 0.0;
  double l2_max = 0.0;
  std::size_t count = 0;
  std::size_t rejected = 0;
  double rate() const {
    return count == 0 ? 0.0 : static_cast<double>(rejected) / count;
  }
};

// Sorts by L2 and splits into `bins` groups of (nearly) equal count.
std::vector<RejectionBin> BinByL2(std::vector<RejectionSample> samples,
                                  std::size_t bins);

}  // namespace advocr

#endif  // ADVOCR_ATTACK_H_
