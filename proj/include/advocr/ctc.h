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

#ifndef ADVOCR_CTC_H_
#define ADVOCR_CTC_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "advocr/tensor.h"

namespace advocr {

// Label indices into an Alphabet; never contains the blank index.
using Transcript = std::vector<int>;
// A per-timestep labelling over the alphabet plus blank.
using Path = std::vector<int>;

// Ordered set of distinct characters. The blank label is the extra index
// size(), so a lattice over this alphabet has size() + 1 columns.
class Alphabet {
 public:
  explicit Alphabet(std::string symbols);

  // 26 lowercase letters followed by the space character.
  static Alphabet LowercaseWithSpace();

  const std::string& symbols() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }
  int blank() const { return static_cast<int>(symbols_.size()); }
  std::size_t num_classes() const { return symbols_.size() + 1; }

  std::optional<int> IndexOf(char c) const;
  bool Contains(std::string_view text) const;
  // Throws InvalidArgument listing every character with no label.
  Transcript Encode(std::string_view text) const;
  std::string Decode(std::span<const int> labels) const;

  bool operator==(const Alphabet& other) const = default;

 private:
  std::string symbols_;
};

// M rows of probability vectors over the alphabet plus blank.
class ProbLattice {
 public:
  // Rows must each sum to 1 within 1e-9 with entries in [0, 1].
  ProbLattice(std::size_t timesteps, std::size_t num_classes,
              std::vector<double> probs);
  // Exponentiates a [M, K] tensor of log-probabilities.
  static ProbLattice FromLogProbs(const Tensor& log_probs);

  std::size_t timesteps() const { return timesteps_; }
  std::size_t num_classes() const { return num_classes_; }
  int blank() const { return static_cast<int>(num_classes_) - 1; }
  double at(std::size_t t, std::size_t k) const {
    return probs_[t * num_classes_ + k];
  }
  std::span<const double> row(std::size_t t) const {
    return std::span<const double>(probs_).subspan(t * num_classes_,
                                                   num_classes_);
  }
  const std::vector<double>& probs() const { return probs_; }
  // Elementwise natural log as a [M, K] tensor.
  Tensor LogProbs() const;
  // Mean over timesteps of the largest row probability.
  double MeanMaxProbability() const;

 private:
  std::size_t timesteps_;
  std::size_t num_classes_;
  std::vector<double> probs_;
};

// Removes adjacent duplicates, then blanks.
Transcript Collapse(std::span<const int> path, int blank);

// Shortest path length able to spell `target`: one step per label plus a
// separating blank between each adjacent repeated pair.
std::size_t MinTimesteps(std::span<const int> target);

// Every length-`timesteps` path over `num_classes` labels (the last one being
// blank) that collapses to `target`. Oracle-scale only: refuses
// timesteps > 12 or more than 4 non-blank labels.
std::vector<Path> EnumerateAlignments(std::span<const int> target,
                                      std::size_t timesteps,
                                      std::size_t num_classes);

struct CtcResult {
  // -log p(target | lattice).
  double loss = 0.0;
  // d loss / d log-probability, shaped like the lattice. Equals minus the
  // posterior occupancy of each (timestep, label).
  Tensor grad;
};

// Forward-backward over the blank-extended target in log space. Throws
// InfeasibleTargetError when the lattice has fewer than MinTimesteps rows.
// The blank is the last column.
CtcResult CtcLossFromLogProbs(const Tensor& log_probs,
                              std::span<const int> target);
CtcResult CtcLoss(const ProbLattice& lattice, std::span<const int> target);

// Per-timestep argmax (lowest index wins ties), then collapse.
Transcript GreedyDecode(const ProbLattice& lattice);

struct BeamResult {
  Transcript transcript;
  // Log of the probability mass of the transcript's alignments that stayed
  // inside the beam.
  double log_score = 0.0;
};

// Prefix beam search. Prefixes are merged after collapse; pruning keeps the
// `beam_width` most probable prefixes, breaking ties lexicographically.
BeamResult BeamDecode(const ProbLattice& lattice, std::size_t beam_width);

}  // namespace advocr

#endif  // ADVOCR_CTC_H_
