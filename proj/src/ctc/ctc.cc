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

#include "advocr/ctc.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "advocr/error.h"

namespace advocr {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double LogAdd(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

Alphabet::Alphabet(std::string symbols) : symbols_(std::move(symbols)) {
  std::set<char> seen;
  for (char c : symbols_) {
    if (!seen.insert(c).second) {
      throw InvalidArgument(std::string("alphabet repeats symbol '") + c + "'");
    }
  }
  if (symbols_.empty()) throw InvalidArgument("alphabet is empty");
}

Alphabet Alphabet::LowercaseWithSpace() {
  return Alphabet("abcdefghijklmnopqrstuvwxyz ");
}

std::optional<int> Alphabet::IndexOf(char c) const {
  const auto pos = symbols_.find(c);
  if (pos == std::string::npos) return std::nullopt;
  return static_cast<int>(pos);
}

bool Alphabet::Contains(std::string_view text) const {
  return std::all_of(text.begin(), text.end(),
                     [this](char c) { return IndexOf(c).has_value(); });
}

Transcript Alphabet::Encode(std::string_view text) const {
  Transcript out;
  out.reserve(text.size());
  std::string missing;
  for (char c : text) {
    if (auto idx = IndexOf(c)) {
      out.push_back(*idx);
    } else if (missing.find(c) == std::string::npos) {
      missing += c;
    }
  }
  if (!missing.empty()) {
    throw InvalidArgument("characters not in alphabet: \"" + missing + "\"");
  }
  return out;
}

std::string Alphabet::Decode(std::span<const int> labels) const {
  std::string out;
  out.reserve(labels.size());
  for (int l : labels) {
    if (l < 0 || l >= static_cast<int>(symbols_.size())) {
      throw InvalidArgument("label " + std::to_string(l) +
                            " outside alphabet of size " +
                            std::to_string(symbols_.size()));
    }
    out += symbols_[l];
  }
  return out;
}

ProbLattice::ProbLattice(std::size_t timesteps, std::size_t num_classes,
                         std::vector<double> probs)
    : timesteps_(timesteps), num_classes_(num_classes),
      probs_(std::move(probs)) {
  if (timesteps_ == 0 || num_classes_ < 2) {
    throw ShapeError("lattice", "need at least one timestep and two classes");
  }
  if (probs_.size() != timesteps_ * num_classes_) {
    throw ShapeError("lattice", std::to_string(timesteps_) + "x" +
                                    std::to_string(num_classes_) +
                                    " lattice given " +
                                    std::to_string(probs_.size()) + " values");
  }
  for (std::size_t t = 0; t < timesteps_; ++t) {
    double total = 0.0;
    for (double p : row(t)) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidArgument("lattice row " + std::to_string(t) +
                              " has entry outside [0, 1]");
      }
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw InvalidArgument("lattice row " + std::to_string(t) + " sums to " +
                            std::to_string(total));
    }
  }
}

ProbLattice ProbLattice::FromLogProbs(const Tensor& log_probs) {
  if (log_probs.rank() != 2) {
    throw ShapeError("lattice", "log-probabilities must be [M, K], got " +
                                    ShapeToString(log_probs.shape()));
  }
  std::vector<double> probs(log_probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    probs[i] = std::exp(log_probs[i]);
  }
  return ProbLattice(log_probs.dim(0), log_probs.dim(1), std::move(probs));
}

Tensor ProbLattice::LogProbs() const {
  Tensor out({timesteps_, num_classes_});
  for (std::size_t i = 0; i < probs_.size(); ++i) out[i] = std::log(probs_[i]);
  return out;
}

double ProbLattice::MeanMaxProbability() const {
  double total = 0.0;
  for (std::size_t t = 0; t < timesteps_; ++t) {
    const auto r = row(t);
    total += *std::max_element(r.begin(), r.end());
  }
  return total / static_cast<double>(timesteps_);
}

Transcript Collapse(std::span<const int> path, int blank) {
  Transcript out;
  int prev = -1;
  for (int label : path) {
    if (label != prev && label != blank) out.push_back(label);
    prev = label;
  }
  return out;
}

std::size_t MinTimesteps(std::span<const int> target) {
  std::size_t need = target.size();
  for (std::size_t i = 1; i < target.size(); ++i) {
    if (target[i] == target[i - 1]) ++need;
  }
  return need;
}

std::vector<Path> EnumerateAlignments(std::span<const int> target,
                                      std::size_t timesteps,
                                      std::size_t num_classes) {
  if (timesteps > 12 || num_classes > 5 || num_classes < 2) {
    throw InvalidArgument(
        "alignment enumeration is limited to 12 timesteps and 4 labels");
  }
  const int blank = static_cast<int>(num_classes) - 1;
  std::vector<Path> out;
  Path path(timesteps, 0);
  const std::size_t total = static_cast<std::size_t>(
      std::pow(static_cast<double>(num_classes), static_cast<double>(timesteps)));
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t rest = code;
    for (std::size_t t = timesteps; t-- > 0;) {
      path[t] = static_cast<int>(rest % num_classes);
      rest /= num_classes;
    }
    const Transcript c = Collapse(path, blank);
    if (std::equal(c.begin(), c.end(), target.begin(), target.end())) {
      out.push_back(path);
    }
  }
  return out;
}

CtcResult CtcLossFromLogProbs(const Tensor& log_probs,
                              std::span<const int> target) {
  if (log_probs.rank() != 2) {
    throw ShapeError("ctc_loss", "log-probabilities must be [M, K], got " +
                                     ShapeToString(log_probs.shape()));
  }
  const std::size_t steps = log_probs.dim(0), classes = log_probs.dim(1);
  const int blank = static_cast<int>(classes) - 1;
  for (int l : target) {
    if (l < 0 || l >= blank) {
      throw InvalidArgument("target label " + std::to_string(l) +
                            " is not a non-blank class of a " +
                            std::to_string(classes) + "-class lattice");
    }
  }
  const std::size_t need = MinTimesteps(target);
  if (steps < need) throw InfeasibleTargetError(need, steps);

  const std::size_t ext = 2 * target.size() + 1;
  std::vector<int> labels(ext, blank);
  for (std::size_t i = 0; i < target.size(); ++i) labels[2 * i + 1] = target[i];
  auto lp = [&](std::size_t t, std::size_t s) {
    return log_probs[t * classes + labels[s]];
  };
  auto can_skip = [&](std::size_t s) {
    return s >= 2 && labels[s] != blank && labels[s] != labels[s - 2];
  };

  std::vector<double> alpha(steps * ext, kNegInf);
  std::vector<double> beta(steps * ext, kNegInf);
  alpha[0] = lp(0, 0);
  if (ext > 1) alpha[1] = lp(0, 1);
  for (std::size_t t = 1; t < steps; ++t) {
    const double* prev = alpha.data() + (t - 1) * ext;
    double* cur = alpha.data() + t * ext;
    for (std::size_t s = 0; s < ext; ++s) {
      double acc = prev[s];
      if (s >= 1) acc = LogAdd(acc, prev[s - 1]);
      if (can_skip(s)) acc = LogAdd(acc, prev[s - 2]);
      cur[s] = acc == kNegInf ? kNegInf : acc + lp(t, s);
    }
  }
  const std::size_t last = steps - 1;
  beta[last * ext + ext - 1] = lp(last, ext - 1);
  if (ext > 1) beta[last * ext + ext - 2] = lp(last, ext - 2);
  for (std::size_t t = last; t-- > 0;) {
    const double* next = beta.data() + (t + 1) * ext;
    double* cur = beta.data() + t * ext;
    for (std::size_t s = 0; s < ext; ++s) {
      double acc = next[s];
      if (s + 1 < ext) acc = LogAdd(acc, next[s + 1]);
      if (s + 2 < ext && can_skip(s + 2)) acc = LogAdd(acc, next[s + 2]);
      cur[s] = acc == kNegInf ? kNegInf : acc + lp(t, s);
    }
  }

  double log_p = alpha[last * ext + ext - 1];
  if (ext > 1) log_p = LogAdd(log_p, alpha[last * ext + ext - 2]);

  CtcResult result;
  result.grad = Tensor({steps, classes});
  if (log_p == kNegInf) {
    result.loss = std::numeric_limits<double>::infinity();
    return result;
  }
  result.loss = -log_p;
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t s = 0; s < ext; ++s) {
      const double a = alpha[t * ext + s], b = beta[t * ext + s];
      if (a == kNegInf || b == kNegInf) continue;
      const double occupancy = std::exp(a + b - lp(t, s) - log_p);
      result.grad[t * classes + labels[s]] -= occupancy;
    }
  }
  return result;
}

CtcResult CtcLoss(const ProbLattice& lattice, std::span<const int> target) {
  return CtcLossFromLogProbs(lattice.LogProbs(), target);
}

Transcript GreedyDecode(const ProbLattice& lattice) {
  Path path(lattice.timesteps());
  for (std::size_t t = 0; t < lattice.timesteps(); ++t) {
    const auto r = lattice.row(t);
    path[t] = static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
  }
  return Collapse(path, lattice.blank());
}

namespace {

// Prefix tree shared by all beam entries; a prefix is identified by its node.
class PrefixTrie {
 public:
  PrefixTrie() { nodes_.push_back({-1, -1, {}}); }

  int Child(int node, int label) {
    for (auto [l, child] : nodes_[node].children) {
      if (l == label) return child;
    }
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({node, label, {}});
    nodes_[node].children.emplace_back(label, id);
    return id;
  }
  int label(int node) const { return nodes_[node].label; }
  std::size_t size() const { return nodes_.size(); }

  Transcript Spell(int node) const {
    Transcript out;
    for (; node > 0; node = nodes_[node].parent) out.push_back(nodes_[node].label);
    std::reverse(out.begin(), out.end());
    return out;
  }

 private:
  struct Entry {
    int parent;
    int label;
    std::vector<std::pair<int, int>> children;
  };
  std::vector<Entry> nodes_;
};

}  // namespace

BeamResult BeamDecode(const ProbLattice& lattice, std::size_t beam_width) {
  if (beam_width == 0) throw InvalidArgument("beam width must be at least 1");
  const std::size_t classes = lattice.num_classes();
  const int blank = lattice.blank();
  const Tensor log_probs = lattice.LogProbs();

  PrefixTrie trie;
  struct Scores {
    double blank = kNegInf;
    double non_blank = kNegInf;
  };
  std::vector<Scores> scores(1);
  std::vector<Scores> next_scores;
  std::vector<int> beam = {0};
  scores[0].blank = 0.0;
  std::vector<int> touched;

  for (std::size_t t = 0; t < lattice.timesteps(); ++t) {
    const double* lp = log_probs.data().data() + t * classes;
    next_scores.assign(trie.size(), Scores{});
    touched.clear();
    auto touch = [&](int node) -> Scores& {
      if (static_cast<std::size_t>(node) >= next_scores.size()) {
        next_scores.resize(trie.size());
      }
      Scores& s = next_scores[node];
      if (s.blank == kNegInf && s.non_blank == kNegInf) touched.push_back(node);
      return s;
    };
    for (int prefix : beam) {
      const Scores cur = scores[prefix];
      const double total = LogAdd(cur.blank, cur.non_blank);
      const int last = trie.label(prefix);
      if (lp[blank] != kNegInf) {
        Scores& s = touch(prefix);
        s.blank = LogAdd(s.blank, total + lp[blank]);
      }
      if (last >= 0 && lp[last] != kNegInf && cur.non_blank != kNegInf) {
        Scores& s = touch(prefix);
        s.non_blank = LogAdd(s.non_blank, cur.non_blank + lp[last]);
      }
      for (int k = 0; k < blank; ++k) {
        if (lp[k] == kNegInf) continue;
        const double from = k == last ? cur.blank : total;
        if (from == kNegInf) continue;
        const int child = trie.Child(prefix, k);
        Scores& s = touch(child);
        s.non_blank = LogAdd(s.non_blank, from + lp[k]);
      }
    }
    std::vector<std::pair<double, int>> ranked;
    ranked.reserve(touched.size());
    for (int node : touched) {
      const Scores& s = next_scores[node];
      ranked.emplace_back(LogAdd(s.blank, s.non_blank), node);
    }
    std::sort(ranked.begin(), ranked.end(),
              [&trie](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return trie.Spell(a.second) < trie.Spell(b.second);
              });
    if (ranked.size() > beam_width) ranked.resize(beam_width);
    beam.clear();
    scores.assign(trie.size(), Scores{});
    for (auto [score, node] : ranked) {
      beam.push_back(node);
      scores[node] = next_scores[node];
    }
    if (beam.empty()) break;
  }

  BeamResult result;
  if (beam.empty()) {
    result.log_score = kNegInf;
    return result;
  }
  result.transcript = trie.Spell(beam.front());
  result.log_score = LogAdd(scores[beam.front()].blank,
                            scores[beam.front()].non_blank);
  return result;
}

}  // namespace advocr
