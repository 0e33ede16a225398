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

#include "advocr/attack.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <set>

#include "advocr/adam.h"
#include "advocr/error.h"
#include "advocr/graph.h"
#include "advocr/render.h"
#include "advocr/reports.h"
#include "advocr/resample.h"
#include "json.hpp"

namespace advocr {

void AttackConfig::Validate() const {
  if (!(c >= 0.0)) throw InvalidArgument("attack c must be >= 0");
  if (!(learning_rate > 0.0)) {
    throw InvalidArgument("attack learning rate must be positive");
  }
  if (!(x_max > x_min)) throw InvalidArgument("x_max must exceed x_min");
  if (!(atanh_margin > 0.0 && atanh_margin < 1.0)) {
    throw InvalidArgument("atanh margin must lie in (0, 1)");
  }
  for (double s : eot_scales) {
    if (!(s >= 0.5 && s <= 2.0)) {
      throw InvalidArgument("EOT scale " + std::to_string(s) +
                            " outside [0.5, 2]");
    }
  }
}

AttackConfig AttackPreset(std::string_view name) {
  AttackConfig cfg;
  if (name == "word-pairs") {
    cfg.c = 20.0;
  } else if (name == "sentiment") {
    // Whole sentences need glyph insertions far from the line start; the
    // word-level step size converges too slowly for 1000 iterations.
    cfg.c = 25.0;
    cfg.learning_rate = 0.02;
  } else if (name == "categorization") {
    cfg.c = 30.0;
    cfg.learning_rate = 0.02;
    cfg.max_iterations = 2000;
  } else if (name == "poisoning") {
    cfg.c = 200.0;
    cfg.learning_rate = 0.02;
    cfg.max_iterations = 2000;
  } else {
    throw InvalidArgument("unknown attack preset \"" + std::string(name) +
                          "\"");
  }
  return cfg;
}

std::vector<std::string> AttackPresetNames() {
  return {"word-pairs", "sentiment", "categorization", "poisoning"};
}

Image AttackState::Current() const {
  Image out(clean.height(), clean.width());
  const double a = config.alpha(), b = config.beta();
  for (std::size_t i = 0; i < omega.size(); ++i) {
    out.pixels()[i] = a * std::tanh(omega[i]) + b;
  }
  return out;
}

AttackState InitState(const Image& clean, const AttackConfig& config) {
  config.Validate();
  if (clean.size() == 0) throw InvalidArgument("attack image is empty");
  const double a = config.alpha(), b = config.beta();
  const double lim = 1.0 - config.atanh_margin;
  Tensor omega({clean.height(), clean.width()});
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const double v = clean.pixels()[i];
    if (!(v >= config.x_min && v <= config.x_max)) {
      throw InvalidArgument("clean pixel " + std::to_string(v) +
                            " outside the attack box");
    }
    omega[i] = std::atanh(std::clamp((v - b) / a, -lim, lim));
  }
  return AttackState{.clean = clean, .omega = std::move(omega),
                     .config = config};
}

namespace {

// Rescale by `factor`, then bring the height back to the model's.
struct ScalePath {
  double factor = 1.0;
  std::optional<ResampleMap> up;
  std::optional<ResampleMap> back;
  std::size_t width = 0;  // of the normalized result
};

ScalePath MakeScalePath(std::size_t h, std::size_t w, double factor) {
  ScalePath p;
  p.factor = factor;
  if (factor == 1.0) {
    p.width = w;
    return p;
  }
  const auto sh = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::round(h * factor)));
  const auto sw = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::round(w * factor)));
  p.up.emplace(h, w, sh, sw);
  p.width = ScaledWidth(sh, sw, h);
  p.back.emplace(sh, sw, h, p.width);
  return p;
}

struct Evaluation {
  double objective = 0.0;
  Tensor grad;
  std::optional<ProbLattice> lattice;  // of the unscaled iterate
};

Evaluation Evaluate(const ModelParams& params, const AttackState& state,
                    std::span<const int> target,
                    std::span<const ScalePath> paths, bool want_grad) {
  const AttackConfig& cfg = state.config;
  Graph g;
  const Node omega = g.Leaf(state.omega);
  const Node xp = g.Shift(g.Scale(g.Tanh(omega), cfg.alpha()), cfg.beta());

  Evaluation ev;
  std::optional<Node> ctc_sum;
  for (const ScalePath& p : paths) {
    Node img = xp;
    if (p.up) img = p.back->Apply(g, p.up->Apply(g, xp));
    const Node lp = BuildForward(g, params, img, /*trainable=*/false).log_probs;
    if (p.factor == 1.0 && !ev.lattice) {
      ev.lattice = ProbLattice::FromLogProbs(g.value(lp));
    }
    const Node ctc = AddCtcLoss(g, lp, target);
    ctc_sum = ctc_sum ? g.Add(*ctc_sum, ctc) : ctc;
  }
  const Node ctc_mean =
      g.Scale(*ctc_sum, 1.0 / static_cast<double>(paths.size()));
  const Node dist = g.SumSquares(g.Sub(xp, g.Constant(state.clean.ToTensor())));
  const Node objective = g.Add(g.Scale(ctc_mean, cfg.c), dist);
  ev.objective = g.value(objective).item();
  if (!ev.lattice) ev.lattice = Forward(params, state.Current());
  if (want_grad) ev.grad = g.Backward(objective).of(omega);
  return ev;
}

Image Quantize8(const Image& img) { return DecodePgm(EncodePgm(img)); }

AttackResult RunAttack(const ModelParams& params, const Image& clean,
                       std::span<const int> target, const AttackConfig& config,
                       std::span<const double> scales) {
  config.Validate();
  const ModelConfig& mc = params.config();
  if (target.empty()) throw InvalidArgument("attack target is empty");
  for (int label : target) {
    if (label < 0 || static_cast<std::size_t>(label) >= mc.alphabet.size()) {
      throw InvalidArgument("target label " + std::to_string(label) +
                            " outside the alphabet");
    }
  }
  if (clean.height() != mc.input_height) {
    throw ShapeError("attack", "line height " + std::to_string(clean.height()) +
                                   " differs from model input height " +
                                   std::to_string(mc.input_height));
  }
  std::vector<ScalePath> paths;
  const std::size_t need = MinTimesteps(target);
  for (double s : scales) {
    paths.push_back(MakeScalePath(clean.height(), clean.width(), s));
    const std::size_t steps = paths.back().width < 3
                                  ? 0
                                  : mc.Timesteps(paths.back().width);
    if (steps < need) throw InfeasibleTargetError(need, steps);
  }

  AttackState state = InitState(clean, config);
  Adam adam(state.omega.size(),
            AdamOptions{.learning_rate = config.learning_rate,
                        .beta1 = config.beta1,
                        .beta2 = config.beta2,
                        .epsilon = config.epsilon});
  const Transcript goal(target.begin(), target.end());

  AttackResult best;
  bool have_best = false;
  double best_objective = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0;; ++it) {
    const bool last = it == config.max_iterations;
    Evaluation ev = Evaluate(params, state, target, paths, !last);
    best.objective_trace.push_back(ev.objective);
    Prediction pred =
        DecodeLattice(*ev.lattice, mc.alphabet, config.recognize);
    bool success = pred.transcript == goal && !pred.rejected;
    Image current = state.Current();
    if (success && config.quantize_output) {
      current = Quantize8(current);
      pred = Recognize(params, current, config.recognize);
      success = pred.transcript == goal && !pred.rejected;
    }
    const double l2 = L2Distance(clean, current);
    bool take = false;
    if (success) {
      take = !best.success || l2 < best.l2;
    } else if (!best.success) {
      take = !have_best || ev.objective < best_objective;
    }
    if (take) {
      have_best = true;
      best_objective = ev.objective;
      best.adversarial = current;
      best.success = success;
      best.decoded = pred.transcript;
      best.decoded_text = pred.text;
      best.rejected = pred.rejected;
      best.confidence = pred.per_step_confidence;
      best.l2 = l2;
      best.iterations_used = it;
    }
    if (last || (success && config.early_stop)) break;
    adam.Step(state.omega.data(), ev.grad.data());
  }
  if (config.quantize_output && !best.success) {
    best.adversarial = Quantize8(best.adversarial);
    const Prediction pred =
        Recognize(params, best.adversarial, config.recognize);
    best.decoded = pred.transcript;
    best.decoded_text = pred.text;
    best.rejected = pred.rejected;
    best.confidence = pred.per_step_confidence;
    best.l2 = L2Distance(clean, best.adversarial);
  }
  return best;
}

}  // namespace

AttackResult AttackLine(const ModelParams& params, const Image& clean,
                        std::span<const int> target,
                        const AttackConfig& config) {
  static constexpr double kIdentity[] = {1.0};
  return RunAttack(params, clean, target, config, kIdentity);
}

AttackResult AttackLineEot(const ModelParams& params, const Image& clean,
                           std::span<const int> target,
                           const AttackConfig& config) {
  if (config.eot_scales.empty()) {
    throw InvalidArgument("EOT attack needs at least one scale");
  }
  return RunAttack(params, clean, target, config, config.eot_scales);
}

Prediction RecognizeRescaled(const ModelParams& params, const Image& image,
                             double factor, const RecognizeOptions& options) {
  const Image scaled = factor == 1.0 ? image : RescaleImage(image, factor);
  return Recognize(params, scaled, options);
}

DocumentAttackResult AttackDocument(const ModelParams& params,
                                    const Image& doc,
                                    std::span<const LineBox> boxes,
                                    std::span<const LineEdit> edits,
                                    const AttackConfig& config) {
  std::set<std::size_t> seen;
  for (const LineEdit& e : edits) {
    if (e.line_index >= boxes.size()) {
      throw InvalidArgument("edit refers to line " +
                            std::to_string(e.line_index) + " of " +
                            std::to_string(boxes.size()));
    }
    if (!seen.insert(e.line_index).second) {
      throw InvalidArgument("line " + std::to_string(e.line_index) +
                            " edited twice");
    }
  }
  DocumentAttackResult out{.image = doc, .lines = {}};
  for (const LineEdit& e : edits) {
    LineAttackOutcome outcome{.line_index = e.line_index, .result = {},
                              .error = {}};
    const LineBox& box = boxes[e.line_index];
    try {
      AttackResult r = AttackLine(params, Crop(doc, box), e.target, config);
      if (r.success) Paste(out.image, r.adversarial, box);
      outcome.result = std::move(r);
    } catch (const Error& err) {
      outcome.error = err.what();
    }
    out.lines.push_back(std::move(outcome));
  }
  return out;
}

SuiteReport EvaluateSuite(const ModelParams& params,
                          std::span<const WordPair> pairs,
                          const AttackConfig& config) {
  if (pairs.empty()) throw InvalidArgument("attack suite has no pairs");
  const ModelConfig& mc = params.config();
  SuiteReport report;
  std::size_t clean_ok = 0, hits = 0, rejected = 0, attempted = 0;
  double l2_sum = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    SuiteRow row;
    row.id = i;
    row.clean_text = pairs[i].clean;
    row.target_text = pairs[i].target;
    try {
      const Image clean =
          NormalizeLine(RenderLine(pairs[i].clean), mc.input_height);
      row.clean_correct =
          Recognize(params, clean, config.recognize).text == pairs[i].clean;
      const Transcript target = mc.alphabet.Encode(pairs[i].target);
      AttackResult r = AttackLine(params, clean, target, config);
      row.decoded = r.decoded_text;
      row.success = r.success;
      row.rejected = r.rejected;
      row.l2 = r.l2;
      row.iterations = r.iterations_used;
      row.adversarial = std::move(r.adversarial);
      ++attempted;
      l2_sum += row.l2;
      hits += row.success;
      rejected += row.rejected;
    } catch (const Error& err) {
      row.error = err.what();
    }
    clean_ok += row.clean_correct;
    report.rows.push_back(std::move(row));
  }
  const double n = static_cast<double>(pairs.size());
  report.metrics.count = pairs.size();
  report.metrics.clean_acc = clean_ok / n;
  report.metrics.target_acc = hits / n;
  report.metrics.rejected_rate = attempted ? rejected / double(attempted) : 0.0;
  report.metrics.avg_l2 = attempted ? l2_sum / attempted : 0.0;
  return report;
}

void WriteSuiteCsv(std::ostream& out, std::span<const SuiteRow> rows) {
  out << "id,clean_text,target_text,decoded,success,rejected,l2,iterations\n";
  for (const SuiteRow& r : rows) {
    out << r.id << ',' << CsvField(r.clean_text) << ','
        << CsvField(r.target_text) << ','
        << CsvField(r.error.empty() ? r.decoded : "error: " + r.error) << ','
        << (r.success ? "true" : "false") << ','
        << (r.rejected ? "true" : "false") << ',' << FormatDouble(r.l2) << ','
        << r.iterations << '\n';
  }
}

void WriteSuiteJsonl(std::ostream& out, std::span<const SuiteRow> rows) {
  for (const SuiteRow& r : rows) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["clean_text"] = r.clean_text;
    j["target_text"] = r.target_text;
    j["decoded"] = r.decoded;
    j["success"] = r.success;
    j["rejected"] = r.rejected;
    j["l2"] = std::stod(FormatDouble(r.l2));
    j["iterations"] = r.iterations;
    if (!r.error.empty()) j["error"] = r.error;
    out << j.dump() << '\n';
  }
}

double L2(const Image& a, const Image& b) { return L2Distance(a, b); }

std::vector<RejectionBin> BinByL2(std::vector<RejectionSample> samples,
                                  std::size_t bins) {
  if (bins == 0) throw InvalidArgument("need at least one bin");
  if (samples.size() < bins) {
    throw InvalidArgument("fewer samples than bins");
  }
  std::stable_sort(samples.begin(), samples.end(),
                   [](const RejectionSample& a, const RejectionSample& b) {
                     return a.l2 < b.l2;
                   });
  std::vector<RejectionBin> out(bins);
  const std::size_t n = samples.size();
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t lo = b * n / bins, hi = (b + 1) * n / bins;
    out[b].l2_min = samples[lo].l2;
    out[b].l2_max = samples[hi - 1].l2;
    out[b].count = hi - lo;
    for (std::size_t i = lo; i < hi; ++i) out[b].rejected += samples[i].rejected;
  }
  return out;
}

}  // namespace advocr
