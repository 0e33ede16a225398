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

#include "advocr/reports.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "advocr/error.h"
#include "json.hpp"

namespace advocr {

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string ShortestDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

namespace {

// JSON number with six fixed decimals, so reports never depend on the
// shortest-representation of accumulated sums.
double Fixed6(double v) { return std::stod(FormatDouble(v)); }

const char* Bool(bool b) { return b ? "true" : "false"; }

std::string Quote(const std::string& s) {
  return nlohmann::json(s).dump();
}

}  // namespace

void ResolvedConfig::Put(const std::string& key, std::string rendered) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(rendered);
      return;
    }
  }
  entries_.emplace_back(key, std::move(rendered));
}

void ResolvedConfig::Set(const std::string& key, const std::string& value) {
  Put(key, Quote(value));
}
void ResolvedConfig::Set(const std::string& key, const char* value) {
  Put(key, Quote(value));
}
void ResolvedConfig::Set(const std::string& key, double value) {
  Put(key, ShortestDouble(value));
}
void ResolvedConfig::Set(const std::string& key, std::size_t value) {
  Put(key, std::to_string(value));
}
void ResolvedConfig::Set(const std::string& key, bool value) {
  Put(key, Bool(value));
}
void ResolvedConfig::Set(const std::string& key,
                         std::span<const double> values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += ShortestDouble(values[i]);
  }
  Put(key, out + "]");
}

std::string ResolvedConfig::ToString() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

void ResolvedConfig::Write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << ToString();
}

void AddAttackConfig(ResolvedConfig& cfg, const AttackConfig& a,
                     const std::string& p) {
  cfg.Set(p + "c", a.c);
  cfg.Set(p + "learning_rate", a.learning_rate);
  cfg.Set(p + "beta1", a.beta1);
  cfg.Set(p + "beta2", a.beta2);
  cfg.Set(p + "epsilon", a.epsilon);
  cfg.Set(p + "max_iterations", a.max_iterations);
  cfg.Set(p + "x_min", a.x_min);
  cfg.Set(p + "x_max", a.x_max);
  cfg.Set(p + "atanh_margin", a.atanh_margin);
  cfg.Set(p + "early_stop", a.early_stop);
  cfg.Set(p + "quantize_output", a.quantize_output);
  cfg.Set(p + "eot_scales", std::span<const double>(a.eot_scales));
  cfg.Set(p + "beam_width", a.recognize.beam_width);
  cfg.Set(p + "rejection_threshold", a.recognize.rejection_threshold);
}

void AddTrainConfig(ResolvedConfig& cfg, const TrainConfig& t,
                    const std::string& p) {
  cfg.Set(p + "learning_rate", t.learning_rate);
  cfg.Set(p + "batch_size", t.batch_size);
  cfg.Set(p + "epochs", t.epochs);
  cfg.Set(p + "seed", static_cast<std::size_t>(t.seed));
  cfg.Set(p + "noise_augment_std", t.noise_augment_std);
  cfg.Set(p + "width_jitter", t.width_jitter);
  cfg.Set(p + "degrade_prob", t.degrade_prob);
  cfg.Set(p + "pad_jitter", t.pad_jitter);
  cfg.Set(p + "outlier_rate", t.outlier_rate);
  cfg.Set(p + "outlier_min_std", t.outlier_min_std);
  cfg.Set(p + "outlier_max_std", t.outlier_max_std);
  cfg.Set(p + "max_grad_norm", t.max_grad_norm);
}

void AddModelConfig(ResolvedConfig& cfg, const ModelConfig& m,
                    const std::string& p) {
  cfg.Set(p + "input_height", m.input_height);
  cfg.Set(p + "conv_channels", m.conv_channels);
  cfg.Set(p + "vertical_hidden", m.vertical_hidden);
  cfg.Set(p + "horizontal_hidden", m.horizontal_hidden);
  cfg.Set(p + "alphabet", m.alphabet.symbols());
}

void AddBowConfig(ResolvedConfig& cfg, const BowTrainConfig& b,
                  const std::string& p) {
  cfg.Set(p + "learning_rate", b.learning_rate);
  cfg.Set(p + "epochs", b.epochs);
  cfg.Set(p + "l2", b.l2);
  cfg.Set(p + "holdout_fraction", b.holdout_fraction);
  cfg.Set(p + "seed", static_cast<std::size_t>(b.seed));
}

void WriteSuiteSummaryCsv(std::ostream& out, const SuiteMetrics& m) {
  out << "clean_acc,target_acc,rejected,avg_l2,count\n"
      << FormatDouble(m.clean_acc) << ',' << FormatDouble(m.target_acc) << ','
      << FormatDouble(m.rejected_rate) << ',' << FormatDouble(m.avg_l2) << ','
      << m.count << '\n';
}

void WriteEvasionCsv(std::ostream& out, std::span<const EvasionRow> rows) {
  out << "id,label,text,target_text,text_success,replacements,ocr_text,"
         "ocr_success,rejected,l2,iterations,predicted,error\n";
  for (const EvasionRow& r : rows) {
    out << r.id << ',' << CsvField(r.label) << ',' << CsvField(r.text) << ','
        << CsvField(r.target_text) << ',' << Bool(r.text_attack_success) << ','
        << r.replacements << ',' << CsvField(r.ocr_text) << ','
        << Bool(r.ocr_success) << ',' << Bool(r.rejected) << ','
        << FormatDouble(r.l2) << ',' << r.iterations << ','
        << CsvField(r.predicted) << ',' << CsvField(r.error) << '\n';
  }
}

void WriteEvasionJsonl(std::ostream& out, std::span<const EvasionRow> rows) {
  for (const EvasionRow& r : rows) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["label"] = r.label;
    j["text"] = r.text;
    j["target_text"] = r.target_text;
    j["text_success"] = r.text_attack_success;
    j["replacements"] = r.replacements;
    j["ocr_text"] = r.ocr_text;
    j["ocr_success"] = r.ocr_success;
    j["rejected"] = r.rejected;
    j["l2"] = Fixed6(r.l2);
    j["iterations"] = r.iterations;
    j["predicted"] = r.predicted;
    if (!r.error.empty()) j["error"] = r.error;
    out << j.dump() << '\n';
  }
}

void WriteEvasionSummary(std::ostream& out, const EvasionSummary& s) {
  nlohmann::ordered_json j;
  j["texts"] = s.texts;
  j["baseline_accuracy"] = Fixed6(s.baseline_accuracy);
  j["text_success_rate"] = Fixed6(s.text_success_rate);
  j["ocr_target_accuracy"] = Fixed6(s.ocr_target_accuracy);
  j["adversarial_accuracy"] = Fixed6(s.adversarial_accuracy);
  j["mean_replaced_fraction"] = Fixed6(s.mean_replaced_fraction);
  out << j.dump(2) << '\n';
}

void WritePoisonCsv(std::ostream& out, std::span<const PoisonPoint> curve) {
  out << "fraction,accuracy,baseline,poisoned,attempted\n";
  for (const PoisonPoint& p : curve) {
    out << FormatDouble(p.fraction) << ',' << FormatDouble(p.accuracy) << ','
        << FormatDouble(p.baseline) << ',' << p.poisoned << ',' << p.attempted
        << '\n';
  }
}

void WritePoisonSamplesTsv(std::ostream& out,
                           std::span<const PoisonedText> samples) {
  for (const PoisonedText& s : samples) {
    out << s.label << '\t' << s.original << '\t' << s.poisoned << '\n';
  }
}

void WriteTargetCsv(std::ostream& out, std::span<const TargetRow> rows) {
  out << "id,label,text,success,target_text,applied,replaced_fraction,plan,"
         "error\n";
  for (const TargetRow& r : rows) {
    std::string plan;
    for (std::size_t i = 0; i < r.result.applied; ++i) {
      if (i) plan += ' ';
      plan += r.result.plan[i].word + ">" + r.result.plan[i].replacement;
    }
    out << r.id << ',' << CsvField(r.input.label) << ','
        << CsvField(r.input.text) << ',' << Bool(r.result.success) << ','
        << CsvField(r.result.text) << ',' << r.result.applied << ','
        << FormatDouble(r.result.replaced_fraction()) << ',' << CsvField(plan)
        << ',' << CsvField(r.error) << '\n';
  }
}

void WriteTargetJsonl(std::ostream& out, std::span<const TargetRow> rows) {
  for (const TargetRow& r : rows) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["label"] = r.input.label;
    j["text"] = r.input.text;
    j["success"] = r.result.success;
    j["target_text"] = r.result.text;
    nlohmann::ordered_json plan = nlohmann::ordered_json::array();
    for (const Replacement& rep : r.result.plan) {
      nlohmann::ordered_json e;
      e["word"] = rep.word;
      e["replacement"] = rep.replacement;
      e["delta"] = Fixed6(rep.delta);
      plan.push_back(e);
    }
    j["plan"] = plan;
    j["applied"] = r.result.applied;
    j["replaced_fraction"] = Fixed6(r.result.replaced_fraction());
    if (!r.error.empty()) j["error"] = r.error;
    out << j.dump() << '\n';
  }
}

void WriteRejectionCsv(std::ostream& out, std::span<const RejectionBin> bins) {
  out << "bin,l2_min,l2_max,count,rejected,rate\n";
  for (std::size_t i = 0; i < bins.size(); ++i) {
    const RejectionBin& b = bins[i];
    out << i << ',' << FormatDouble(b.l2_min) << ',' << FormatDouble(b.l2_max)
        << ',' << b.count << ',' << b.rejected << ',' << FormatDouble(b.rate())
        << '\n';
  }
}

void WriteLossCsv(std::ostream& out, std::span<const double> losses) {
  out << "epoch,loss\n";
  for (std::size_t i = 0; i < losses.size(); ++i) {
    out << i << ',' << FormatDouble(losses[i]) << '\n';
  }
}

}  // namespace advocr
