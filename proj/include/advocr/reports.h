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

// Report serialization. Every writer here is deterministic: fixed column
// order, fixed number formatting, rows in input order.

#ifndef ADVOCR_REPORTS_H_
#define ADVOCR_REPORTS_H_

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "advocr/attack.h"
#include "advocr/experiments.h"
#include "advocr/recognizer.h"
#include "advocr/textattack.h"

namespace advocr {

// Fixed six decimals.
std::string FormatDouble(double v);
// Shortest decimal form that round-trips.
std::string ShortestDouble(double v);
// Quotes fields holding commas, quotes or line breaks.
std::string CsvField(const std::string& s);

// `key = value` lines in insertion order; string values are quoted.
class ResolvedConfig {
 public:
  void Set(const std::string& key, const std::string& value);
  void Set(const std::string& key, const char* value);
  void Set(const std::string& key, double value);
  void Set(const std::string& key, std::size_t value);
  void Set(const std::string& key, bool value);
  void Set(const std::string& key, std::span<const double> values);

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }
  std::string ToString() const;
  void Write(const std::string& path) const;

 private:
  void Put(const std::string& key, std::string rendered);
  std::vector<std::pair<std::string, std::string>> entries_;
};

void AddAttackConfig(ResolvedConfig& cfg, const AttackConfig& attack,
                     const std::string& prefix = "attack.");
void AddTrainConfig(ResolvedConfig& cfg, const TrainConfig& train,
                    const std::string& prefix = "train.");
void AddModelConfig(ResolvedConfig& cfg, const ModelConfig& model,
                    const std::string& prefix = "model.");
void AddBowConfig(ResolvedConfig& cfg, const BowTrainConfig& bow,
                  const std::string& prefix = "classifier.");

// Suite summary: clean_acc, target_acc, rejected, avg_l2, count.
void WriteSuiteSummaryCsv(std::ostream& out, const SuiteMetrics& m);

void WriteEvasionCsv(std::ostream& out, std::span<const EvasionRow> rows);
void WriteEvasionJsonl(std::ostream& out, std::span<const EvasionRow> rows);
void WriteEvasionSummary(std::ostream& out, const EvasionSummary& s);

// fraction, accuracy, baseline, poisoned, attempted.
void WritePoisonCsv(std::ostream& out, std::span<const PoisonPoint> curve);
void WritePoisonSamplesTsv(std::ostream& out,
                           std::span<const PoisonedText> samples);

struct TargetRow {
  std::size_t id = 0;
  LabeledText input;
  TargetTextResult result;
  std::string error;
};
void WriteTargetCsv(std::ostream& out, std::span<const TargetRow> rows);
void WriteTargetJsonl(std::ostream& out, std::span<const TargetRow> rows);

// bin, l2_min, l2_max, count, rejected, rate.
void WriteRejectionCsv(std::ostream& out, std::span<const RejectionBin> bins);

// epoch, loss.
void WriteLossCsv(std::ostream& out, std::span<const double> losses);

}  // namespace advocr

#endif  // ADVOCR_REPORTS_H_
