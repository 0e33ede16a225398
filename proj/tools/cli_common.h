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

#ifndef ADVOCR_TOOLS_CLI_COMMON_H_
#define ADVOCR_TOOLS_CLI_COMMON_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "advocr/attack.h"
#include "advocr/error.h"
#include "advocr/reports.h"
#include "advocr/textattack.h"

namespace advocr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitExperimentFailure = 1;
inline constexpr int kExitUsage = 2;

// The experiment ran but produced no usable outcome (e.g. zero successes).
class ExperimentFailure : public Error {
 public:
  using Error::Error;
};

// Options every subcommand accepts.
struct CommonOptions {
  std::string out_dir;
  std::uint64_t seed = 1;
};

// $ADVOCR_OUT_DIR, else "advocr-out".
std::string DefaultOutDir();
void AddCommon(CLI::App* app, CommonOptions& opts);
// Creates the directory (and parents); returns it.
std::string EnsureDir(const std::string& dir);
std::string JoinPath(const std::string& dir, const std::string& name);

// Writes `text` to dir/name, replacing any existing file.
void WriteText(const std::string& dir, const std::string& name,
               const std::string& text);

// Resolved config header shared by all subcommands: command, version, seed.
ResolvedConfig BaseConfig(const std::string& command,
                          const CommonOptions& opts);

// Attack preset plus per-flag overrides.
struct AttackFlags {
  std::string preset;
  double c = -1.0;
  double learning_rate = -1.0;
  std::size_t iterations = 0;
  bool fixed_iterations = false;
  bool no_quantize = false;
  std::vector<double> eot_scales;
  std::size_t beam_width = 8;
  double rejection_threshold = 0.5;

  AttackConfig Resolve() const;
};
void AddAttackFlags(CLI::App* app, AttackFlags& flags,
                    const std::string& default_preset);

struct CriterionFlags {
  std::string mode = "score-below";
  double threshold = 0.1;
  std::string target_class;
  double margin = 0.0;

  FailureCriterion Resolve() const;
};
void AddCriterionFlags(CLI::App* app, CriterionFlags& flags);

// Runs `body`, mapping library errors to exit codes and printing messages.
int RunGuarded(const std::function<int()>& body);

}  // namespace advocr::cli

#endif  // ADVOCR_TOOLS_CLI_COMMON_H_
