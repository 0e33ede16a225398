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

#include "cli_common.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "advocr/experiments.h"

namespace advocr::cli {

std::string DefaultOutDir() {
  if (const char* env = std::getenv("ADVOCR_OUT_DIR"); env && *env) {
    return env;
  }
  return "advocr-out";
}

void AddCommon(CLI::App* app, CommonOptions& opts) {
  opts.out_dir = DefaultOutDir();
  app->add_option("-o,--out", opts.out_dir,
                  "Output directory (default: $ADVOCR_OUT_DIR or advocr-out)");
  app->add_option("--seed", opts.seed, "Random seed")->capture_default_str();
}

std::string EnsureDir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InvalidArgument("cannot create directory " + dir);
  return dir;
}

std::string JoinPath(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void WriteText(const std::string& dir, const std::string& name,
               const std::string& text) {
  const std::string path = JoinPath(dir, name);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << text;
}

ResolvedConfig BaseConfig(const std::string& command,
                          const CommonOptions& opts) {
  ResolvedConfig cfg;
  cfg.Set("command", command);
  cfg.Set("version", VersionString());
  cfg.Set("seed", static_cast<std::size_t>(opts.seed));
  return cfg;
}

AttackConfig AttackFlags::Resolve() const {
  AttackConfig cfg = AttackPreset(preset);
  if (c >= 0.0) cfg.c = c;
  if (learning_rate > 0.0) cfg.learning_rate = learning_rate;
  if (iterations > 0) cfg.max_iterations = iterations;
  if (fixed_iterations) cfg.early_stop = false;
  if (no_quantize) cfg.quantize_output = false;
  cfg.eot_scales = eot_scales;
  cfg.recognize.beam_width = beam_width;
  cfg.recognize.rejection_threshold = rejection_threshold;
  cfg.Validate();
  return cfg;
}

void AddAttackFlags(CLI::App* app, AttackFlags& flags,
                    const std::string& default_preset) {
  flags.preset = default_preset;
  std::string names;
  for (const std::string& n : AttackPresetNames()) {
    names += (names.empty() ? "" : ", ") + n;
  }
  app->add_option("--preset", flags.preset, "Attack preset: " + names)
      ->capture_default_str();
  app->add_option("--c", flags.c, "Override the balance constant");
  app->add_option("--lr", flags.learning_rate, "Override the Adam step size");
  app->add_option("--iterations", flags.iterations,
                  "Override the iteration budget");
  app->add_flag("--fixed-iterations", flags.fixed_iterations,
                "Run the full budget instead of stopping at the first success");
  app->add_flag("--no-quantize", flags.no_quantize,
                "Judge float iterates instead of their 8-bit round trip");
  app->add_option("--eot-scales", flags.eot_scales,
                  "Average the loss over these rescaling factors")
      ->delimiter(',');
  app->add_option("--beam", flags.beam_width, "Beam width")
      ->capture_default_str();
  app->add_option("--reject-threshold", flags.rejection_threshold,
                  "Rejection threshold on mean per-step confidence")
      ->capture_default_str();
}

FailureCriterion CriterionFlags::Resolve() const {
  FailureCriterion c;
  if (mode == "score-below") {
    c = FailureCriterion::ScoreBelow(threshold);
  } else if (mode == "misclassified") {
    c = FailureCriterion::Misclassified();
  } else if (mode == "target-class") {
    c = FailureCriterion::TargetClass(target_class, margin);
  } else {
    throw InvalidArgument("unknown criterion \"" + mode + "\"");
  }
  c.Validate();
  return c;
}

void AddCriterionFlags(CLI::App* app, CriterionFlags& flags) {
  app->add_option("--criterion", flags.mode,
                  "score-below, misclassified or target-class")
      ->capture_default_str();
  app->add_option("--score-threshold", flags.threshold,
                  "score-below: true-class score to reach")
      ->capture_default_str();
  app->add_option("--target-class", flags.target_class,
                  "target-class: class to promote");
  app->add_option("--margin", flags.margin,
                  "target-class: required lead over every other class");
}

int RunGuarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ExperimentFailure& e) {
    std::cerr << "advocr: " << e.what() << '\n';
    return kExitExperimentFailure;
  } catch (const InvalidArgument& e) {
    std::cerr << "advocr: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    std::cerr << "advocr: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ShapeError& e) {
    std::cerr << "advocr: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "advocr: " << e.what() << '\n';
    return kExitExperimentFailure;
  }
}

}  // namespace advocr::cli
