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

// Drives the command-line tool as a subprocess.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "advocr/render.h"

namespace fs = std::filesystem;

namespace {

const fs::path& Scratch() {
  static const fs::path dir = [] {
    // One directory per process: ctest runs each case separately.
    fs::path d = fs::temp_directory_path() /
                 ("advocr_cli_test." + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int RunCli(const std::string& args) {
  const std::string cmd = std::string(ADVOCR_CLI) + " " + args + " > " +
                          (Scratch() / "last.log").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void Spit(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::string Out(const std::string& name) { return (Scratch() / name).string(); }

// A barely trained model: enough for plumbing, not for accuracy.
const std::string& TinyModel() {
  static const std::string path = [] {
    Spit(Scratch() / "words.txt", "cab\ndog\ncat\nbad\nfig\nhen\n");
    const int rc = RunCli("train -q -o " + Out("train") + " --words " +
                       Out("words.txt") +
                       " --held-out 2 --epochs 2 --phrases 4 "
                       "--random-strings 4");
    EXPECT_EQ(rc, 0) << Slurp(Scratch() / "last.log");
    return Out("train") + "/model.bin";
  }();
  return path;
}

TEST(Cli, HelpExitsZero) {
  EXPECT_EQ(RunCli("--help"), 0);
  EXPECT_EQ(RunCli("attack --help"), 0);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(RunCli(""), 2);
  EXPECT_EQ(RunCli("no-such-command"), 2);
  EXPECT_EQ(RunCli("attack --target x"), 2);  // --model missing
  EXPECT_EQ(RunCli("train -q -o " + Out("t2") + " --words /nonexistent.txt"), 2);
  EXPECT_EQ(RunCli("poison -o " + Out("p2") + " --fractions 0 --criterion bogus"),
            2);
}

TEST(Cli, EmptyPairsFileExitsTwo) {
  Spit(Scratch() / "empty.tsv", "");
  EXPECT_EQ(RunCli("attack-words -o " + Out("aw") + " --model " + TinyModel() +
                " --pairs " + Out("empty.tsv")),
            2);
}

TEST(Cli, CorruptModelExitsTwo) {
  Spit(Scratch() / "junk.bin", "not a model");
  EXPECT_EQ(RunCli("recognize -o " + Out("rj") + " --model " + Out("junk.bin") +
                " --text cab"),
            2);
}

TEST(Cli, TrainWritesArtifactsAndConfig) {
  const fs::path dir = fs::path(TinyModel()).parent_path();
  for (const char* f : {"model.bin", "loss.csv", "metrics.csv",
                        "held_out_words.txt", "config.txt"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const std::string cfg = Slurp(dir / "config.txt");
  EXPECT_NE(cfg.find("seed = 1"), std::string::npos) << cfg;
  EXPECT_NE(cfg.find("version = "), std::string::npos) << cfg;
  EXPECT_NE(cfg.find("train.epochs = 2"), std::string::npos) << cfg;
}

TEST(Cli, AttackReportsFailureWithExitOne) {
  // Two iterations cannot flip anything; the run still writes its report.
  const int rc = RunCli("attack -o " + Out("atk") + " --model " + TinyModel() +
                     " --text cab --target dog --iterations 2");
  EXPECT_EQ(rc, 1) << Slurp(Scratch() / "last.log");
  EXPECT_TRUE(fs::exists(Scratch() / "atk" / "report.csv"));
  EXPECT_TRUE(fs::exists(Scratch() / "atk" / "adversarial.pgm"));
  const std::string cfg = Slurp(Scratch() / "atk" / "config.txt");
  EXPECT_NE(cfg.find("attack.max_iterations = 2"), std::string::npos) << cfg;
  EXPECT_NE(cfg.find("attack.c = 20"), std::string::npos) << cfg;
}

TEST(Cli, PresetFlagsResolve) {
  RunCli("attack -o " + Out("pre") + " --model " + TinyModel() +
      " --text cab --target dog --iterations 1 --preset poisoning");
  const std::string cfg = Slurp(Scratch() / "pre" / "config.txt");
  EXPECT_NE(cfg.find("attack.c = 200"), std::string::npos) << cfg;
  EXPECT_NE(cfg.find("attack.learning_rate = 0.02"), std::string::npos) << cfg;
}

TEST(Cli, DocumentWithoutEditsIsByteIdentical) {
  Spit(Scratch() / "doc.txt", "first line\nsecond line\n");
  ASSERT_EQ(RunCli("attack-doc -o " + Out("doc") + " --model " + TinyModel() +
                " --doc " + Out("doc.txt")),
            0)
      << Slurp(Scratch() / "last.log");
  EXPECT_EQ(Slurp(Scratch() / "doc" / "clean.pgm"),
            Slurp(Scratch() / "doc" / "adversarial.pgm"));
}

TEST(Cli, TextOnlyEvasionEchoesCriterion) {
  ASSERT_EQ(RunCli("nlp-evasion -o " + Out("ev") + " --text-only --count 5"), 0)
      << Slurp(Scratch() / "last.log");
  const std::string cfg = Slurp(Scratch() / "ev" / "config.txt");
  EXPECT_NE(cfg.find("criterion = \"score_below(0.1)\""), std::string::npos)
      << cfg;
  EXPECT_TRUE(fs::exists(Scratch() / "ev" / "summary.json"));
}

TEST(Cli, PoisonCurveIsDeterministic) {
  const std::string args = " --fractions 0 0.1 0.2 0.3 0.4 0.5";
  ASSERT_EQ(RunCli("poison -o " + Out("po1") + args), 0)
      << Slurp(Scratch() / "last.log");
  ASSERT_EQ(RunCli("poison -o " + Out("po2") + args), 0);
  const std::string a = Slurp(Scratch() / "po1" / "poison.csv");
  EXPECT_EQ(a, Slurp(Scratch() / "po2" / "poison.csv"));
  // Header plus one row per fraction.
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 7);
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  const std::string dir = Out("from_env");
  const std::string cmd = "ADVOCR_OUT_DIR=" + dir + " " + ADVOCR_CLI +
                          " nlp-target --text 'a fine day' --label pos > " +
                          Out("env.log") + " 2>&1";
  const int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_TRUE(fs::exists(fs::path(dir) / "targets.csv")) << Slurp(Out("env.log"));
}

TEST(Cli, ExportedFontMatchesEmbeddedTable) {
  ASSERT_EQ(RunCli("export-font -o " + Out("font")), 0)
      << Slurp(Scratch() / "last.log");
  fs::path found;
  for (const auto& e : fs::directory_iterator(Scratch() / "font")) found = e.path();
  ASSERT_FALSE(found.empty());
  EXPECT_EQ(Slurp(found), advocr::EmbeddedFont().HexTable());
}

}  // namespace
