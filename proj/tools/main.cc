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

// advocr: command-line front end for training, attacking and the text-side
// experiments.

#include <iostream>
#include <vector>

#include "CLI11.hpp"
#include "advocr/experiments.h"
#include "cli_common.h"
#include "commands.h"

int main(int argc, char** argv) {
  using namespace advocr::cli;
  CLI::App app{"Targeted adversarial attacks on a CTC line recognizer",
               "advocr"};
  app.set_version_flag("--version", advocr::VersionString());
  app.require_subcommand(1);
  std::vector<Command> commands;
  RegisterOcrCommands(app, commands);
  RegisterNlpCommands(app, commands);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  for (const Command& c : commands) {
    if (c.app->parsed()) return RunGuarded(c.run);
  }
  return kExitUsage;
}
