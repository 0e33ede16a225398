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

#ifndef ADVOCR_TOOLS_COMMANDS_H_
#define ADVOCR_TOOLS_COMMANDS_H_

#include <functional>
#include <vector>

#include "CLI11.hpp"

namespace advocr::cli {

struct Command {
  CLI::App* app = nullptr;
  std::function<int()> run;
};

// Image side: train, recognize, attack, attack-words, attack-doc,
// export-font.
void RegisterOcrCommands(CLI::App& root, std::vector<Command>& out);
// Text side: nlp-target, nlp-evasion, poison.
void RegisterNlpCommands(CLI::App& root, std::vector<Command>& out);

}  // namespace advocr::cli

#endif  // ADVOCR_TOOLS_COMMANDS_H_
