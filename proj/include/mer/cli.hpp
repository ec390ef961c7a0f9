// Copyright 2026 The mer Authors
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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mer::cli {

enum ExitCode : int {
  kOk = 0,
  kFailed = 1,      // refactoring rejected, or modules inequivalent
  kInputError = 2,  // unreadable or malformed input, bad target, bad plan
  kUnknown = 3,     // equivalence undecided (timeouts)
};

struct CliConfig {
  std::string command;  // check, generalise, step, verify
  std::string step;     // prime name for `refactor step`
  std::string input;
  std::string second;   // verify: the module compared against `input`
  std::optional<std::string> pos;   // L:C, 1-based
  std::optional<std::string> expr;  // target text, with `occurrence` (1-based)
  std::size_t occurrence = 1;
  std::string param;
  std::string name;
  std::optional<std::string> params;    // comma-separated variables
  std::optional<std::string> function;  // name/arity
  bool write = false;
  bool trace = false;
  std::string output;
  std::size_t inject_failure = 0;  // test hook: fail prime step k
  std::vector<std::string> entries;
  std::size_t trials = 50;
  std::uint64_t seed = 1;
  std::int64_t fuel = 100000;
};

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// The individual commands on an already parsed configuration.
int cmd_check(const CliConfig& c, std::ostream& out, std::ostream& err);
int cmd_generalise(const CliConfig& c, std::ostream& out, std::ostream& err);
int cmd_step(const CliConfig& c, std::ostream& out, std::ostream& err);
int cmd_verify(const CliConfig& c, std::ostream& out, std::ostream& err);

// Replaces `path` by `contents` through a temporary file in the same
// directory and a rename; on error the original is left as it was.
void write_atomically(const std::string& path, const std::string& contents);

}  // namespace mer::cli
