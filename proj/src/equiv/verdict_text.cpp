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

#include <fmt/format.h>

#include "mer/equiv.hpp"

namespace mer::equiv {

namespace {

const char* verdict_name(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::Equivalent: return "equivalent";
    case Verdict::Kind::Inequivalent: return "inequivalent";
    case Verdict::Kind::Unknown: return "unknown";
  }
  return "unknown";
}

}  // namespace

std::string to_text(const Verdict& v) {
  std::string out = fmt::format("verdict={}\ntrials={}\ntimeouts={}\n", verdict_name(v.kind),
                                v.trials, v.timeouts);
  if (const auto& w = v.witness) {
    out += fmt::format("entry={}\n", w->entry);
    out += fmt::format("args=[{}]\n", interp::to_string(std::span<const Value>(w->args)));
    if (!w->instance.empty()) out += fmt::format("instance={}\n", w->instance);
    if (!w->env.empty()) out += fmt::format("env={}\n", interp::to_string(w->env));
    out += fmt::format("reason={}\n", w->reason);
    out += fmt::format("outcome1={}\n", interp::to_string(w->before));
    out += fmt::format("outcome2={}\n", interp::to_string(w->after));
  }
  return out;
}

}  // namespace mer::equiv
