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

#include "mer/equiv.hpp"

namespace mer::equiv {

using Kind = Outcome::Kind;

Comparison eq_outcomes(const Outcome& a, const Outcome& b, bool compare_env) {
  if (a.kind == Kind::Timeout || b.kind == Kind::Timeout)
    return {Comparison::Kind::Unknown, "timeout"};
  if (a.kind != b.kind) return {Comparison::Kind::Different, "outcome"};
  if (a.kind == Kind::Ok && !(a.value == b.value)) return {Comparison::Kind::Different, "value"};
  if (a.trace != b.trace) return {Comparison::Kind::Different, "trace"};
  if (a.kind == Kind::Ok && compare_env && a.env_after != b.env_after)
    return {Comparison::Kind::Different, "env"};
  return {};
}

}  // namespace mer::equiv
