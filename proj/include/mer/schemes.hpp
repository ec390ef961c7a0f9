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

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mer/rewrite.hpp"

namespace mer::schemes {

using analysis::NodeRef;
using rewrite::Condition;
using rewrite::MetaBinding;
using rewrite::MetaPattern;
using rewrite::RewriteRule;
using rewrite::StepOutcome;

enum class Placement { InScope, OuterScope };

struct Local {
  RewriteRule rule;
};

// `def_template` is a match `Name = E`. The introduced name comes from an
// instance argument when one is called Name, otherwise from the binding
// made by matching the reference rule.
struct IntroduceVariable {
  Placement placement = Placement::InScope;
  MetaPattern def_template;
  RewriteRule ref_rule;
  Condition when;
};

struct IntroduceFunction {
  MetaPattern def_template;  // Sort::FunDef
  RewriteRule ref_rule;
  Condition when;
};

struct FunctionRefactoring {
  RewriteRule def_rule;  // Sort::Clause
  RewriteRule ref_rule;  // Sort::ArgList
  Condition when;
};

struct SignatureRefactoring {
  RewriteRule head_rule;  // Sort::Signature
};

struct Param {
  std::string name;
  bool list = false;
};

struct SchemeInstance {
  std::string name;
  std::vector<Param> params;
  std::variant<Local, IntroduceVariable, IntroduceFunction, FunctionRefactoring,
               SignatureRefactoring>
      scheme;
  std::string text;
};

// Parses one instance block:
//   LOCAL REFACTORING name(Params)  rule [WHEN cond]
//   INTRODUCE VARIABLE name(..) DEFINITION IN [OUTER] SCOPE t REFERENCE rule [WHEN cond]
//   INTRODUCE FUNCTION name(..) DEFINITION t REFERENCE rule [WHEN cond]
//   FUNCTION REFACTORING name(..) DEFINITION rule REFERENCE rule [WHEN cond]
//   FUNCTION SIGNATURE REFACTORING name(..) rule
// Metavariables are written `@X` / `@Xs...`; header parameters plainly,
// with `..` marking a list parameter. Throws std::invalid_argument.
SchemeInstance parse_scheme(std::string_view text);

// The engines. `args` pre-binds the instance parameters.
StepOutcome run_local(const Local& s, const Module& m, NodeRef target, const MetaBinding& args = {});
StepOutcome run_introduce_variable(const IntroduceVariable& s, const Module& m, NodeRef target,
                                   const MetaBinding& args = {});
StepOutcome run_introduce_function(const IntroduceFunction& s, const Module& m, NodeRef target,
                                   const MetaBinding& args = {});
StepOutcome run_function_refactoring(const FunctionRefactoring& s, const Module& m, NodeRef target,
                                     const MetaBinding& args = {});
StepOutcome run_signature_refactoring(const SignatureRefactoring& s, const Module& m,
                                      NodeRef target, const MetaBinding& args = {});

// Dispatches on the scheme; throws std::invalid_argument when an instance
// parameter has no argument.
StepOutcome run(const SchemeInstance& s, const Module& m, NodeRef target, const MetaBinding& args);

}  // namespace mer::schemes
