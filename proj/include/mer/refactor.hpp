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

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mer/schemes.hpp"

namespace mer::refactor {

using analysis::NodeRef;
using rewrite::StepOutcome;

// The six prime refactorings, each a scheme instance given as text.
std::vector<std::string> prime_names();
std::string_view prime_text(std::string_view name);  // throws std::invalid_argument
const schemes::SchemeInstance& prime(std::string_view name);

StepOutcome wrap(const Module& m, NodeRef target);
StepOutcome extract_to_variable(const Module& m, NodeRef target, const std::string& name);
StepOutcome outer_variable(const Module& m, NodeRef match);
StepOutcome extract_to_function(const Module& m, NodeRef target, const std::string& name,
                                std::vector<PatternPtr> params);
// `match` must be the first element of the body of `fn`.
StepOutcome var_to_param(const Module& m, NodeRef fn, NodeRef match);
StepOutcome rename_function(const Module& m, NodeRef fn, const std::string& new_name);

// First of base, base1, base2, ... that no definition or call uses.
std::string fresh_function_name(const Module& m, const std::string& base);

struct TraceEntry {
  std::string step;
  std::vector<std::string> args;
  std::string module_text;
};

struct Options {
  std::function<void(const TraceEntry&)> trace;
  // Called before prime step k (1-based); returning true fails the step.
  std::function<bool(std::size_t k, std::string_view step)> inject_failure;
};

// The snapshots of one composite run. On failure the original, including
// its source text, is what remains.
class Transaction {
 public:
  Transaction(Module original, std::string original_text);

  const Module& current() const { return history_.back(); }
  const Module& original() const { return history_.front(); }
  const std::string& original_text() const { return text_; }
  const std::vector<Module>& history() const { return history_; }

  void push(Module m) { history_.push_back(std::move(m)); }
  void rollback() { history_.resize(1); }

 private:
  std::vector<Module> history_;
  std::string text_;
};

struct Result {
  StepOutcome outcome;        // the failing step's outcome on failure
  Module module;              // final snapshot, or the original
  std::string text;           // pretty(module), or the original text verbatim
  std::size_t failed_step = 0;  // 1-based prime step index; 0 on success
  std::string failed_name;
  std::vector<TraceEntry> trace;
  bool ok() const { return outcome.ok(); }
};

std::string describe(const Result& r);

// Composite programs.
//   REFACTORING name(Params) DO stmt...
// where a statement is `term`, `Local = term`, or `ITERATE term`, and a term
// is a local, a lowercase name, `f(args)`, or `term.f(args)`.
struct Term {
  enum class Kind { Local, Literal, Call };
  Kind kind = Kind::Local;
  std::string name;
  std::vector<Term> args;  // Call: receiver first
  std::string text() const;
};

struct Statement {
  enum class Kind { Do, Assign, Iterate };
  Kind kind = Kind::Do;
  std::string local;
  Term term;
};

struct CompositeProgram {
  std::string name;
  std::vector<std::string> params;
  std::vector<Statement> steps;
  std::string text;
};

// Throws std::invalid_argument, also for a local used before assignment or
// a named local assigned twice.
CompositeProgram parse_composite(std::string_view text);

struct Registry {
  std::map<std::string, CompositeProgram> composites;
  static const Registry& builtin();  // generalise_function, to_function_parameter
};

// Composite arguments are names (e.g. the parameter name).
Result run_composite(const CompositeProgram& p, const Module& m, std::string_view original_text,
                     NodeRef target, const std::vector<std::string>& args,
                     const Registry& registry = Registry::builtin(), const Options& opts = {});

// The same two composites written directly against the primes.
Result to_function_parameter(const Module& m, std::string_view original_text, NodeRef match,
                             const Options& opts = {});
Result generalise_function(const Module& m, std::string_view original_text, NodeRef target,
                           const std::string& param_name, const Options& opts = {});

}  // namespace mer::refactor
