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
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "mer/interp.hpp"
#include "mer/schemes.hpp"

namespace mer::equiv {

using interp::Env;
using interp::Outcome;
using interp::Value;

struct Comparison {
  enum class Kind { Equal, Different, Unknown };
  Kind kind = Kind::Equal;
  std::string reason;  // value, env, trace, outcome (ok vs exn), timeout
};

// Exception kinds are ignored; traces must agree in both the normal and the
// failure case.
Comparison eq_outcomes(const Outcome& a, const Outcome& b, bool compare_env);

struct Witness {
  std::string entry;          // name/arity, or "rule"
  std::vector<Value> args;
  std::string instance;       // rule checks: the instantiated lhs and rhs
  Env env;                    // rule checks: the evaluation env
  Outcome before, after;
  std::string reason;
};

struct Verdict {
  enum class Kind { Equivalent, Inequivalent, Unknown };
  Kind kind = Kind::Equivalent;
  std::size_t trials = 0;
  std::size_t timeouts = 0;
  std::size_t printing = 0;  // rule checks: trials whose instance prints somewhere
  std::optional<Witness> witness;
};

// `verdict=...` followed by counters and, for inequivalence, the witness,
// one key=value per line.
std::string to_text(const Verdict& v);

class PlanError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class GenerationExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrialPlan {
  std::vector<FunKey> entries;
  std::map<FunKey, FunKey> remap;  // entry in `before` -> its key in `after`
  // Fixed trailing arguments for a remapped entry whose arity grew.
  std::map<FunKey, std::vector<Value>> extra_args;
  std::size_t trials = 50;
  std::uint64_t seed = 1;
  std::int64_t fuel = 100000;
  std::int64_t arg_min = -5;
  std::int64_t arg_max = 5;
};

// Every definition of `m`, for plans that test all entries.
std::vector<FunKey> all_entries(const Module& m);

// Trials run in parallel; the verdict and witness do not depend on the
// thread count (the first differing trial in (entry, trial) order wins).
Verdict check_module_equiv(const Module& before, const Module& after, const TrialPlan& plan);
// Single-threaded reference; stops at the first difference.
Verdict check_module_equiv_serial(const Module& before, const Module& after, const TrialPlan& plan);

struct RulePlan {
  std::size_t trials = 500;
  std::uint64_t seed = 1;
  std::int64_t fuel = 100000;
  int max_depth = 4;
  std::size_t max_attempts = 200;  // per trial, before GenerationExhausted
};

// Both patterns are expression templates. Metavariables in pattern
// positions are instantiated with variable names, the others with
// generated expressions; list metavariables must be bound by the condition.
// Envs bind every free variable; names the condition requires fresh are
// ignored when comparing envs.
Verdict check_rule_equiv(const rewrite::MetaPattern& lhs, const rewrite::MetaPattern& rhs,
                         const rewrite::Condition& cond, const RulePlan& plan);
Verdict check_rule_equiv_serial(const rewrite::MetaPattern& lhs, const rewrite::MetaPattern& rhs,
                                const rewrite::Condition& cond, const RulePlan& plan);

// The equivalence a scheme instance must satisfy, as a pair of expression
// templates. Local: the rule itself. Introduce variable: the reference lhs
// against `begin Def, Ref end`, with the name fresh and the moved
// expression pure and closed. Other kinds throw std::invalid_argument.
struct RuleObligation {
  rewrite::MetaPattern lhs, rhs;
  rewrite::Condition cond;
};
RuleObligation obligation(const schemes::SchemeInstance& s);

// Generators. All are deterministic in their seed.
struct GenOptions {
  bool pure = false;    // no print or application outside fun bodies
  bool closed = false;  // references only to names bound inside the expression
  bool print = true;
  bool calls = false;   // calls to the undefined h/1
};

using Rng = std::mt19937_64;

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0);

ExprPtr gen_expr(Rng& rng, int depth, const std::vector<std::string>& env_vars, IdAllocator& ids,
                 const GenOptions& opts = {});
ExprPtr gen_expr(std::uint64_t seed, int depth, const std::vector<std::string>& env_vars,
                 const GenOptions& opts = {});
Value gen_value(Rng& rng);
Env gen_env(Rng& rng, const std::vector<std::string>& names);
std::vector<Value> gen_args(std::uint64_t seed, std::size_t arity, std::int64_t lo = -5,
                            std::int64_t hi = 5);
// Up to `size` functions over integers whose calls form a DAG; bodies
// often start with a total match and contain funs with leading matches.
Module gen_module(std::uint64_t seed, std::size_t size);

}  // namespace mer::equiv
