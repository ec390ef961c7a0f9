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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mer/ast.hpp"

namespace mer::interp {

struct Closure;

struct Value {
  enum class Kind { Int, Atom, Tuple, Closure };
  Kind kind = Kind::Int;
  std::int64_t integer = 0;
  std::string atom;
  std::vector<Value> elements;
  std::shared_ptr<const Closure> closure;

  static Value of_int(std::int64_t v);
  static Value of_atom(std::string name);
  static Value of_tuple(std::vector<Value> elems);
  static Value of_bool(bool b) { return of_atom(b ? "true" : "false"); }

  bool operator==(const Value& o) const;
};

using Env = std::map<std::string, Value>;
using Trace = std::vector<Value>;

// The captured environment never holds the parameter variables.
struct Closure {
  std::vector<PatternPtr> params;
  std::vector<ExprPtr> body;
  Env captured;
};

std::string to_string(const Value& v);
std::string to_string(const Env& env);
std::string to_string(std::span<const Value> values);

enum class ExnKind { Badmatch, Badarith, Badfun, Badarity, Undef, Unbound };
const char* exn_name(ExnKind k);

struct Outcome {
  enum class Kind { Ok, Exn, Timeout };
  Kind kind = Kind::Ok;
  Value value;           // Ok
  Env env_after;         // Ok
  ExnKind exn = ExnKind::Badmatch;  // Exn
  Trace trace;           // entries emitted before termination

  static Outcome ok(Value v, Env env, Trace t) {
    return {Kind::Ok, std::move(v), std::move(env), ExnKind::Badmatch, std::move(t)};
  }
  static Outcome raised(ExnKind k, Trace t) { return {Kind::Exn, {}, {}, k, std::move(t)}; }
  static Outcome timeout(Trace t) { return {Kind::Timeout, {}, {}, ExnKind::Badmatch, std::move(t)}; }

  bool operator==(const Outcome& o) const;
};

std::string to_string(const Outcome& o);

// Environment algebra.
std::optional<std::vector<Value>> env_lookup(const Env& env, std::span<const std::string> names);
Env env_remove(const Env& env, std::span<const std::string> names);
// Right-biased union; nullopt when a name would be re-mapped to a different
// value.
std::optional<Env> env_concat(const Env& env, const Env& bindings);
// New bindings produced by matching `values` against `patterns`; variables
// already bound in `env` (or earlier in the list) must match by equality.
std::optional<Env> get_matching(std::span<const Value> values, std::span<const PatternPtr> patterns,
                                const Env& env);
bool is_matching(std::span<const Value> values, std::span<const PatternPtr> patterns,
                 const Env& env);
// Replaces the environment of an Ok outcome by `saved`.
Outcome restore_env(Outcome o, const Env& saved);

// Native stack an evaluation may use before it stops with Timeout, so that a
// deep recursion exhausts a resource budget rather than the thread's stack.
inline constexpr std::size_t kMaxStackBytes = std::size_t{1} << 20;

Outcome eval_expr(const Expr& e, const Env& env, std::uint64_t fuel, const Module* m = nullptr);
Outcome eval_sequence(std::span<const ExprPtr> seq, const Env& env, std::uint64_t fuel,
                      const Module* m = nullptr);
Outcome eval_call(const Module& m, const FunKey& k, std::span<const Value> args,
                  std::uint64_t fuel);

}  // namespace mer::interp
