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

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace mer {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = 0;

struct SourcePos {
  int line = 0;
  int col = 0;
  auto operator<=>(const SourcePos&) const = default;
};

// Start inclusive, end exclusive.
struct SourceSpan {
  SourcePos start;
  SourcePos end;
  bool contains(SourcePos p) const { return start <= p && p < end; }
  bool operator==(const SourceSpan&) const = default;
};

struct FunKey {
  std::string name;
  std::size_t arity = 0;
  auto operator<=>(const FunKey&) const = default;
  std::string str() const { return name + "/" + std::to_string(arity); }
};

enum class BinaryOp { Add, Sub, Mul, Div, Eq, Lt };

const char* op_text(BinaryOp op);

struct Pattern;
using PatternPtr = std::shared_ptr<const Pattern>;

struct Pattern {
  enum class Kind { Var, Int, Atom, Tuple, Meta };
  Kind kind = Kind::Var;
  NodeId id = kNoNode;
  SourceSpan span;
  std::string name;                  // Var, Atom, Meta
  std::int64_t value = 0;            // Int
  bool meta_list = false;            // Meta
  std::vector<PatternPtr> elements;  // Tuple
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Child layout per kind:
//   Binary  children = {lhs, rhs}
//   Match   pattern, children = {rhs}
//   Block   children = body
//   Lambda  params, children = body, body_id names the body sequence
//   Call    name, children = args (name may be a metavariable)
//   Apply   children = {callee, args...}
//   Print   children = {arg}
//   Tuple   children = elements
struct Expr {
  enum class Kind { Int, Atom, Var, Binary, Match, Block, Lambda, Call, Apply, Print, Tuple, Meta };
  Kind kind = Kind::Int;
  NodeId id = kNoNode;
  SourceSpan span;
  std::string name;
  std::int64_t value = 0;
  BinaryOp op = BinaryOp::Add;
  bool meta_list = false;
  bool name_is_meta = false;
  PatternPtr pattern;
  std::vector<PatternPtr> params;
  NodeId body_id = kNoNode;
  std::vector<ExprPtr> children;

  const Expr& callee() const { return *children.front(); }
  std::span<const ExprPtr> args() const {
    if (kind == Kind::Apply) return std::span<const ExprPtr>(children).subspan(1);
    return children;
  }
};

struct FunDef;
using FunDefPtr = std::shared_ptr<const FunDef>;

struct FunDef {
  std::string name;
  bool name_is_meta = false;
  std::vector<PatternPtr> params;
  std::vector<ExprPtr> body;
  NodeId id = kNoNode;
  NodeId body_id = kNoNode;
  SourceSpan span;

  std::size_t arity() const { return params.size(); }
  FunKey key() const { return {name, params.size()}; }
};

class IdAllocator {
 public:
  explicit IdAllocator(NodeId next = 1) : next_(next) {}
  NodeId fresh() { return next_++; }
  NodeId peek() const { return next_; }

 private:
  NodeId next_;
};

// Construction helpers. Every call draws a fresh id.
namespace make {
ExprPtr int_lit(IdAllocator& ids, std::int64_t v);
ExprPtr atom(IdAllocator& ids, std::string name);
ExprPtr var(IdAllocator& ids, std::string name);
ExprPtr binary(IdAllocator& ids, BinaryOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr match(IdAllocator& ids, PatternPtr pattern, ExprPtr rhs);
ExprPtr block(IdAllocator& ids, std::vector<ExprPtr> body);
ExprPtr lambda(IdAllocator& ids, std::vector<PatternPtr> params, std::vector<ExprPtr> body);
ExprPtr call(IdAllocator& ids, std::string name, std::vector<ExprPtr> args);
ExprPtr apply(IdAllocator& ids, ExprPtr callee, std::vector<ExprPtr> args);
ExprPtr print(IdAllocator& ids, ExprPtr arg);
ExprPtr tuple(IdAllocator& ids, std::vector<ExprPtr> elements);
PatternPtr pvar(IdAllocator& ids, std::string name);
PatternPtr pint(IdAllocator& ids, std::int64_t v);
PatternPtr patom(IdAllocator& ids, std::string name);
PatternPtr ptuple(IdAllocator& ids, std::vector<PatternPtr> elements);
FunDefPtr fundef(IdAllocator& ids, std::string name, std::vector<PatternPtr> params,
                 std::vector<ExprPtr> body);
}  // namespace make

// Deep copies with every node renumbered.
ExprPtr clone_fresh(const Expr& e, IdAllocator& ids);
PatternPtr clone_fresh(const Pattern& p, IdAllocator& ids);

// Pattern <-> expression conversions used where a template moves a fragment
// between a pattern position and an expression position. Fresh ids.
ExprPtr pattern_to_expr(const Pattern& p, IdAllocator& ids);
std::optional<PatternPtr> expr_to_pattern(const Expr& e, IdAllocator& ids);

// Structural equality ignoring ids and spans.
bool same_shape(const Expr& a, const Expr& b);
bool same_shape(const Pattern& a, const Pattern& b);
bool same_shape(const FunDef& a, const FunDef& b);
bool same_shape(std::span<const ExprPtr> a, std::span<const ExprPtr> b);
bool same_shape(std::span<const PatternPtr> a, std::span<const PatternPtr> b);

// Pre-order, source order. Lambda params are visited before the body.
template <class F>
void for_each_expr(const Expr& e, F&& f) {
  f(e);
  for (const auto& c : e.children) for_each_expr(*c, f);
}

template <class F>
void for_each_pattern_var(const Pattern& p, F&& f) {
  if (p.kind == Pattern::Kind::Var) f(p);
  for (const auto& c : p.elements) for_each_pattern_var(*c, f);
}

class DuplicateDefinition : public std::runtime_error {
 public:
  explicit DuplicateDefinition(FunKey key)
      : std::runtime_error("duplicate definition of " + key.str()), key_(std::move(key)) {}
  const FunKey& key() const { return key_; }

 private:
  FunKey key_;
};

class StaleRef : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownNode : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NodeInfo {
  enum class Kind { Expr, Pattern, FunDef, Body };
  Kind kind = Kind::Expr;
  const Expr* expr = nullptr;
  const Pattern* pattern = nullptr;
  const FunDef* fundef = nullptr;  // for Body: set when the body belongs to a FunDef
  const Expr* lambda = nullptr;    // for Body: set when the body belongs to a Lambda
  NodeId parent = kNoNode;
  std::size_t slot = 0;            // position among the parent's children
  std::size_t def_index = 0;       // index of the enclosing definition
};

// An immutable module snapshot. Copies share structure. Each snapshot built
// by `build` receives a new, process-unique version number.
class Module {
 public:
  Module();

  // Validates (name, arity) uniqueness and renumbers nodes whose ids would
  // repeat (first occurrence in module order keeps its id).
  static Module build(std::vector<FunDefPtr> defs, NodeId next_id);

  std::span<const FunDefPtr> definitions() const;
  std::uint64_t version() const;
  NodeId next_node_id() const;

  const FunDef* find(const FunKey& key) const;
  std::optional<std::size_t> index_of(const FunKey& key) const;
  const NodeInfo* lookup(NodeId id) const;
  const NodeInfo& at(NodeId id) const;
  std::size_t node_count() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

bool same_shape(const Module& a, const Module& b);

}  // namespace mer
