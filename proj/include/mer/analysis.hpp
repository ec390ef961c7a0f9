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
#include <optional>
#include <span>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "mer/ast.hpp"

namespace mer::analysis {

// A node reference pinned to one module snapshot.
struct NodeRef {
  std::uint64_t module_version = 0;
  NodeId node = kNoNode;
  bool operator==(const NodeRef&) const = default;
};

inline NodeRef ref(const Module& m, NodeId id) { return {m.version(), id}; }

// Throws StaleRef on a version mismatch and UnknownNode when the id is absent.
const NodeInfo& resolve(const Module& m, NodeRef r);
const Expr& resolve_expr(const Module& m, NodeRef r);
const FunDef& resolve_fundef(const Module& m, NodeRef r);

// Re-pins `r` to `newer` when its node survived the edit.
std::optional<NodeRef> rebase(NodeRef r, const Module& newer);

// Marks a variable bound by the surrounding context rather than by a node.
inline constexpr NodeId kContextBinder = static_cast<NodeId>(-1);

struct Occurrence {
  NodeId node = kNoNode;   // Var expression or Var pattern
  std::string name;
  bool binding = false;
  NodeId binder = kNoNode; // reference occurrences; kNoNode when unbound
  NodeId scope = kNoNode;  // body where the name is visible
};

// Classification of every variable occurrence in one function (or one
// standalone expression), following evaluation order: a match rhs is visited
// before its pattern, and a pattern variable that is already bound is a
// reference occurrence (an equality test).
class BindingInfo {
 public:
  const Occurrence* at(NodeId node) const;
  const std::vector<Occurrence>& occurrences() const { return occurrences_; }
  std::vector<const Occurrence*> references_to(NodeId binder) const;

  // Names bound just before `node` is evaluated (recorded for probe nodes).
  std::optional<std::set<std::string>> bound_before(NodeId node) const;

 private:
  friend class BindingWalker;
  std::vector<Occurrence> occurrences_;
  std::unordered_map<NodeId, std::size_t> by_node_;
  std::unordered_map<NodeId, std::set<std::string>> probes_;
};

BindingInfo bindings(const FunDef& d, std::optional<NodeId> probe = std::nullopt);
BindingInfo bindings(const Expr& e, const std::set<std::string>& context);

// Ordered by first occurrence in source order.
std::vector<std::string> free_vars(const Module& m, NodeRef e);
std::vector<std::string> free_vars(const Expr& e, const std::set<std::string>& context);
std::vector<std::string> free_vars_of_body(const Module& m, NodeRef body);

// Free variables that have no binding at all at the expression's position.
std::vector<std::string> unbound_vars(const Module& m, NodeRef e);

std::vector<std::string> vars(std::span<const PatternPtr> ps);

// Names bound at the start of evaluating `e` (or of a body sequence).
std::set<std::string> bound_at(const Module& m, NodeRef e);

std::set<FunKey> impure_functions(const Module& m);
bool pure(const Module& m, NodeRef e);
bool pure(const Module& m, const Expr& e);
bool pure_expr(const Expr& e, const std::set<FunKey>& impure);

bool closed(const Module& m, NodeRef e);

bool non_bind(const Module& m, NodeRef e);
// Context-free reading: `e` introduces no binding visible after it.
bool non_bind(const Expr& e, const std::set<std::string>& context);

bool fresh(const Module& m, const std::string& name, NodeRef ctx);
// Occurrences of `name` in the enclosing function but outside `excluded`.
bool fresh_outside(const Module& m, const std::string& name, NodeRef ctx, NodeId excluded);

// Evaluation of `e` can neither raise nor diverge. Conservative: accepts
// literals, funs, tuples and blocks of such, and integer arithmetic whose
// result folds without overflow or division by zero.
bool total(const Expr& e);

NodeRef scope(const Module& m, NodeRef e);
NodeRef top_expression(const Module& m, NodeRef e);
NodeRef function(const Module& m, NodeRef e);
std::string name(const Module& m, NodeRef f);
std::vector<PatternPtr> function_params(const Module& m, NodeRef f);
NodeRef body(const Module& m, NodeRef f);
std::vector<NodeRef> references(const Module& m, const FunKey& k);
std::optional<NodeRef> function_part(const Module& m, NodeRef e);

// Ancestors of `id`, innermost first, up to and including the FunDef.
std::vector<NodeId> ancestors(const Module& m, NodeId id);
bool is_within(const Module& m, NodeId node, NodeId ancestor);

}  // namespace mer::analysis
