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

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mer/analysis.hpp"
#include "mer/ast.hpp"

namespace mer::rewrite {

using analysis::NodeRef;

// A piece of object syntax held by a metavariable.
struct Fragment {
  enum class Kind { Expr, Pattern, Name, ExprList, PatternList, NameList };
  Kind kind = Kind::Expr;
  ExprPtr expr;
  PatternPtr pattern;
  std::string name;
  std::vector<ExprPtr> exprs;
  std::vector<PatternPtr> patterns;
  std::vector<std::string> names;

  static Fragment of(ExprPtr e);
  static Fragment of(PatternPtr p);
  static Fragment of_name(std::string n);
  static Fragment of(std::vector<ExprPtr> es);
  static Fragment of(std::vector<PatternPtr> ps);
  static Fragment of_names(std::vector<std::string> ns);

  bool is_list() const;
};

// Canonical text; two fragments bind "equal" syntax when their texts agree.
std::string to_text(const Fragment& f);

using MetaBinding = std::map<std::string, Fragment>;

class UnboundMetavariable : public std::runtime_error {
 public:
  explicit UnboundMetavariable(const std::string& name)
      : std::runtime_error("unbound metavariable @" + name) {}
};

// Raised when a fragment cannot be placed where the template puts it, e.g.
// an arbitrary expression in a pattern position.
class SubstitutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Template shapes. Which one a rule uses is fixed by the scheme.
//   Expr       `E`
//   Clause     `(P...) -> E...`   matched against a function or fun clause
//   Signature  `Name(A...)`       matched against a definition head or call
//   ArgList    `(A...)`           matched against the arguments of a call
//   FunDef     `Name(P...) -> E.` (construction only)
enum class Sort { Expr, Clause, Signature, ArgList, FunDef };

struct MetaPattern {
  Sort sort = Sort::Expr;
  ExprPtr expr;
  std::vector<PatternPtr> params;
  std::vector<ExprPtr> exprs;  // Clause body, Signature/ArgList arguments
  std::string name;            // Signature, FunDef
  bool name_is_meta = false;
  std::string text;
};

// Throws ParseError, or std::invalid_argument when a sequence holds more
// than one list metavariable.
MetaPattern parse_meta_pattern(std::string_view text, Sort sort);

// The concrete object a template is matched against or produces.
struct Instance {
  Sort sort = Sort::Expr;
  ExprPtr expr;
  std::vector<PatternPtr> params;  // Clause, FunDef, Signature on a head
  std::vector<ExprPtr> exprs;      // Clause body, call arguments
  std::string name;
  bool head = false;               // Signature: params rather than exprs
  FunDefPtr fundef;
};

std::string pretty(const Instance& i);

// Owning pointers to nodes of a snapshot.
ExprPtr shared_expr(const Module& m, NodeId id);
PatternPtr shared_pattern(const Module& m, NodeId id);

std::optional<MetaBinding> match(const MetaPattern& p, const Instance& subject);
// Matches against the node that `n` designates, read in the pattern's sort.
std::optional<MetaBinding> match(const MetaPattern& p, const Module& m, NodeRef n);

// Nodes copied from the template get fresh ids; bound fragments placed in a
// position of their own kind keep theirs.
Instance substitute(const MetaPattern& p, const MetaBinding& b, IdAllocator& ids);
// Signature template producing a definition head (parameter patterns).
Instance substitute_head(const MetaPattern& p, const MetaBinding& b, IdAllocator& ids);

// Conditions.
struct CondTerm {
  bool is_meta = false;
  bool list = false;
  std::string name;  // metavariable or function name
  std::vector<CondTerm> args;
};

struct CondAtom {
  std::optional<CondTerm> bind;  // `@Vars... = term`
  CondTerm term;
  std::string text;
};

struct Condition {
  std::vector<CondAtom> atoms;
  std::string text;
  bool empty() const { return atoms.empty(); }
};

Condition parse_condition(std::string_view text);

// Semantic queries used by conditions, answered either against a module
// position or against a bare set of bound names.
class ConditionContext {
 public:
  virtual ~ConditionContext() = default;
  virtual std::vector<std::string> free_vars(const Fragment& f) const = 0;
  virtual bool pure(const Fragment& f) const = 0;
  virtual bool non_bind(const Fragment& f) const = 0;
  virtual bool fresh(const std::string& name) const = 0;
};

class ModuleContext : public ConditionContext {
 public:
  ModuleContext(const Module& m, NodeRef target);
  std::vector<std::string> free_vars(const Fragment& f) const override;
  bool pure(const Fragment& f) const override;
  bool non_bind(const Fragment& f) const override;
  bool fresh(const std::string& name) const override;

 private:
  bool is_node(const ExprPtr& e) const;
  bool is_target_body(const std::vector<ExprPtr>& es) const;

  const Module& m_;
  NodeRef target_;
  std::set<std::string> bound_;
  std::set<FunKey> impure_;
};

class StandaloneContext : public ConditionContext {
 public:
  // `bound`: names bound by the surrounding context. `taken`: names a
  // fresh variable must additionally avoid.
  StandaloneContext(std::set<std::string> bound, std::set<std::string> taken);
  std::vector<std::string> free_vars(const Fragment& f) const override;
  bool pure(const Fragment& f) const override;
  bool non_bind(const Fragment& f) const override;
  bool fresh(const std::string& name) const override;

 private:
  std::set<std::string> bound_;
  std::set<std::string> taken_;
};

bool total(const Fragment& f);

struct ConditionResult {
  bool holds = true;
  std::string predicate;  // first failing predicate
};

// Binding equations extend `b`.
ConditionResult evaluate(const Condition& c, MetaBinding& b, const ConditionContext& ctx);

struct RewriteRule {
  Sort sort = Sort::Expr;
  MetaPattern lhs;
  MetaPattern rhs;
  Condition when;
  std::string text;
};

// `lhs`, a line of three or more dashes, `rhs`, optionally `WHEN cond`.
RewriteRule parse_rule(std::string_view text, Sort sort);
RewriteRule parse_rule(std::string_view lhs, std::string_view rhs, std::string_view when, Sort sort);

struct StepOutcome {
  enum class Kind { Applied, NotApplicable, PreconditionViolated };
  Kind kind = Kind::NotApplicable;
  Module snapshot;
  NodeRef result;
  std::string predicate;
  NodeRef location;
  std::string reason;

  static StepOutcome applied(Module m, NodeId result);
  static StepOutcome not_applicable(std::string reason);
  static StepOutcome violated(std::string predicate, NodeRef location, std::string reason = {});
  bool ok() const { return kind == Kind::Applied; }
};

std::string describe(const StepOutcome& o);

// Functional edits over a snapshot; `commit` builds the next snapshot.
class ModuleEditor {
 public:
  explicit ModuleEditor(const Module& m);
  IdAllocator& ids() { return ids_; }
  const std::vector<FunDefPtr>& definitions() const { return defs_; }

  void replace_expr(NodeId id, ExprPtr e);
  // A fun or function body sequence.
  void replace_body(NodeId body_id, std::vector<ExprPtr> seq);
  void prepend_to_body(NodeId body_id, ExprPtr e);
  void replace_definition(NodeId def_id, FunDefPtr d);
  void append_definition(FunDefPtr d);

  // Throws DuplicateDefinition.
  Module commit() const;

 private:
  std::vector<FunDefPtr> defs_;
  IdAllocator ids_;
};

// Applies `r` at `n`. Expr rules rewrite the expression; Clause rules the
// params and body of a definition or fun; Signature rules a definition head
// or a call's name and arguments; ArgList rules a call's arguments.
StepOutcome apply_rule(const RewriteRule& r, const Module& m, NodeRef n);

// As above with a caller-supplied condition context.
StepOutcome apply_rule(const RewriteRule& r, const Module& m, NodeRef n,
                       const ConditionContext& ctx);

}  // namespace mer::rewrite
