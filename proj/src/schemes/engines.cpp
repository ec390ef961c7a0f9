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

#include "mer/schemes.hpp"
#include "mer/syntax.hpp"

namespace mer::schemes {

namespace {

using rewrite::Fragment;
using rewrite::Instance;
using rewrite::ModuleContext;
using rewrite::ModuleEditor;
using Kind = NodeInfo::Kind;

std::string key_text(const FunKey& k) { return fmt::format("{}/{}", k.name, k.arity); }

// Adds `args` to a match binding; false when a name is bound differently.
bool merge(MetaBinding& b, const MetaBinding& args) {
  for (const auto& [k, v] : args) {
    auto it = b.find(k);
    if (it == b.end()) {
      b.emplace(k, v);
    } else if (rewrite::to_text(it->second) != rewrite::to_text(v)) {
      return false;
    }
  }
  return true;
}

StepOutcome conflicting_args() {
  return StepOutcome::not_applicable("instance argument conflicts with the matched fragment");
}

// Calls to `k` that exist while `k` itself is undefined would change meaning
// once a definition appears.
std::optional<std::string> signature_taken(const Module& m, const FunKey& k) {
  if (m.find(k)) return fmt::format("signature clash: {} is already defined", key_text(k));
  if (!analysis::references(m, k).empty())
    return fmt::format("signature clash: {} is already called", key_text(k));
  return std::nullopt;
}

// Id of the first mention of `name` in `e`, in source order.
std::optional<NodeId> first_mention(const Expr& e, const std::string& name) {
  std::optional<NodeId> hit;
  auto in_pattern = [&](const Pattern& p) {
    for_each_pattern_var(p, [&](const Pattern& v) {
      if (!hit && v.name == name) hit = v.id;
    });
  };
  if (e.kind == Expr::Kind::Var && e.name == name) return e.id;
  if (e.pattern) in_pattern(*e.pattern);
  for (const auto& p : e.params) in_pattern(*p);
  if (hit) return hit;
  for (const auto& c : e.children)
    if (auto h = first_mention(*c, name)) return h;
  return std::nullopt;
}

// Inherent conditions on a bound expression that is evaluated somewhere
// else after the step.
std::optional<std::string> movable(const ModuleContext& ctx, const ExprPtr& e) {
  auto f = Fragment::of(e);
  if (!ctx.pure(f)) return "pure";
  if (!ctx.free_vars(f).empty()) return "closed";
  if (!rewrite::total(f)) return "total";
  if (!analysis::non_bind(*e, {})) return "non_bind";
  return std::nullopt;
}

}  // namespace

StepOutcome run_local(const Local& s, const Module& m, NodeRef target, const MetaBinding& args) {
  const NodeInfo& info = analysis::resolve(m, target);
  if (info.kind != Kind::Expr) return StepOutcome::not_applicable("target is not an expression");
  if (args.empty()) return rewrite::apply_rule(s.rule, m, target);

  auto b = rewrite::match(s.rule.lhs, m, target);
  if (!b) return StepOutcome::not_applicable(fmt::format("`{}` does not match", s.rule.lhs.text));
  if (!merge(*b, args)) return conflicting_args();
  ModuleContext ctx(m, target);
  auto verdict = rewrite::evaluate(s.rule.when, *b, ctx);
  if (!verdict.holds) return StepOutcome::violated(verdict.predicate, target);
  ModuleEditor ed(m);
  try {
    auto out = rewrite::substitute(s.rule.rhs, *b, ed.ids());
    ed.replace_expr(target.node, out.expr);
    return StepOutcome::applied(ed.commit(), out.expr->id);
  } catch (const rewrite::SubstitutionError& e) {
    return StepOutcome::not_applicable(e.what());
  }
}

StepOutcome run_introduce_variable(const IntroduceVariable& s, const Module& m, NodeRef target,
                                   const MetaBinding& args) {
  const NodeInfo& info = analysis::resolve(m, target);
  if (info.kind != Kind::Expr) return StepOutcome::not_applicable("target is not an expression");
  auto b = rewrite::match(s.ref_rule.lhs, m, target);
  if (!b) return StepOutcome::not_applicable(fmt::format("`{}` does not match", s.ref_rule.lhs.text));
  if (!merge(*b, args)) return conflicting_args();

  ModuleContext ctx(m, target);
  for (const Condition* c : {&s.ref_rule.when, &s.when}) {
    auto verdict = rewrite::evaluate(*c, *b, ctx);
    if (!verdict.holds) return StepOutcome::violated(verdict.predicate, target);
  }

  NodeRef here = analysis::scope(m, target);
  NodeRef dest = here;
  const Expr* owner = nullptr;
  if (s.placement == Placement::OuterScope) {
    owner = m.at(here.node).lambda;
    if (!owner) return StepOutcome::not_applicable("binding is already at function scope");
    dest = analysis::scope(m, analysis::ref(m, owner->id));
  }

  ModuleEditor ed(m);
  ExprPtr def, replacement;
  try {
    def = rewrite::substitute(s.def_template, *b, ed.ids()).expr;
    replacement = rewrite::substitute(s.ref_rule.rhs, *b, ed.ids()).expr;
  } catch (const rewrite::SubstitutionError& e) {
    return StepOutcome::not_applicable(e.what());
  }
  if (def->kind != Expr::Kind::Match || def->pattern->kind != Pattern::Kind::Var)
    return StepOutcome::not_applicable("definition template does not bind a variable");
  const std::string& name = def->pattern->name;
  const ExprPtr& value = def->children.front();

  if (owner) {
    // The binding keeps its name: nothing else in the function may mention
    // it, and inside the fun the relocated match must be the first mention.
    bool ok = analysis::fresh_outside(m, name, target, owner->id);
    const auto& here_info = m.at(target.node);
    auto first = first_mention(*owner, name);
    ok = ok && here_info.expr->kind == Expr::Kind::Match &&
         here_info.expr->pattern->kind == Pattern::Kind::Var && first &&
         *first == here_info.expr->pattern->id;
    if (!ok) return StepOutcome::violated("fresh", target, fmt::format("`{}` clashes in the outer scope", name));
  } else if (!analysis::fresh(m, name, target)) {
    return StepOutcome::violated("fresh", target, fmt::format("`{}` is already used", name));
  }
  if (auto p = movable(ctx, value)) return StepOutcome::violated(*p, target);

  ed.replace_expr(target.node, replacement);
  ed.prepend_to_body(dest.node, def);
  return StepOutcome::applied(ed.commit(), def->id);
}

StepOutcome run_introduce_function(const IntroduceFunction& s, const Module& m, NodeRef target,
                                   const MetaBinding& args) {
  const NodeInfo& info = analysis::resolve(m, target);
  std::optional<MetaBinding> b;
  if (info.kind == Kind::Expr) {
    b = rewrite::match(s.ref_rule.lhs, m, target);
  } else if (info.kind == Kind::Body && s.ref_rule.lhs.expr->kind == Expr::Kind::Meta &&
             !s.ref_rule.lhs.expr->meta_list) {
    const auto& seq = info.fundef ? info.fundef->body : info.lambda->children;
    b = MetaBinding{{s.ref_rule.lhs.expr->name, Fragment::of(seq)}};
  } else {
    return StepOutcome::not_applicable("target is neither an expression nor a body");
  }
  if (!b) return StepOutcome::not_applicable(fmt::format("`{}` does not match", s.ref_rule.lhs.text));
  if (!merge(*b, args)) return conflicting_args();

  ModuleContext ctx(m, target);
  for (const Condition* c : {&s.ref_rule.when, &s.when}) {
    auto verdict = rewrite::evaluate(*c, *b, ctx);
    if (!verdict.holds) return StepOutcome::violated(verdict.predicate, target);
  }
  if (info.kind == Kind::Expr && !analysis::non_bind(m, target))
    return StepOutcome::violated("non_bind", target);

  ModuleEditor ed(m);
  Instance def;
  ExprPtr call;
  try {
    def = rewrite::substitute(s.def_template, *b, ed.ids());
    call = rewrite::substitute(s.ref_rule.rhs, *b, ed.ids()).expr;
  } catch (const rewrite::SubstitutionError& e) {
    return StepOutcome::not_applicable(e.what());
  }

  auto names = analysis::vars(def.fundef->params);
  std::size_t occurrences = 0;
  for (const auto& p : def.fundef->params) for_each_pattern_var(*p, [&](const Pattern&) { ++occurrences; });
  if (occurrences != names.size())
    return StepOutcome::violated("linear_params", target, "a parameter name repeats");
  auto bound = analysis::bound_at(m, target);
  for (const auto& n : names)
    if (!bound.count(n))
      return StepOutcome::violated("params_bound", target,
                                   fmt::format("`{}` is not bound at the target", n));
  if (auto clash = signature_taken(m, def.fundef->key()))
    return StepOutcome::violated("unique_signature", target, *clash);

  if (info.kind == Kind::Expr) {
    ed.replace_expr(target.node, call);
  } else {
    ed.replace_body(target.node, {call});
  }
  ed.append_definition(def.fundef);
  return StepOutcome::applied(ed.commit(), def.fundef->id);
}

namespace {

void expr_metas(const Expr& e, std::set<std::string>& out) {
  for_each_expr(e, [&](const Expr& x) {
    if (x.kind == Expr::Kind::Meta) out.insert(x.name);
  });
}

// Expressions the definition rule hands to every reference site. Each site
// is an arbitrary context, so the expression may not bind anything there.
std::optional<std::string> leaking_fragment(const RewriteRule& ref_rule, const MetaBinding& def) {
  std::set<std::string> used;
  for (const auto& e : ref_rule.rhs.exprs) expr_metas(*e, used);
  if (ref_rule.rhs.expr) expr_metas(*ref_rule.rhs.expr, used);
  for (const auto& n : used) {
    auto it = def.find(n);
    if (it == def.end()) continue;
    const Fragment& f = it->second;
    if (f.kind == Fragment::Kind::Expr && !analysis::non_bind(*f.expr, {})) return n;
    if (f.kind == Fragment::Kind::ExprList)
      for (const auto& e : f.exprs)
        if (!analysis::non_bind(*e, {})) return n;
  }
  return std::nullopt;
}

}  // namespace

StepOutcome run_function_refactoring(const FunctionRefactoring& s, const Module& m, NodeRef target,
                                     const MetaBinding& args) {
  const NodeInfo& info = analysis::resolve(m, target);
  if (info.kind != Kind::FunDef) return StepOutcome::not_applicable("target is not a function");
  const FunDef& fn = *info.fundef;
  auto b = rewrite::match(s.def_rule.lhs, m, target);
  if (!b) return StepOutcome::not_applicable(fmt::format("`{}` does not match", s.def_rule.lhs.text));
  if (!merge(*b, args)) return conflicting_args();

  {
    ModuleContext ctx(m, target);
    for (const Condition* c : {&s.def_rule.when, &s.when}) {
      auto verdict = rewrite::evaluate(*c, *b, ctx);
      if (!verdict.holds) return StepOutcome::violated(verdict.predicate, target);
    }
  }

  if (auto leak = leaking_fragment(s.ref_rule, *b))
    return StepOutcome::violated("non_bind", target,
                                 fmt::format("@{} binds variables and is copied to every call", *leak));

  ModuleEditor ed(m);
  Instance clause;
  try {
    clause = rewrite::substitute(s.def_rule.rhs, *b, ed.ids());
  } catch (const rewrite::SubstitutionError& e) {
    return StepOutcome::not_applicable(e.what());
  }
  if (clause.exprs.empty()) return StepOutcome::not_applicable("the rewritten body would be empty");
  auto names = analysis::vars(clause.params);
  std::size_t occurrences = 0;
  for (const auto& p : clause.params) for_each_pattern_var(*p, [&](const Pattern&) { ++occurrences; });
  if (occurrences != names.size())
    return StepOutcome::violated("fresh", target, "a parameter name repeats");

  auto d = std::make_shared<FunDef>(fn);
  d->params = clause.params;
  d->body = clause.exprs;
  FunKey old_key = fn.key(), new_key = d->key();
  if (new_key != old_key)
    if (auto clash = signature_taken(m, new_key))
      return StepOutcome::violated("unique_signature", target, *clash);

  // Sites that the definition rule moves or drops cannot also be rewritten.
  std::set<NodeId> kept;
  for (const auto& e : d->body) for_each_expr(*e, [&](const Expr& x) { kept.insert(x.id); });
  auto sites = analysis::references(m, old_key);
  for (const auto& r : sites)
    if (analysis::is_within(m, r.node, fn.id) && !kept.count(r.node))
      return StepOutcome::violated("no_self_reference", r, "the moved code calls the function");

  ed.replace_definition(fn.id, d);
  for (const auto& site : sites) {
    auto rb = rewrite::match(s.ref_rule.lhs, m, site);
    if (!rb) return StepOutcome::not_applicable(fmt::format("reference `{}` does not match", pretty(analysis::resolve_expr(m, site))));
    MetaBinding all = *b;
    if (!merge(all, *rb)) return conflicting_args();
    ModuleContext ctx(m, site);
    for (const Condition* c : {&s.ref_rule.when, &s.when}) {
      auto verdict = rewrite::evaluate(*c, all, ctx);
      if (!verdict.holds) return StepOutcome::violated(verdict.predicate, site);
    }
    try {
      auto out = rewrite::substitute(s.ref_rule.rhs, all, ed.ids());
      auto call = std::make_shared<Expr>(analysis::resolve_expr(m, site));
      call->children = std::move(out.exprs);
      ed.replace_expr(site.node, call);
    } catch (const rewrite::SubstitutionError& e) {
      return StepOutcome::not_applicable(e.what());
    }
  }
  try {
    return StepOutcome::applied(ed.commit(), fn.id);
  } catch (const DuplicateDefinition& e) {
    return StepOutcome::violated("unique_signature", target, e.what());
  }
}

StepOutcome run_signature_refactoring(const SignatureRefactoring& s, const Module& m,
                                      NodeRef target, const MetaBinding& args) {
  const NodeInfo& info = analysis::resolve(m, target);
  if (info.kind != Kind::FunDef) return StepOutcome::not_applicable("target is not a function");
  const FunDef& fn = *info.fundef;
  const RewriteRule& r = s.head_rule;
  auto b = rewrite::match(r.lhs, m, target);
  if (!b) return StepOutcome::not_applicable(fmt::format("`{}` does not match the head", r.lhs.text));
  if (!merge(*b, args)) return conflicting_args();
  {
    ModuleContext ctx(m, target);
    auto verdict = rewrite::evaluate(r.when, *b, ctx);
    if (!verdict.holds) return StepOutcome::violated(verdict.predicate, target);
  }

  ModuleEditor ed(m);
  auto d = std::make_shared<FunDef>(fn);
  try {
    auto head = rewrite::substitute_head(r.rhs, *b, ed.ids());
    d->name = head.name;
    d->params = head.params;
  } catch (const rewrite::SubstitutionError& e) {
    return StepOutcome::not_applicable(e.what());
  }
  if (!is_lower_name(d->name)) return StepOutcome::not_applicable(fmt::format("`{}` is not a function name", d->name));
  FunKey old_key = fn.key(), new_key = d->key();
  if (new_key != old_key)
    if (auto clash = signature_taken(m, new_key))
      return StepOutcome::violated("unique_signature", target, *clash);

  ed.replace_definition(fn.id, d);
  for (const auto& site : analysis::references(m, old_key)) {
    auto rb = rewrite::match(r.lhs, m, site);
    if (!rb) return StepOutcome::not_applicable(fmt::format("reference `{}` does not match", pretty(analysis::resolve_expr(m, site))));
    if (!merge(*rb, args)) return conflicting_args();
    try {
      auto out = rewrite::substitute(r.rhs, *rb, ed.ids());
      auto call = std::make_shared<Expr>(analysis::resolve_expr(m, site));
      call->name = out.name;
      call->children = std::move(out.exprs);
      ed.replace_expr(site.node, call);
    } catch (const rewrite::SubstitutionError& e) {
      return StepOutcome::not_applicable(e.what());
    }
  }
  try {
    return StepOutcome::applied(ed.commit(), fn.id);
  } catch (const DuplicateDefinition& e) {
    return StepOutcome::violated("unique_signature", target, e.what());
  }
}

StepOutcome run(const SchemeInstance& s, const Module& m, NodeRef target, const MetaBinding& args) {
  for (const auto& p : s.params)
    if (!args.count(p.name))
      throw std::invalid_argument(fmt::format("{}: missing argument {}", s.name, p.name));
  return std::visit(
      [&](const auto& x) -> StepOutcome {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Local>) return run_local(x, m, target, args);
        if constexpr (std::is_same_v<T, IntroduceVariable>) return run_introduce_variable(x, m, target, args);
        if constexpr (std::is_same_v<T, IntroduceFunction>) return run_introduce_function(x, m, target, args);
        if constexpr (std::is_same_v<T, FunctionRefactoring>) return run_function_refactoring(x, m, target, args);
        if constexpr (std::is_same_v<T, SignatureRefactoring>) return run_signature_refactoring(x, m, target, args);
      },
      s.scheme);
}

}  // namespace mer::schemes
