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

#include <regex>

#include <fmt/format.h>

#include "mer/rewrite.hpp"
#include "mer/syntax.hpp"

namespace mer::rewrite {

namespace {

std::string trim(std::string_view v) {
  while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
  while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
  return std::string(v);
}

}  // namespace

RewriteRule parse_rule(std::string_view lhs, std::string_view rhs, std::string_view when,
                       Sort sort) {
  RewriteRule r;
  r.sort = sort;
  r.lhs = parse_meta_pattern(trim(lhs), sort);
  r.rhs = parse_meta_pattern(trim(rhs), sort);
  r.when = parse_condition(trim(when));
  r.text = fmt::format("{}\n-----\n{}", r.lhs.text, r.rhs.text);
  if (!r.when.empty()) r.text += "\nWHEN " + r.when.text;
  return r;
}

RewriteRule parse_rule(std::string_view text, Sort sort) {
  static const std::regex separator(R"(\s-{3,}\s)");
  static const std::regex when_kw(R"((^|\s)WHEN(\s|$))");
  std::string s = " " + std::string(text) + " ";
  std::smatch sep;
  if (!std::regex_search(s, sep, separator))
    throw std::invalid_argument("rewrite rule without a `-----` separator");
  std::string lhs = sep.prefix().str();
  std::string rest = sep.suffix().str();
  std::string cond;
  std::smatch w;
  if (std::regex_search(rest, w, when_kw)) {
    cond = w.suffix().str();
    rest = w.prefix().str();
  }
  return parse_rule(lhs, rest, cond, sort);
}

StepOutcome StepOutcome::applied(Module m, NodeId result) {
  StepOutcome o;
  o.kind = Kind::Applied;
  o.result = analysis::ref(m, result);
  o.snapshot = std::move(m);
  return o;
}

StepOutcome StepOutcome::not_applicable(std::string reason) {
  StepOutcome o;
  o.kind = Kind::NotApplicable;
  o.reason = std::move(reason);
  return o;
}

StepOutcome StepOutcome::violated(std::string predicate, NodeRef location, std::string reason) {
  StepOutcome o;
  o.kind = Kind::PreconditionViolated;
  o.predicate = std::move(predicate);
  o.location = location;
  o.reason = std::move(reason);
  return o;
}

std::string describe(const StepOutcome& o) {
  switch (o.kind) {
    case StepOutcome::Kind::Applied: return "applied";
    case StepOutcome::Kind::NotApplicable: return "not applicable: " + o.reason;
    case StepOutcome::Kind::PreconditionViolated: {
      std::string out = "precondition violated: " + o.predicate;
      if (!o.reason.empty()) out += " (" + o.reason + ")";
      return out;
    }
  }
  return {};
}

namespace {

struct Rebuild {
  enum class Op { Expr, Body, Prepend };
  Op op;
  NodeId target;
  ExprPtr expr;
  std::vector<ExprPtr> seq;
  bool done = false;

  std::vector<ExprPtr> sequence(const std::vector<ExprPtr>& old) const {
    if (op == Op::Body) return seq;
    std::vector<ExprPtr> out = seq;
    out.insert(out.end(), old.begin(), old.end());
    return out;
  }

  ExprPtr expr_node(const ExprPtr& e) {
    if (op == Op::Expr && e->id == target) {
      done = true;
      return expr;
    }
    if (op != Op::Expr && e->kind == Expr::Kind::Lambda && e->body_id == target) {
      done = true;
      auto copy = std::make_shared<Expr>(*e);
      copy->children = sequence(e->children);
      return copy;
    }
    std::vector<ExprPtr> kids;
    bool changed = false;
    for (const auto& c : e->children) {
      kids.push_back(done ? c : expr_node(c));
      changed |= kids.back() != c;
    }
    if (!changed) return e;
    auto copy = std::make_shared<Expr>(*e);
    copy->children = std::move(kids);
    return copy;
  }

  FunDefPtr def(const FunDefPtr& d) {
    if (op != Op::Expr && d->body_id == target) {
      done = true;
      auto copy = std::make_shared<FunDef>(*d);
      copy->body = sequence(d->body);
      return copy;
    }
    std::vector<ExprPtr> body;
    bool changed = false;
    for (const auto& e : d->body) {
      body.push_back(done ? e : expr_node(e));
      changed |= body.back() != e;
    }
    if (!changed) return d;
    auto copy = std::make_shared<FunDef>(*d);
    copy->body = std::move(body);
    return copy;
  }
};

}  // namespace

ModuleEditor::ModuleEditor(const Module& m)
    : defs_(m.definitions().begin(), m.definitions().end()), ids_(m.next_node_id()) {}

void ModuleEditor::replace_expr(NodeId id, ExprPtr e) {
  Rebuild r{Rebuild::Op::Expr, id, std::move(e), {}};
  for (auto& d : defs_) {
    d = r.def(d);
    if (r.done) return;
  }
  throw UnknownNode(fmt::format("no expression {} to replace", id));
}

void ModuleEditor::replace_body(NodeId body_id, std::vector<ExprPtr> seq) {
  Rebuild r{Rebuild::Op::Body, body_id, nullptr, std::move(seq)};
  for (auto& d : defs_) {
    d = r.def(d);
    if (r.done) return;
  }
  throw UnknownNode(fmt::format("no body {} to replace", body_id));
}

void ModuleEditor::prepend_to_body(NodeId body_id, ExprPtr e) {
  Rebuild r{Rebuild::Op::Prepend, body_id, nullptr, {std::move(e)}};
  for (auto& d : defs_) {
    d = r.def(d);
    if (r.done) return;
  }
  throw UnknownNode(fmt::format("no body {} to extend", body_id));
}

void ModuleEditor::replace_definition(NodeId def_id, FunDefPtr d) {
  for (auto& x : defs_)
    if (x->id == def_id) {
      x = std::move(d);
      return;
    }
  throw UnknownNode(fmt::format("no definition {} to replace", def_id));
}

void ModuleEditor::append_definition(FunDefPtr d) { defs_.push_back(std::move(d)); }

Module ModuleEditor::commit() const { return Module::build(defs_, ids_.peek()); }

StepOutcome apply_rule(const RewriteRule& r, const Module& m, NodeRef n) {
  analysis::resolve(m, n);
  ModuleContext ctx(m, n);
  return apply_rule(r, m, n, ctx);
}

StepOutcome apply_rule(const RewriteRule& r, const Module& m, NodeRef n,
                       const ConditionContext& ctx) {
  const NodeInfo& info = analysis::resolve(m, n);
  auto binding = match(r.lhs, m, n);
  if (!binding) return StepOutcome::not_applicable(fmt::format("`{}` does not match", r.lhs.text));
  auto verdict = evaluate(r.when, *binding, ctx);
  if (!verdict.holds) return StepOutcome::violated(verdict.predicate, n);

  ModuleEditor ed(m);
  NodeId result = n.node;
  try {
    switch (r.sort) {
      case Sort::Expr: {
        auto out = substitute(r.rhs, *binding, ed.ids());
        ed.replace_expr(n.node, out.expr);
        result = out.expr->id;
        break;
      }
      case Sort::Clause: {
        auto out = substitute(r.rhs, *binding, ed.ids());
        if (info.kind == NodeInfo::Kind::FunDef) {
          auto d = std::make_shared<FunDef>(*info.fundef);
          d->params = std::move(out.params);
          d->body = std::move(out.exprs);
          ed.replace_definition(d->id, d);
        } else {
          auto e = std::make_shared<Expr>(*info.expr);
          e->params = std::move(out.params);
          e->children = std::move(out.exprs);
          ed.replace_expr(e->id, e);
        }
        break;
      }
      case Sort::Signature:
        if (info.kind == NodeInfo::Kind::FunDef) {
          auto out = substitute_head(r.rhs, *binding, ed.ids());
          auto d = std::make_shared<FunDef>(*info.fundef);
          d->name = std::move(out.name);
          d->params = std::move(out.params);
          ed.replace_definition(d->id, d);
        } else {
          auto out = substitute(r.rhs, *binding, ed.ids());
          auto e = std::make_shared<Expr>(*info.expr);
          e->name = std::move(out.name);
          e->children = std::move(out.exprs);
          ed.replace_expr(e->id, e);
        }
        break;
      case Sort::ArgList: {
        auto out = substitute(r.rhs, *binding, ed.ids());
        auto e = std::make_shared<Expr>(*info.expr);
        if (e->kind == Expr::Kind::Apply) out.exprs.insert(out.exprs.begin(), e->children.front());
        e->children = std::move(out.exprs);
        ed.replace_expr(e->id, e);
        break;
      }
      case Sort::FunDef:
        return StepOutcome::not_applicable("definition templates are not rewrite rules");
    }
    return StepOutcome::applied(ed.commit(), result);
  } catch (const SubstitutionError& e) {
    return StepOutcome::not_applicable(e.what());
  } catch (const DuplicateDefinition& e) {
    return StepOutcome::violated("unique_signature", n, e.what());
  }
}

}  // namespace mer::rewrite
