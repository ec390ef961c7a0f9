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

#include <algorithm>
#include <limits>
#include <unordered_set>

#include <fmt/format.h>

#include "mer/analysis.hpp"

namespace mer::analysis {

const NodeInfo& resolve(const Module& m, NodeRef r) {
  if (r.module_version != m.version())
    throw StaleRef(fmt::format("reference to node {} was taken on snapshot {}, not {}", r.node,
                               r.module_version, m.version()));
  return m.at(r.node);
}

const Expr& resolve_expr(const Module& m, NodeRef r) {
  const auto& info = resolve(m, r);
  if (info.kind != NodeInfo::Kind::Expr)
    throw UnknownNode(fmt::format("node {} is not an expression", r.node));
  return *info.expr;
}

const FunDef& resolve_fundef(const Module& m, NodeRef r) {
  const auto& info = resolve(m, r);
  if (info.kind != NodeInfo::Kind::FunDef)
    throw UnknownNode(fmt::format("node {} is not a function definition", r.node));
  return *info.fundef;
}

std::optional<NodeRef> rebase(NodeRef r, const Module& newer) {
  if (!newer.lookup(r.node)) return std::nullopt;
  return NodeRef{newer.version(), r.node};
}

namespace {

void collect_ids(const Pattern& p, std::unordered_set<NodeId>& out) {
  out.insert(p.id);
  for (const auto& c : p.elements) collect_ids(*c, out);
}

void collect_ids(const Expr& e, std::unordered_set<NodeId>& out) {
  out.insert(e.id);
  if (e.kind == Expr::Kind::Lambda) out.insert(e.body_id);
  if (e.pattern) collect_ids(*e.pattern, out);
  for (const auto& p : e.params) collect_ids(*p, out);
  for (const auto& c : e.children) collect_ids(*c, out);
}

// Variable occurrence nodes of `e` in source order.
void source_order_vars(const Expr& e, std::vector<NodeId>& out) {
  switch (e.kind) {
    case Expr::Kind::Var: out.push_back(e.id); return;
    case Expr::Kind::Match:
      for_each_pattern_var(*e.pattern, [&](const Pattern& v) { out.push_back(v.id); });
      source_order_vars(*e.children[0], out);
      return;
    case Expr::Kind::Lambda:
      for (const auto& p : e.params)
        for_each_pattern_var(*p, [&](const Pattern& v) { out.push_back(v.id); });
      break;
    default: break;
  }
  for (const auto& c : e.children) source_order_vars(*c, out);
}

const FunDef& enclosing_def(const Module& m, const NodeInfo& info) {
  return *m.definitions()[info.def_index];
}

std::vector<std::string> free_in(const BindingInfo& b, std::span<const ExprPtr> seq,
                                 bool unbound_only) {
  std::unordered_set<NodeId> inside;
  std::vector<NodeId> order;
  for (const auto& e : seq) {
    collect_ids(*e, inside);
    source_order_vars(*e, order);
  }
  std::vector<std::string> out;
  for (NodeId id : order) {
    const Occurrence* o = b.at(id);
    if (!o || o->binding) continue;
    bool outside = o->binder == kNoNode || !inside.count(o->binder);
    if (unbound_only) outside = o->binder == kNoNode;
    if (outside && std::find(out.begin(), out.end(), o->name) == out.end())
      out.push_back(o->name);
  }
  return out;
}

std::span<const ExprPtr> one(const ExprPtr& e) { return {&e, 1}; }

ExprPtr non_owning(const Expr& e) { return ExprPtr(ExprPtr{}, &e); }

std::span<const ExprPtr> body_sequence(const NodeInfo& info) {
  if (info.fundef) return info.fundef->body;
  return info.lambda->children;
}

}  // namespace

std::vector<std::string> free_vars(const Module& m, NodeRef e) {
  const auto& info = resolve(m, e);
  if (info.kind == NodeInfo::Kind::Body) return free_vars_of_body(m, e);
  const Expr& x = resolve_expr(m, e);
  auto b = bindings(enclosing_def(m, info));
  auto p = non_owning(x);
  return free_in(b, one(p), false);
}

std::vector<std::string> free_vars_of_body(const Module& m, NodeRef body) {
  const auto& info = resolve(m, body);
  if (info.kind != NodeInfo::Kind::Body)
    throw UnknownNode(fmt::format("node {} is not a body sequence", body.node));
  auto b = bindings(enclosing_def(m, info));
  return free_in(b, body_sequence(info), false);
}

std::vector<std::string> free_vars(const Expr& e, const std::set<std::string>& context) {
  auto b = bindings(e, context);
  auto p = non_owning(e);
  return free_in(b, one(p), false);
}

std::vector<std::string> unbound_vars(const Module& m, NodeRef e) {
  const auto& info = resolve(m, e);
  auto b = bindings(enclosing_def(m, info));
  if (info.kind == NodeInfo::Kind::Body) return free_in(b, body_sequence(info), true);
  auto p = non_owning(resolve_expr(m, e));
  return free_in(b, one(p), true);
}

std::vector<std::string> vars(std::span<const PatternPtr> ps) {
  std::vector<std::string> out;
  for (const auto& p : ps)
    for_each_pattern_var(*p, [&](const Pattern& v) {
      if (std::find(out.begin(), out.end(), v.name) == out.end()) out.push_back(v.name);
    });
  return out;
}

std::set<std::string> bound_at(const Module& m, NodeRef e) {
  const auto& info = resolve(m, e);
  auto b = bindings(enclosing_def(m, info), e.node);
  auto names = b.bound_before(e.node);
  if (!names) throw UnknownNode(fmt::format("node {} is not evaluated", e.node));
  return *names;
}

namespace {

// Effects visible when `e` itself is evaluated; fun bodies only run when
// applied, and every application is an Apply node, which counts as impure.
bool has_direct_effect(const Expr& e, const std::set<FunKey>& impure) {
  switch (e.kind) {
    case Expr::Kind::Print:
    case Expr::Kind::Apply: return true;
    case Expr::Kind::Lambda: return false;
    case Expr::Kind::Call:
      if (impure.count(FunKey{e.name, e.children.size()})) return true;
      break;
    default: break;
  }
  for (const auto& c : e.children)
    if (has_direct_effect(*c, impure)) return true;
  return false;
}

}  // namespace

std::set<FunKey> impure_functions(const Module& m) {
  std::set<FunKey> impure;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& d : m.definitions()) {
      if (impure.count(d->key())) continue;
      for (const auto& e : d->body) {
        if (has_direct_effect(*e, impure)) {
          impure.insert(d->key());
          changed = true;
          break;
        }
      }
    }
  }
  return impure;
}

bool pure_expr(const Expr& e, const std::set<FunKey>& impure) {
  return !has_direct_effect(e, impure);
}

bool pure(const Module& m, const Expr& e) { return pure_expr(e, impure_functions(m)); }

bool pure(const Module& m, NodeRef e) { return pure(m, resolve_expr(m, e)); }

bool closed(const Module& m, NodeRef e) { return free_vars(m, e).empty(); }

bool non_bind(const Module& m, NodeRef e) {
  const auto& info = resolve(m, e);
  auto b = bindings(enclosing_def(m, info));
  std::unordered_set<NodeId> inside;
  if (info.kind == NodeInfo::Kind::Body) {
    for (const auto& x : body_sequence(info)) collect_ids(*x, inside);
  } else {
    collect_ids(resolve_expr(m, e), inside);
  }
  for (const auto& o : b.occurrences()) {
    if (!o.binding || !inside.count(o.node)) continue;
    for (const Occurrence* r : b.references_to(o.node))
      if (!inside.count(r->node)) return false;
  }
  return true;
}

bool non_bind(const Expr& e, const std::set<std::string>& context) {
  auto b = bindings(e, context);
  for (const auto& o : b.occurrences())
    if (o.binding && o.scope == kNoNode) return false;
  return true;
}

namespace {

bool mentions(const Expr& e, const std::string& name, NodeId excluded) {
  if (e.id == excluded) return false;
  bool hit = false;
  if (e.kind == Expr::Kind::Var && e.name == name) return true;
  auto check = [&](const Pattern& p) {
    for_each_pattern_var(p, [&](const Pattern& v) { hit |= v.name == name; });
  };
  if (e.pattern) check(*e.pattern);
  for (const auto& p : e.params) check(*p);
  if (hit) return true;
  for (const auto& c : e.children)
    if (mentions(*c, name, excluded)) return true;
  return false;
}

bool def_mentions(const FunDef& d, const std::string& name, NodeId excluded) {
  bool hit = false;
  for (const auto& p : d.params)
    for_each_pattern_var(*p, [&](const Pattern& v) { hit |= v.name == name; });
  if (hit) return true;
  for (const auto& e : d.body)
    if (mentions(*e, name, excluded)) return true;
  return false;
}

}  // namespace

bool fresh(const Module& m, const std::string& name, NodeRef ctx) {
  const auto& info = resolve(m, ctx);
  return !def_mentions(enclosing_def(m, info), name, kNoNode);
}

bool fresh_outside(const Module& m, const std::string& name, NodeRef ctx, NodeId excluded) {
  const auto& info = resolve(m, ctx);
  return !def_mentions(enclosing_def(m, info), name, excluded);
}

namespace {

struct Folded {
  enum class Type { Int, Atom, Other };
  Type type = Type::Other;
  std::int64_t value = 0;
};

std::optional<Folded> fold(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Int: return Folded{Folded::Type::Int, e.value};
    case Expr::Kind::Atom: return Folded{Folded::Type::Atom, 0};
    case Expr::Kind::Lambda: return Folded{};
    case Expr::Kind::Tuple:
      for (const auto& c : e.children)
        if (!fold(*c)) return std::nullopt;
      return Folded{};
    case Expr::Kind::Block: {
      std::optional<Folded> last;
      for (const auto& c : e.children) {
        last = fold(*c);
        if (!last) return std::nullopt;
      }
      return last;
    }
    case Expr::Kind::Binary: {
      auto l = fold(*e.children[0]);
      auto r = fold(*e.children[1]);
      if (!l || !r) return std::nullopt;
      if (e.op == BinaryOp::Eq) return Folded{Folded::Type::Atom, 0};
      if (l->type != Folded::Type::Int || r->type != Folded::Type::Int) return std::nullopt;
      if (e.op == BinaryOp::Lt) return Folded{Folded::Type::Atom, 0};
      std::int64_t out = 0;
      bool overflow = false;
      switch (e.op) {
        case BinaryOp::Add: overflow = __builtin_add_overflow(l->value, r->value, &out); break;
        case BinaryOp::Sub: overflow = __builtin_sub_overflow(l->value, r->value, &out); break;
        case BinaryOp::Mul: overflow = __builtin_mul_overflow(l->value, r->value, &out); break;
        case BinaryOp::Div:
          if (r->value == 0 ||
              (l->value == std::numeric_limits<std::int64_t>::min() && r->value == -1))
            return std::nullopt;
          out = l->value / r->value;
          break;
        default: return std::nullopt;
      }
      if (overflow) return std::nullopt;
      return Folded{Folded::Type::Int, out};
    }
    default: return std::nullopt;
  }
}

}  // namespace

bool total(const Expr& e) { return fold(e).has_value(); }

NodeRef scope(const Module& m, NodeRef e) {
  const NodeInfo* info = &resolve(m, e);
  if (info->kind == NodeInfo::Kind::Body) return e;
  if (info->kind == NodeInfo::Kind::FunDef) return ref(m, info->fundef->body_id);
  NodeId id = info->parent;
  while (true) {
    const NodeInfo& p = m.at(id);
    if (p.kind == NodeInfo::Kind::Body) return ref(m, id);
    id = p.parent;
  }
}

NodeRef top_expression(const Module& m, NodeRef e) {
  const NodeInfo* info = &resolve(m, e);
  if (info->kind == NodeInfo::Kind::Body || info->kind == NodeInfo::Kind::FunDef) return e;
  NodeId id = e.node;
  while (true) {
    const NodeInfo& here = m.at(id);
    if (m.at(here.parent).kind == NodeInfo::Kind::Body) return ref(m, id);
    id = here.parent;
  }
}

NodeRef function(const Module& m, NodeRef e) {
  const auto& info = resolve(m, e);
  return ref(m, m.definitions()[info.def_index]->id);
}

std::string name(const Module& m, NodeRef f) { return resolve_fundef(m, f).name; }

std::vector<PatternPtr> function_params(const Module& m, NodeRef f) {
  return resolve_fundef(m, f).params;
}

NodeRef body(const Module& m, NodeRef f) {
  const auto& info = resolve(m, f);
  if (info.kind == NodeInfo::Kind::FunDef) return ref(m, info.fundef->body_id);
  if (info.kind == NodeInfo::Kind::Expr && info.expr->kind == Expr::Kind::Lambda)
    return ref(m, info.expr->body_id);
  throw UnknownNode(fmt::format("node {} has no body", f.node));
}

std::vector<NodeRef> references(const Module& m, const FunKey& k) {
  std::vector<NodeRef> out;
  for (const auto& d : m.definitions())
    for (const auto& e : d->body)
      for_each_expr(*e, [&](const Expr& x) {
        if (x.kind == Expr::Kind::Call && !x.name_is_meta && x.name == k.name &&
            x.children.size() == k.arity)
          out.push_back(ref(m, x.id));
      });
  return out;
}

std::optional<NodeRef> function_part(const Module& m, NodeRef e) {
  const auto& info = resolve(m, e);
  if (info.kind != NodeInfo::Kind::Expr || info.expr->kind != Expr::Kind::Apply)
    return std::nullopt;
  const Expr& callee = info.expr->callee();
  if (callee.kind != Expr::Kind::Lambda) return std::nullopt;
  return ref(m, callee.id);
}

std::vector<NodeId> ancestors(const Module& m, NodeId id) {
  std::vector<NodeId> out;
  const NodeInfo* info = &m.at(id);
  while (info->kind != NodeInfo::Kind::FunDef) {
    out.push_back(info->parent);
    info = &m.at(info->parent);
  }
  return out;
}

bool is_within(const Module& m, NodeId node, NodeId ancestor) {
  if (node == ancestor) return true;
  for (NodeId a : ancestors(m, node))
    if (a == ancestor) return true;
  return false;
}

}  // namespace mer::analysis
