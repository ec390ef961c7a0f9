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

#include "mer/ast.hpp"

#include <atomic>
#include <unordered_set>

#include <fmt/format.h>

namespace mer {

const char* op_text(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "div";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Lt: return "<";
  }
  return "?";
}

namespace make {
namespace {
std::shared_ptr<Expr> node(IdAllocator& ids, Expr::Kind kind) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->id = ids.fresh();
  return e;
}
std::shared_ptr<Pattern> pnode(IdAllocator& ids, Pattern::Kind kind) {
  auto p = std::make_shared<Pattern>();
  p->kind = kind;
  p->id = ids.fresh();
  return p;
}
}  // namespace

ExprPtr int_lit(IdAllocator& ids, std::int64_t v) {
  auto e = node(ids, Expr::Kind::Int);
  e->value = v;
  return e;
}
ExprPtr atom(IdAllocator& ids, std::string name) {
  auto e = node(ids, Expr::Kind::Atom);
  e->name = std::move(name);
  return e;
}
ExprPtr var(IdAllocator& ids, std::string name) {
  auto e = node(ids, Expr::Kind::Var);
  e->name = std::move(name);
  return e;
}
ExprPtr binary(IdAllocator& ids, BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
  auto e = node(ids, Expr::Kind::Binary);
  e->op = op;
  e->children = {std::move(lhs), std::move(rhs)};
  return e;
}
ExprPtr match(IdAllocator& ids, PatternPtr pattern, ExprPtr rhs) {
  auto e = node(ids, Expr::Kind::Match);
  e->pattern = std::move(pattern);
  e->children = {std::move(rhs)};
  return e;
}
ExprPtr block(IdAllocator& ids, std::vector<ExprPtr> body) {
  auto e = node(ids, Expr::Kind::Block);
  e->children = std::move(body);
  return e;
}
ExprPtr lambda(IdAllocator& ids, std::vector<PatternPtr> params, std::vector<ExprPtr> body) {
  auto e = node(ids, Expr::Kind::Lambda);
  e->params = std::move(params);
  e->body_id = ids.fresh();
  e->children = std::move(body);
  return e;
}
ExprPtr call(IdAllocator& ids, std::string name, std::vector<ExprPtr> args) {
  auto e = node(ids, Expr::Kind::Call);
  e->name = std::move(name);
  e->children = std::move(args);
  return e;
}
ExprPtr apply(IdAllocator& ids, ExprPtr callee, std::vector<ExprPtr> args) {
  auto e = node(ids, Expr::Kind::Apply);
  e->children.reserve(args.size() + 1);
  e->children.push_back(std::move(callee));
  for (auto& a : args) e->children.push_back(std::move(a));
  return e;
}
ExprPtr print(IdAllocator& ids, ExprPtr arg) {
  auto e = node(ids, Expr::Kind::Print);
  e->children = {std::move(arg)};
  return e;
}
ExprPtr tuple(IdAllocator& ids, std::vector<ExprPtr> elements) {
  auto e = node(ids, Expr::Kind::Tuple);
  e->children = std::move(elements);
  return e;
}
PatternPtr pvar(IdAllocator& ids, std::string name) {
  auto p = pnode(ids, Pattern::Kind::Var);
  p->name = std::move(name);
  return p;
}
PatternPtr pint(IdAllocator& ids, std::int64_t v) {
  auto p = pnode(ids, Pattern::Kind::Int);
  p->value = v;
  return p;
}
PatternPtr patom(IdAllocator& ids, std::string name) {
  auto p = pnode(ids, Pattern::Kind::Atom);
  p->name = std::move(name);
  return p;
}
PatternPtr ptuple(IdAllocator& ids, std::vector<PatternPtr> elements) {
  auto p = pnode(ids, Pattern::Kind::Tuple);
  p->elements = std::move(elements);
  return p;
}
FunDefPtr fundef(IdAllocator& ids, std::string name, std::vector<PatternPtr> params,
                 std::vector<ExprPtr> body) {
  auto d = std::make_shared<FunDef>();
  d->name = std::move(name);
  d->params = std::move(params);
  d->body = std::move(body);
  d->id = ids.fresh();
  d->body_id = ids.fresh();
  return d;
}
}  // namespace make

PatternPtr clone_fresh(const Pattern& p, IdAllocator& ids) {
  auto c = std::make_shared<Pattern>(p);
  c->id = ids.fresh();
  for (auto& el : c->elements) el = clone_fresh(*el, ids);
  return c;
}

ExprPtr clone_fresh(const Expr& e, IdAllocator& ids) {
  auto c = std::make_shared<Expr>(e);
  c->id = ids.fresh();
  if (c->pattern) c->pattern = clone_fresh(*c->pattern, ids);
  for (auto& p : c->params) p = clone_fresh(*p, ids);
  if (c->kind == Expr::Kind::Lambda) c->body_id = ids.fresh();
  for (auto& ch : c->children) ch = clone_fresh(*ch, ids);
  return c;
}

ExprPtr pattern_to_expr(const Pattern& p, IdAllocator& ids) {
  switch (p.kind) {
    case Pattern::Kind::Var: return make::var(ids, p.name);
    case Pattern::Kind::Int: return make::int_lit(ids, p.value);
    case Pattern::Kind::Atom: return make::atom(ids, p.name);
    case Pattern::Kind::Tuple: {
      std::vector<ExprPtr> els;
      for (const auto& el : p.elements) els.push_back(pattern_to_expr(*el, ids));
      return make::tuple(ids, std::move(els));
    }
    case Pattern::Kind::Meta: {
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Meta;
      e->id = ids.fresh();
      e->name = p.name;
      e->meta_list = p.meta_list;
      return e;
    }
  }
  return nullptr;
}

std::optional<PatternPtr> expr_to_pattern(const Expr& e, IdAllocator& ids) {
  std::shared_ptr<Pattern> p;
  switch (e.kind) {
    case Expr::Kind::Var:
      p = std::make_shared<Pattern>();
      p->kind = Pattern::Kind::Var;
      p->name = e.name;
      break;
    case Expr::Kind::Int:
      p = std::make_shared<Pattern>();
      p->kind = Pattern::Kind::Int;
      p->value = e.value;
      break;
    case Expr::Kind::Atom:
      p = std::make_shared<Pattern>();
      p->kind = Pattern::Kind::Atom;
      p->name = e.name;
      break;
    case Expr::Kind::Meta:
      p = std::make_shared<Pattern>();
      p->kind = Pattern::Kind::Meta;
      p->name = e.name;
      p->meta_list = e.meta_list;
      break;
    case Expr::Kind::Tuple: {
      p = std::make_shared<Pattern>();
      p->kind = Pattern::Kind::Tuple;
      for (const auto& c : e.children) {
        auto sub = expr_to_pattern(*c, ids);
        if (!sub) return std::nullopt;
        p->elements.push_back(*sub);
      }
      break;
    }
    default:
      return std::nullopt;
  }
  p->id = ids.fresh();
  p->span = e.span;
  return p;
}

bool same_shape(const Pattern& a, const Pattern& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Pattern::Kind::Var:
    case Pattern::Kind::Atom: return a.name == b.name;
    case Pattern::Kind::Int: return a.value == b.value;
    case Pattern::Kind::Meta: return a.name == b.name && a.meta_list == b.meta_list;
    case Pattern::Kind::Tuple: return same_shape(a.elements, b.elements);
  }
  return false;
}

bool same_shape(std::span<const PatternPtr> a, std::span<const PatternPtr> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_shape(*a[i], *b[i])) return false;
  return true;
}

bool same_shape(std::span<const ExprPtr> a, std::span<const ExprPtr> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_shape(*a[i], *b[i])) return false;
  return true;
}

bool same_shape(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::Int: return a.value == b.value;
    case Expr::Kind::Atom:
    case Expr::Kind::Var: return a.name == b.name;
    case Expr::Kind::Meta: return a.name == b.name && a.meta_list == b.meta_list;
    case Expr::Kind::Binary:
      return a.op == b.op && same_shape(a.children, b.children);
    case Expr::Kind::Match:
      return same_shape(*a.pattern, *b.pattern) && same_shape(a.children, b.children);
    case Expr::Kind::Lambda:
      return same_shape(a.params, b.params) && same_shape(a.children, b.children);
    case Expr::Kind::Call:
      return a.name == b.name && a.name_is_meta == b.name_is_meta &&
             same_shape(a.children, b.children);
    case Expr::Kind::Block:
    case Expr::Kind::Apply:
    case Expr::Kind::Print:
    case Expr::Kind::Tuple: return same_shape(a.children, b.children);
  }
  return false;
}

bool same_shape(const FunDef& a, const FunDef& b) {
  return a.name == b.name && same_shape(a.params, b.params) && same_shape(a.body, b.body);
}

// ---------------------------------------------------------------------------
// Module

struct Module::Impl {
  std::vector<FunDefPtr> defs;
  std::uint64_t version = 0;
  NodeId next_id = 1;
  std::unordered_map<NodeId, NodeInfo> index;
};

namespace {

std::atomic<std::uint64_t> g_version{0};

class Deduper {
 public:
  explicit Deduper(IdAllocator& ids) : ids_(ids) {}

  FunDefPtr run(const FunDefPtr& d) {
    bool changed = false;
    FunDef copy = *d;
    if (!claim(copy.id)) copy.id = ids_.fresh(), changed = true;
    if (!claim(copy.body_id)) copy.body_id = ids_.fresh(), changed = true;
    for (auto& p : copy.params) changed |= run(p);
    for (auto& e : copy.body) changed |= run(e);
    return changed ? std::make_shared<const FunDef>(std::move(copy)) : d;
  }

 private:
  bool claim(NodeId id) { return seen_.insert(id).second; }

  void claim_all(const Pattern& p) {
    seen_.insert(p.id);
    for (const auto& c : p.elements) claim_all(*c);
  }
  void claim_all(const Expr& e) {
    seen_.insert(e.id);
    if (e.kind == Expr::Kind::Lambda) seen_.insert(e.body_id);
    if (e.pattern) claim_all(*e.pattern);
    for (const auto& p : e.params) claim_all(*p);
    for (const auto& c : e.children) claim_all(*c);
  }

  bool run(PatternPtr& p) {
    if (seen_.count(p->id)) {
      p = clone_fresh(*p, ids_);
      claim_all(*p);
      return true;
    }
    claim(p->id);
    bool changed = false;
    auto copy = std::make_shared<Pattern>(*p);
    for (auto& c : copy->elements) changed |= run(c);
    if (changed) p = copy;
    return changed;
  }

  bool run(ExprPtr& e) {
    if (seen_.count(e->id)) {
      e = clone_fresh(*e, ids_);
      claim_all(*e);
      return true;
    }
    claim(e->id);
    bool changed = false;
    auto copy = std::make_shared<Expr>(*e);
    if (copy->kind == Expr::Kind::Lambda && !claim(copy->body_id)) {
      copy->body_id = ids_.fresh();
      claim(copy->body_id);
      changed = true;
    }
    if (copy->pattern) changed |= run(copy->pattern);
    for (auto& p : copy->params) changed |= run(p);
    for (auto& c : copy->children) changed |= run(c);
    if (changed) e = copy;
    return changed;
  }

  IdAllocator& ids_;
  std::unordered_set<NodeId> seen_;
};

class Indexer {
 public:
  explicit Indexer(std::unordered_map<NodeId, NodeInfo>& index) : index_(index) {}

  void def(const FunDef& d, std::size_t di) {
    di_ = di;
    NodeInfo info;
    info.kind = NodeInfo::Kind::FunDef;
    info.fundef = &d;
    info.def_index = di;
    put(d.id, info);
    for (std::size_t i = 0; i < d.params.size(); ++i) pattern(*d.params[i], d.id, i);
    NodeInfo body;
    body.kind = NodeInfo::Kind::Body;
    body.fundef = &d;
    body.parent = d.id;
    body.def_index = di;
    put(d.body_id, body);
    for (std::size_t i = 0; i < d.body.size(); ++i) expr(*d.body[i], d.body_id, i);
  }

 private:
  void put(NodeId id, const NodeInfo& info) {
    if (!index_.emplace(id, info).second)
      throw std::logic_error(fmt::format("node id {} repeated in module", id));
  }

  void pattern(const Pattern& p, NodeId parent, std::size_t slot) {
    NodeInfo info;
    info.kind = NodeInfo::Kind::Pattern;
    info.pattern = &p;
    info.parent = parent;
    info.slot = slot;
    info.def_index = di_;
    put(p.id, info);
    for (std::size_t i = 0; i < p.elements.size(); ++i) pattern(*p.elements[i], p.id, i);
  }

  void expr(const Expr& e, NodeId parent, std::size_t slot) {
    NodeInfo info;
    info.kind = NodeInfo::Kind::Expr;
    info.expr = &e;
    info.parent = parent;
    info.slot = slot;
    info.def_index = di_;
    put(e.id, info);
    if (e.pattern) pattern(*e.pattern, e.id, 0);
    if (e.kind == Expr::Kind::Lambda) {
      for (std::size_t i = 0; i < e.params.size(); ++i) pattern(*e.params[i], e.id, i);
      NodeInfo body;
      body.kind = NodeInfo::Kind::Body;
      body.lambda = &e;
      body.parent = e.id;
      body.def_index = di_;
      put(e.body_id, body);
      for (std::size_t i = 0; i < e.children.size(); ++i) expr(*e.children[i], e.body_id, i);
      return;
    }
    for (std::size_t i = 0; i < e.children.size(); ++i) expr(*e.children[i], e.id, i);
  }

  std::unordered_map<NodeId, NodeInfo>& index_;
  std::size_t di_ = 0;
};

}  // namespace

Module::Module() {
  auto impl = std::make_shared<Impl>();
  impl->version = ++g_version;
  impl_ = std::move(impl);
}

Module Module::build(std::vector<FunDefPtr> defs, NodeId next_id) {
  for (std::size_t i = 0; i < defs.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (defs[i]->key() == defs[j]->key()) throw DuplicateDefinition(defs[i]->key());

  auto impl = std::make_shared<Impl>();
  IdAllocator ids(next_id);
  Deduper dedupe(ids);
  for (auto& d : defs) d = dedupe.run(d);
  impl->defs = std::move(defs);
  impl->next_id = ids.peek();
  Indexer indexer(impl->index);
  for (std::size_t i = 0; i < impl->defs.size(); ++i) indexer.def(*impl->defs[i], i);
  impl->version = ++g_version;
  Module m;
  m.impl_ = std::move(impl);
  return m;
}

std::span<const FunDefPtr> Module::definitions() const { return impl_->defs; }
std::uint64_t Module::version() const { return impl_->version; }
NodeId Module::next_node_id() const { return impl_->next_id; }
std::size_t Module::node_count() const { return impl_->index.size(); }

const FunDef* Module::find(const FunKey& key) const {
  auto i = index_of(key);
  return i ? impl_->defs[*i].get() : nullptr;
}

std::optional<std::size_t> Module::index_of(const FunKey& key) const {
  for (std::size_t i = 0; i < impl_->defs.size(); ++i)
    if (impl_->defs[i]->name == key.name && impl_->defs[i]->arity() == key.arity) return i;
  return std::nullopt;
}

const NodeInfo* Module::lookup(NodeId id) const {
  auto it = impl_->index.find(id);
  return it == impl_->index.end() ? nullptr : &it->second;
}

const NodeInfo& Module::at(NodeId id) const {
  const auto* info = lookup(id);
  if (!info) throw UnknownNode(fmt::format("node {} not in module", id));
  return *info;
}

bool same_shape(const Module& a, const Module& b) {
  auto da = a.definitions();
  auto db = b.definitions();
  if (da.size() != db.size()) return false;
  for (std::size_t i = 0; i < da.size(); ++i)
    if (!same_shape(*da[i], *db[i])) return false;
  return true;
}

}  // namespace mer
