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

#include <fmt/format.h>

#include "mer/rewrite.hpp"
#include "mer/syntax.hpp"

namespace mer::rewrite {

Fragment Fragment::of(ExprPtr e) {
  Fragment f;
  f.kind = Kind::Expr;
  f.expr = std::move(e);
  return f;
}

Fragment Fragment::of(PatternPtr p) {
  Fragment f;
  f.kind = Kind::Pattern;
  f.pattern = std::move(p);
  return f;
}

Fragment Fragment::of_name(std::string n) {
  Fragment f;
  f.kind = Kind::Name;
  f.name = std::move(n);
  return f;
}

Fragment Fragment::of(std::vector<ExprPtr> es) {
  Fragment f;
  f.kind = Kind::ExprList;
  f.exprs = std::move(es);
  return f;
}

Fragment Fragment::of(std::vector<PatternPtr> ps) {
  Fragment f;
  f.kind = Kind::PatternList;
  f.patterns = std::move(ps);
  return f;
}

Fragment Fragment::of_names(std::vector<std::string> ns) {
  Fragment f;
  f.kind = Kind::NameList;
  f.names = std::move(ns);
  return f;
}

bool Fragment::is_list() const {
  return kind == Kind::ExprList || kind == Kind::PatternList || kind == Kind::NameList;
}

std::string to_text(const Fragment& f) {
  switch (f.kind) {
    case Fragment::Kind::Expr: return pretty(*f.expr);
    case Fragment::Kind::Pattern: return pretty(*f.pattern);
    case Fragment::Kind::Name: return f.name;
    case Fragment::Kind::ExprList: return pretty_sequence(f.exprs);
    case Fragment::Kind::PatternList: return pretty_patterns(f.patterns);
    case Fragment::Kind::NameList: return fmt::format("{}", fmt::join(f.names, ", "));
  }
  return {};
}

namespace {

bool is_list_meta(const Expr& e) { return e.kind == Expr::Kind::Meta && e.meta_list; }
bool is_list_meta(const Pattern& p) { return p.kind == Pattern::Kind::Meta && p.meta_list; }

template <class Ptr>
void check_sequence(std::span<const Ptr> seq, std::string_view text) {
  auto n = std::count_if(seq.begin(), seq.end(), [](const Ptr& x) { return is_list_meta(*x); });
  if (n > 1)
    throw std::invalid_argument(
        fmt::format("template `{}` has more than one list metavariable in a sequence", text));
}

struct TemplateChecker {
  std::string_view text;
  void pattern(const Pattern& p) {
    check_sequence<PatternPtr>(p.elements, text);
    for (const auto& c : p.elements) pattern(*c);
  }
  void expr(const Expr& e) {
    check_sequence<ExprPtr>(e.children, text);
    check_sequence<PatternPtr>(e.params, text);
    if (e.pattern) pattern(*e.pattern);
    for (const auto& p : e.params) pattern(*p);
    for (const auto& c : e.children) expr(*c);
  }
  void exprs(std::span<const ExprPtr> es) {
    check_sequence<ExprPtr>(es, text);
    for (const auto& e : es) expr(*e);
  }
  void patterns(std::span<const PatternPtr> ps) {
    check_sequence<PatternPtr>(ps, text);
    for (const auto& p : ps) pattern(*p);
  }
};

}  // namespace

MetaPattern parse_meta_pattern(std::string_view text, Sort sort) {
  // Template node ids are never placed in a module; they only need to be
  // distinct within the template.
  IdAllocator ids(1);
  MetaPattern p;
  p.sort = sort;
  p.text = std::string(text);
  TemplateChecker check{text};
  switch (sort) {
    case Sort::Expr:
      p.expr = parse_expression(text, ids, true);
      check.expr(*p.expr);
      break;
    case Sort::Clause: {
      auto c = parse_clause(text, ids, true);
      p.params = std::move(c.params);
      p.exprs = std::move(c.body);
      check.patterns(p.params);
      check.exprs(p.exprs);
      break;
    }
    case Sort::Signature: {
      auto s = parse_signature(text, ids, true);
      p.name = std::move(s.name);
      p.name_is_meta = s.name_is_meta;
      p.exprs = std::move(s.args);
      check.exprs(p.exprs);
      break;
    }
    case Sort::ArgList:
      p.exprs = parse_arg_list(text, ids, true);
      check.exprs(p.exprs);
      break;
    case Sort::FunDef: {
      auto d = parse_fundef(text, ids, true);
      p.name = d->name;
      p.name_is_meta = d->name_is_meta;
      p.params = d->params;
      p.exprs = d->body;
      check.patterns(p.params);
      check.exprs(p.exprs);
      break;
    }
  }
  return p;
}

std::string pretty(const Instance& i) {
  switch (i.sort) {
    case Sort::Expr: return pretty(*i.expr);
    case Sort::Clause:
      return fmt::format("({}) -> {}", pretty_patterns(i.params), pretty_sequence(i.exprs));
    case Sort::Signature:
      return fmt::format("{}({})", i.name,
                         i.head ? pretty_patterns(i.params) : pretty_sequence(i.exprs));
    case Sort::ArgList: return fmt::format("({})", pretty_sequence(i.exprs));
    case Sort::FunDef: return pretty(*i.fundef);
  }
  return {};
}

ExprPtr shared_expr(const Module& m, NodeId id) {
  const NodeInfo& info = m.at(id);
  if (info.kind != NodeInfo::Kind::Expr) throw UnknownNode(fmt::format("node {} is not an expression", id));
  const NodeInfo& parent = m.at(info.parent);
  if (parent.kind == NodeInfo::Kind::Body)
    return parent.fundef ? parent.fundef->body[info.slot] : parent.lambda->children[info.slot];
  return parent.expr->children[info.slot];
}

PatternPtr shared_pattern(const Module& m, NodeId id) {
  const NodeInfo& info = m.at(id);
  if (info.kind != NodeInfo::Kind::Pattern) throw UnknownNode(fmt::format("node {} is not a pattern", id));
  const NodeInfo& parent = m.at(info.parent);
  switch (parent.kind) {
    case NodeInfo::Kind::FunDef: return parent.fundef->params[info.slot];
    case NodeInfo::Kind::Pattern: return parent.pattern->elements[info.slot];
    case NodeInfo::Kind::Expr:
      if (parent.expr->kind == Expr::Kind::Match) return parent.expr->pattern;
      return parent.expr->params[info.slot];
    case NodeInfo::Kind::Body: break;
  }
  throw UnknownNode(fmt::format("node {} has no owner", id));
}

namespace {

class Matcher {
 public:
  MetaBinding binding;

  bool bind(const std::string& name, Fragment f) {
    auto [it, inserted] = binding.emplace(name, f);
    if (inserted) return true;
    return to_text(it->second) == to_text(f);
  }

  bool name(bool is_meta, const std::string& t, const std::string& s) {
    if (is_meta) return bind(t, Fragment::of_name(s));
    return t == s;
  }

  bool expr(const Expr& t, const ExprPtr& sp) {
    const Expr& s = *sp;
    if (t.kind == Expr::Kind::Meta) {
      if (t.meta_list) return false;
      return bind(t.name, Fragment::of(sp));
    }
    if (t.kind != s.kind) return false;
    switch (t.kind) {
      case Expr::Kind::Int: return t.value == s.value;
      case Expr::Kind::Atom:
      case Expr::Kind::Var: return t.name == s.name;
      case Expr::Kind::Binary: return t.op == s.op && exprs(t.children, s.children);
      case Expr::Kind::Match: return pattern(*t.pattern, s.pattern) && exprs(t.children, s.children);
      case Expr::Kind::Lambda: return patterns(t.params, s.params) && exprs(t.children, s.children);
      case Expr::Kind::Call: return name(t.name_is_meta, t.name, s.name) && exprs(t.children, s.children);
      case Expr::Kind::Block:
      case Expr::Kind::Apply:
      case Expr::Kind::Print:
      case Expr::Kind::Tuple: return exprs(t.children, s.children);
      case Expr::Kind::Meta: break;
    }
    return false;
  }

  bool pattern(const Pattern& t, const PatternPtr& sp) {
    const Pattern& s = *sp;
    if (t.kind == Pattern::Kind::Meta) {
      if (t.meta_list) return false;
      return bind(t.name, Fragment::of(sp));
    }
    if (t.kind != s.kind) return false;
    switch (t.kind) {
      case Pattern::Kind::Int: return t.value == s.value;
      case Pattern::Kind::Atom:
      case Pattern::Kind::Var: return t.name == s.name;
      case Pattern::Kind::Tuple: return patterns(t.elements, s.elements);
      case Pattern::Kind::Meta: break;
    }
    return false;
  }

  // Expression-shaped template against a pattern (signature rules on heads).
  bool expr_as_pattern(const Expr& t, const PatternPtr& sp) {
    const Pattern& s = *sp;
    switch (t.kind) {
      case Expr::Kind::Meta: return !t.meta_list && bind(t.name, Fragment::of(sp));
      case Expr::Kind::Int: return s.kind == Pattern::Kind::Int && s.value == t.value;
      case Expr::Kind::Atom: return s.kind == Pattern::Kind::Atom && s.name == t.name;
      case Expr::Kind::Var: return s.kind == Pattern::Kind::Var && s.name == t.name;
      case Expr::Kind::Tuple:
        return s.kind == Pattern::Kind::Tuple &&
               sequence<ExprPtr, PatternPtr>(
                   t.children, s.elements,
                   [this](const Expr& a, const PatternPtr& b) { return expr_as_pattern(a, b); },
                   [](const std::vector<PatternPtr>& xs) { return Fragment::of(xs); });
      default: return false;
    }
  }

  bool exprs(std::span<const ExprPtr> t, std::span<const ExprPtr> s) {
    return sequence<ExprPtr, ExprPtr>(
        t, s, [this](const Expr& a, const ExprPtr& b) { return expr(a, b); },
        [](const std::vector<ExprPtr>& xs) { return Fragment::of(xs); });
  }

  bool patterns(std::span<const PatternPtr> t, std::span<const PatternPtr> s) {
    return sequence<PatternPtr, PatternPtr>(
        t, s, [this](const Pattern& a, const PatternPtr& b) { return pattern(a, b); },
        [](const std::vector<PatternPtr>& xs) { return Fragment::of(xs); });
  }

  bool exprs_as_patterns(std::span<const ExprPtr> t, std::span<const PatternPtr> s) {
    return sequence<ExprPtr, PatternPtr>(
        t, s, [this](const Expr& a, const PatternPtr& b) { return expr_as_pattern(a, b); },
        [](const std::vector<PatternPtr>& xs) { return Fragment::of(xs); });
  }

 private:
  // At most one list metavariable per template sequence: it takes whatever
  // the fixed prefix and suffix leave over.
  template <class T, class S, class One, class Wrap>
  bool sequence(std::span<const T> t, std::span<const S> s, One one, Wrap wrap) {
    auto list = std::find_if(t.begin(), t.end(), [](const T& x) { return is_list_meta(*x); });
    if (list == t.end()) {
      if (t.size() != s.size()) return false;
      for (std::size_t i = 0; i < t.size(); ++i)
        if (!one(*t[i], s[i])) return false;
      return true;
    }
    std::size_t pre = list - t.begin();
    std::size_t post = t.size() - pre - 1;
    if (s.size() < pre + post) return false;
    for (std::size_t i = 0; i < pre; ++i)
      if (!one(*t[i], s[i])) return false;
    for (std::size_t i = 0; i < post; ++i)
      if (!one(*t[pre + 1 + i], s[s.size() - post + i])) return false;
    std::vector<S> middle(s.begin() + pre, s.end() - post);
    return bind((*list)->name, wrap(middle));
  }
};

}  // namespace

std::optional<MetaBinding> match(const MetaPattern& p, const Instance& subject) {
  Matcher mt;
  bool ok = false;
  switch (p.sort) {
    case Sort::Expr: ok = subject.sort == Sort::Expr && mt.expr(*p.expr, subject.expr); break;
    case Sort::Clause:
      ok = subject.sort == Sort::Clause && mt.patterns(p.params, subject.params) &&
           mt.exprs(p.exprs, subject.exprs);
      break;
    case Sort::Signature:
      if (subject.sort != Sort::Signature) break;
      ok = mt.name(p.name_is_meta, p.name, subject.name) &&
           (subject.head ? mt.exprs_as_patterns(p.exprs, subject.params)
                         : mt.exprs(p.exprs, subject.exprs));
      break;
    case Sort::ArgList: ok = subject.sort == Sort::ArgList && mt.exprs(p.exprs, subject.exprs); break;
    case Sort::FunDef: break;
  }
  if (!ok) return std::nullopt;
  return std::move(mt.binding);
}

namespace {

std::optional<Instance> subject_of(Sort sort, const Module& m, NodeRef n) {
  const NodeInfo& info = analysis::resolve(m, n);
  Instance s;
  s.sort = sort;
  const Expr* e = info.kind == NodeInfo::Kind::Expr ? info.expr : nullptr;
  const FunDef* d = info.kind == NodeInfo::Kind::FunDef ? info.fundef : nullptr;
  switch (sort) {
    case Sort::Expr:
      if (!e) return std::nullopt;
      s.expr = shared_expr(m, n.node);
      return s;
    case Sort::Clause:
      if (d) {
        s.params = d->params;
        s.exprs = d->body;
        return s;
      }
      if (e && e->kind == Expr::Kind::Lambda) {
        s.params = e->params;
        s.exprs = e->children;
        return s;
      }
      return std::nullopt;
    case Sort::Signature:
      if (d) {
        s.name = d->name;
        s.params = d->params;
        s.head = true;
        return s;
      }
      if (e && e->kind == Expr::Kind::Call) {
        s.name = e->name;
        s.exprs = e->children;
        return s;
      }
      return std::nullopt;
    case Sort::ArgList:
      if (e && (e->kind == Expr::Kind::Call || e->kind == Expr::Kind::Apply)) {
        auto args = e->args();
        s.exprs.assign(args.begin(), args.end());
        return s;
      }
      return std::nullopt;
    case Sort::FunDef: return std::nullopt;
  }
  return std::nullopt;
}

class Substituter {
 public:
  Substituter(const MetaBinding& b, IdAllocator& ids) : b_(b), ids_(ids) {}

  const Fragment& get(const std::string& n) const {
    auto it = b_.find(n);
    if (it == b_.end()) throw UnboundMetavariable(n);
    return it->second;
  }

  ExprPtr as_expr(const Fragment& f) {
    switch (f.kind) {
      case Fragment::Kind::Expr: return f.expr;
      case Fragment::Kind::Pattern: return pattern_to_expr(*f.pattern, ids_);
      case Fragment::Kind::Name:
        return is_variable_name(f.name) ? make::var(ids_, f.name) : make::atom(ids_, f.name);
      default: throw SubstitutionError("a list fragment cannot stand for one expression");
    }
  }

  PatternPtr as_pattern(const Fragment& f) {
    switch (f.kind) {
      case Fragment::Kind::Pattern: return f.pattern;
      case Fragment::Kind::Expr: {
        auto p = expr_to_pattern(*f.expr, ids_);
        if (!p) throw SubstitutionError("`" + pretty(*f.expr) + "` cannot be used as a pattern");
        return *p;
      }
      case Fragment::Kind::Name:
        return is_variable_name(f.name) ? make::pvar(ids_, f.name) : make::patom(ids_, f.name);
      default: throw SubstitutionError("a list fragment cannot stand for one pattern");
    }
  }

  std::string as_name(const Fragment& f) {
    switch (f.kind) {
      case Fragment::Kind::Name: return f.name;
      case Fragment::Kind::Expr:
        if (f.expr->kind == Expr::Kind::Var || f.expr->kind == Expr::Kind::Atom) return f.expr->name;
        break;
      case Fragment::Kind::Pattern:
        if (f.pattern->kind == Pattern::Kind::Var || f.pattern->kind == Pattern::Kind::Atom)
          return f.pattern->name;
        break;
      default: break;
    }
    throw SubstitutionError("`" + to_text(f) + "` is not a name");
  }

  std::vector<ExprPtr> as_exprs(const Fragment& f) {
    std::vector<ExprPtr> out;
    switch (f.kind) {
      case Fragment::Kind::ExprList: return f.exprs;
      case Fragment::Kind::PatternList:
        for (const auto& p : f.patterns) out.push_back(pattern_to_expr(*p, ids_));
        return out;
      case Fragment::Kind::NameList:
        for (const auto& n : f.names) out.push_back(as_expr(Fragment::of_name(n)));
        return out;
      default: out.push_back(as_expr(f)); return out;
    }
  }

  std::vector<PatternPtr> as_patterns(const Fragment& f) {
    std::vector<PatternPtr> out;
    switch (f.kind) {
      case Fragment::Kind::PatternList: return f.patterns;
      case Fragment::Kind::ExprList:
        for (const auto& e : f.exprs) out.push_back(as_pattern(Fragment::of(e)));
        return out;
      case Fragment::Kind::NameList:
        for (const auto& n : f.names) out.push_back(as_pattern(Fragment::of_name(n)));
        return out;
      default: out.push_back(as_pattern(f)); return out;
    }
  }

  std::string name(bool is_meta, const std::string& n) { return is_meta ? as_name(get(n)) : n; }

  ExprPtr expr(const Expr& t) {
    if (t.kind == Expr::Kind::Meta) {
      if (t.meta_list) throw SubstitutionError("list metavariable @" + t.name + "... outside a sequence");
      return as_expr(get(t.name));
    }
    auto e = std::make_shared<Expr>(t);
    e->id = ids_.fresh();
    e->span = {};
    if (t.kind == Expr::Kind::Lambda) e->body_id = ids_.fresh();
    if (t.kind == Expr::Kind::Call) {
      e->name = name(t.name_is_meta, t.name);
      e->name_is_meta = false;
    }
    if (t.pattern) e->pattern = pattern(*t.pattern);
    e->params = patterns(t.params);
    e->children = exprs(t.children);
    return e;
  }

  PatternPtr pattern(const Pattern& t) {
    if (t.kind == Pattern::Kind::Meta) {
      if (t.meta_list) throw SubstitutionError("list metavariable @" + t.name + "... outside a sequence");
      return as_pattern(get(t.name));
    }
    auto p = std::make_shared<Pattern>(t);
    p->id = ids_.fresh();
    p->span = {};
    p->elements = patterns(t.elements);
    return p;
  }

  std::vector<ExprPtr> exprs(std::span<const ExprPtr> ts) {
    std::vector<ExprPtr> out;
    for (const auto& t : ts) {
      if (is_list_meta(*t) ||
          (t->kind == Expr::Kind::Meta && get(t->name).kind == Fragment::Kind::ExprList)) {
        auto xs = as_exprs(get(t->name));
        out.insert(out.end(), xs.begin(), xs.end());
      } else {
        out.push_back(expr(*t));
      }
    }
    return out;
  }

  std::vector<PatternPtr> patterns(std::span<const PatternPtr> ts) {
    std::vector<PatternPtr> out;
    for (const auto& t : ts) {
      if (is_list_meta(*t)) {
        auto xs = as_patterns(get(t->name));
        out.insert(out.end(), xs.begin(), xs.end());
      } else {
        out.push_back(pattern(*t));
      }
    }
    return out;
  }

  // Expression-shaped templates in a head position.
  std::vector<PatternPtr> exprs_as_patterns(std::span<const ExprPtr> ts) {
    std::vector<PatternPtr> out;
    for (const auto& t : ts) {
      if (is_list_meta(*t)) {
        auto xs = as_patterns(get(t->name));
        out.insert(out.end(), xs.begin(), xs.end());
      } else if (t->kind == Expr::Kind::Meta) {
        out.push_back(as_pattern(get(t->name)));
      } else {
        out.push_back(as_pattern(Fragment::of(expr(*t))));
      }
    }
    return out;
  }

 private:
  const MetaBinding& b_;
  IdAllocator& ids_;
};

}  // namespace

std::optional<MetaBinding> match(const MetaPattern& p, const Module& m, NodeRef n) {
  auto s = subject_of(p.sort, m, n);
  if (!s) return std::nullopt;
  return match(p, *s);
}

Instance substitute(const MetaPattern& p, const MetaBinding& b, IdAllocator& ids) {
  Substituter sub(b, ids);
  Instance out;
  out.sort = p.sort;
  switch (p.sort) {
    case Sort::Expr: out.expr = sub.expr(*p.expr); break;
    case Sort::Clause:
      out.params = sub.patterns(p.params);
      out.exprs = sub.exprs(p.exprs);
      break;
    case Sort::Signature:
      out.name = sub.name(p.name_is_meta, p.name);
      out.exprs = sub.exprs(p.exprs);
      break;
    case Sort::ArgList: out.exprs = sub.exprs(p.exprs); break;
    case Sort::FunDef: {
      out.name = sub.name(p.name_is_meta, p.name);
      out.params = sub.patterns(p.params);
      out.exprs = sub.exprs(p.exprs);
      auto d = std::make_shared<FunDef>();
      d->name = out.name;
      d->params = out.params;
      d->body = out.exprs;
      d->id = ids.fresh();
      d->body_id = ids.fresh();
      out.fundef = d;
      break;
    }
  }
  return out;
}

// Signature templates placed on a definition head produce patterns.
Instance substitute_head(const MetaPattern& p, const MetaBinding& b, IdAllocator& ids) {
  Substituter sub(b, ids);
  Instance out;
  out.sort = Sort::Signature;
  out.head = true;
  out.name = sub.name(p.name_is_meta, p.name);
  out.params = sub.exprs_as_patterns(p.exprs);
  return out;
}

}  // namespace mer::rewrite
