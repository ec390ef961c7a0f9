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
#include <cctype>

#include <fmt/format.h>

#include "mer/rewrite.hpp"
#include "mer/syntax.hpp"

namespace mer::rewrite {

namespace {

class CondParser {
 public:
  explicit CondParser(std::string_view text) : s_(text) {}

  Condition run() {
    Condition c;
    c.text = std::string(s_);
    skip();
    if (pos_ == s_.size()) return c;
    while (true) {
      std::size_t start = pos_;
      CondAtom a;
      CondTerm t = term();
      skip();
      if (peek('=')) {
        ++pos_;
        if (!t.is_meta) fail("left side of `=` must be a metavariable");
        a.bind = std::move(t);
        a.term = term();
      } else {
        a.term = std::move(t);
      }
      a.text = trim(s_.substr(start, pos_ - start));
      c.atoms.push_back(std::move(a));
      skip();
      if (pos_ == s_.size()) break;
      if (!keyword("AND")) fail("expected AND");
    }
    return c;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument(fmt::format("condition `{}`: {} at offset {}", s_, msg, pos_));
  }

  static std::string trim(std::string_view v) {
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
    return std::string(v);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  bool keyword(std::string_view k) {
    skip();
    if (s_.substr(pos_, k.size()) != k) return false;
    std::size_t end = pos_ + k.size();
    if (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
      return false;
    pos_ = end;
    return true;
  }

  std::string ident() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    if (start == pos_) fail("expected a name");
    return std::string(s_.substr(start, pos_ - start));
  }

  CondTerm term() {
    CondTerm t;
    if (peek('@')) {
      ++pos_;
      t.is_meta = true;
      t.name = ident();
      if (s_.substr(pos_, 3) == "...") {
        t.list = true;
        pos_ += 3;
      }
      return t;
    }
    t.name = ident();
    if (!peek('(')) fail("expected `(` after " + t.name);
    ++pos_;
    if (!peek(')')) {
      while (true) {
        t.args.push_back(term());
        if (peek(',')) {
          ++pos_;
          continue;
        }
        break;
      }
    }
    if (!peek(')')) fail("expected `)`");
    ++pos_;
    return t;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

ExprPtr as_block(const std::vector<ExprPtr>& es) {
  IdAllocator ids(1u << 31);
  return make::block(ids, es);
}

std::vector<std::string> pattern_names(std::span<const PatternPtr> ps) {
  return analysis::vars(ps);
}

bool is_var_name_expr(const Expr& e) { return e.kind == Expr::Kind::Var; }

}  // namespace

Condition parse_condition(std::string_view text) { return CondParser(text).run(); }

ModuleContext::ModuleContext(const Module& m, NodeRef target)
    : m_(m), target_(target), impure_(analysis::impure_functions(m)) {
  const NodeInfo& info = analysis::resolve(m, target);
  if (info.kind == NodeInfo::Kind::Expr || info.kind == NodeInfo::Kind::Body)
    bound_ = analysis::bound_at(m, target);
}

bool ModuleContext::is_node(const ExprPtr& e) const {
  const NodeInfo* info = m_.lookup(e->id);
  return info && info->kind == NodeInfo::Kind::Expr && info->expr == e.get();
}

bool ModuleContext::is_target_body(const std::vector<ExprPtr>& es) const {
  const NodeInfo& info = m_.at(target_.node);
  if (info.kind != NodeInfo::Kind::Body) return false;
  const auto& seq = info.fundef ? info.fundef->body : info.lambda->children;
  return seq == es;
}

std::vector<std::string> ModuleContext::free_vars(const Fragment& f) const {
  switch (f.kind) {
    case Fragment::Kind::Expr:
      if (is_node(f.expr)) return analysis::free_vars(m_, analysis::ref(m_, f.expr->id));
      return analysis::free_vars(*f.expr, bound_);
    case Fragment::Kind::ExprList:
      if (is_target_body(f.exprs)) return analysis::free_vars_of_body(m_, target_);
      return analysis::free_vars(*as_block(f.exprs), bound_);
    case Fragment::Kind::Pattern: return pattern_names(std::span(&f.pattern, 1));
    case Fragment::Kind::PatternList: return pattern_names(f.patterns);
    case Fragment::Kind::Name:
      if (is_variable_name(f.name)) return {f.name};
      return {};
    case Fragment::Kind::NameList: {
      std::vector<std::string> out;
      for (const auto& n : f.names)
        if (is_variable_name(n)) out.push_back(n);
      return out;
    }
  }
  return {};
}

bool ModuleContext::pure(const Fragment& f) const {
  if (f.kind == Fragment::Kind::Expr) return analysis::pure_expr(*f.expr, impure_);
  if (f.kind == Fragment::Kind::ExprList)
    return std::all_of(f.exprs.begin(), f.exprs.end(),
                       [&](const ExprPtr& e) { return analysis::pure_expr(*e, impure_); });
  return true;
}

bool ModuleContext::non_bind(const Fragment& f) const {
  if (f.kind == Fragment::Kind::Expr) {
    if (is_node(f.expr)) return analysis::non_bind(m_, analysis::ref(m_, f.expr->id));
    return analysis::non_bind(*f.expr, bound_);
  }
  if (f.kind == Fragment::Kind::ExprList) {
    if (is_target_body(f.exprs)) return analysis::non_bind(m_, target_);
    return analysis::non_bind(*as_block(f.exprs), bound_);
  }
  return true;
}

bool ModuleContext::fresh(const std::string& name) const {
  return analysis::fresh(m_, name, target_);
}

StandaloneContext::StandaloneContext(std::set<std::string> bound, std::set<std::string> taken)
    : bound_(std::move(bound)), taken_(std::move(taken)) {}

std::vector<std::string> StandaloneContext::free_vars(const Fragment& f) const {
  switch (f.kind) {
    case Fragment::Kind::Expr: return analysis::free_vars(*f.expr, bound_);
    case Fragment::Kind::ExprList: return analysis::free_vars(*as_block(f.exprs), bound_);
    case Fragment::Kind::Pattern: return pattern_names(std::span(&f.pattern, 1));
    case Fragment::Kind::PatternList: return pattern_names(f.patterns);
    case Fragment::Kind::Name:
      if (is_variable_name(f.name)) return {f.name};
      return {};
    case Fragment::Kind::NameList: return f.names;
  }
  return {};
}

bool StandaloneContext::pure(const Fragment& f) const {
  if (f.kind == Fragment::Kind::Expr) return analysis::pure_expr(*f.expr, {});
  if (f.kind == Fragment::Kind::ExprList)
    return std::all_of(f.exprs.begin(), f.exprs.end(),
                       [](const ExprPtr& e) { return analysis::pure_expr(*e, {}); });
  return true;
}

bool StandaloneContext::non_bind(const Fragment& f) const {
  if (f.kind == Fragment::Kind::Expr) return analysis::non_bind(*f.expr, bound_);
  if (f.kind == Fragment::Kind::ExprList) return analysis::non_bind(*as_block(f.exprs), bound_);
  return true;
}

bool StandaloneContext::fresh(const std::string& name) const {
  return !bound_.count(name) && !taken_.count(name);
}

bool total(const Fragment& f) {
  if (f.kind == Fragment::Kind::Expr) return analysis::total(*f.expr);
  if (f.kind == Fragment::Kind::ExprList)
    return std::all_of(f.exprs.begin(), f.exprs.end(),
                       [](const ExprPtr& e) { return analysis::total(*e); });
  return true;
}

namespace {

struct CVal {
  enum class Kind { Bool, Names, Frag };
  Kind kind = Kind::Bool;
  bool truth = false;
  std::vector<std::string> names;
  Fragment frag;
};

class CondEvaluator {
 public:
  CondEvaluator(MetaBinding& b, const ConditionContext& ctx) : b_(b), ctx_(ctx) {}

  CVal eval(const CondTerm& t) {
    if (t.is_meta) {
      auto it = b_.find(t.name);
      if (it == b_.end()) throw UnboundMetavariable(t.name);
      return frag(it->second);
    }
    auto arg = [&](std::size_t i) -> CVal {
      if (t.args.size() <= i)
        throw std::invalid_argument(fmt::format("{} expects {} argument(s)", t.name, i + 1));
      return eval(t.args[i]);
    };
    const std::string& f = t.name;
    if (f == "free_vars") return names(ctx_.free_vars(as_frag(arg(0))));
    if (f == "vars") return names(vars_of(arg(0)));
    if (f == "is_subset") {
      auto a = as_names(arg(0)), b = as_names(arg(1));
      return boolean(std::all_of(a.begin(), a.end(), [&](const std::string& x) {
        return std::find(b.begin(), b.end(), x) != b.end();
      }));
    }
    if (f == "pure") return boolean(ctx_.pure(as_frag(arg(0))));
    if (f == "closed") return boolean(ctx_.free_vars(as_frag(arg(0))).empty());
    if (f == "non_bind") return boolean(ctx_.non_bind(as_frag(arg(0))));
    if (f == "total") return boolean(total(as_frag(arg(0))));
    if (f == "fresh") {
      auto ns = as_names(arg(0));
      return boolean(std::all_of(ns.begin(), ns.end(),
                                 [&](const std::string& n) { return ctx_.fresh(n); }));
    }
    throw std::invalid_argument("unknown condition function " + f);
  }

  std::vector<std::string> as_names(const CVal& v) {
    if (v.kind == CVal::Kind::Names) return v.names;
    if (v.kind == CVal::Kind::Frag) {
      const Fragment& f = v.frag;
      switch (f.kind) {
        case Fragment::Kind::Name: return {f.name};
        case Fragment::Kind::NameList: return f.names;
        case Fragment::Kind::Expr:
          if (is_var_name_expr(*f.expr)) return {f.expr->name};
          break;
        case Fragment::Kind::Pattern:
          if (f.pattern->kind == Pattern::Kind::Var) return {f.pattern->name};
          break;
        case Fragment::Kind::ExprList: {
          std::vector<std::string> out;
          for (const auto& e : f.exprs) {
            if (!is_var_name_expr(*e)) throw std::invalid_argument("not a name list: " + to_text(f));
            out.push_back(e->name);
          }
          return out;
        }
        case Fragment::Kind::PatternList: return pattern_names(f.patterns);
      }
    }
    throw std::invalid_argument("expected names");
  }

 private:
  static CVal boolean(bool b) {
    CVal v;
    v.kind = CVal::Kind::Bool;
    v.truth = b;
    return v;
  }
  static CVal names(std::vector<std::string> ns) {
    CVal v;
    v.kind = CVal::Kind::Names;
    v.names = std::move(ns);
    return v;
  }
  static CVal frag(Fragment f) {
    CVal v;
    v.kind = CVal::Kind::Frag;
    v.frag = std::move(f);
    return v;
  }
  static const Fragment& as_frag(const CVal& v) {
    if (v.kind != CVal::Kind::Frag) throw std::invalid_argument("expected a syntax fragment");
    return v.frag;
  }
  static std::vector<std::string> vars_of(const CVal& v) {
    const Fragment& f = as_frag(v);
    switch (f.kind) {
      case Fragment::Kind::Pattern: return pattern_names(std::span(&f.pattern, 1));
      case Fragment::Kind::PatternList: return pattern_names(f.patterns);
      case Fragment::Kind::Name: return {f.name};
      case Fragment::Kind::NameList: return f.names;
      case Fragment::Kind::Expr:
      case Fragment::Kind::ExprList: {
        // Expression-shaped parameter lists, e.g. arguments of a call.
        std::vector<std::string> out;
        auto add = [&](const Expr& e) {
          for_each_expr(e, [&](const Expr& x) {
            if (x.kind == Expr::Kind::Var && std::find(out.begin(), out.end(), x.name) == out.end())
              out.push_back(x.name);
          });
        };
        if (f.kind == Fragment::Kind::Expr) add(*f.expr);
        for (const auto& e : f.exprs) add(*e);
        return out;
      }
    }
    return {};
  }

  MetaBinding& b_;
  const ConditionContext& ctx_;
};

}  // namespace

ConditionResult evaluate(const Condition& c, MetaBinding& b, const ConditionContext& ctx) {
  CondEvaluator ev(b, ctx);
  for (const auto& a : c.atoms) {
    if (a.bind) {
      auto names = ev.as_names(ev.eval(a.term));
      auto it = b.find(a.bind->name);
      if (it == b.end()) {
        b.emplace(a.bind->name, Fragment::of_names(std::move(names)));
        continue;
      }
      if (ev.as_names(CVal{CVal::Kind::Frag, false, {}, it->second}) != names)
        return {false, a.term.name};
      continue;
    }
    CVal v = ev.eval(a.term);
    if (v.kind != CVal::Kind::Bool) throw std::invalid_argument("condition `" + a.text + "` is not a predicate");
    if (!v.truth) return {false, a.term.name};
  }
  return {};
}

}  // namespace mer::rewrite
