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

#include "mer/syntax.hpp"

namespace mer {

namespace {

enum Level { kMatch = 1, kCompare = 2, kAdd = 3, kMul = 4, kPrimary = 5 };

int level_of(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Match: return kMatch;
    case Expr::Kind::Binary:
      switch (e.op) {
        case BinaryOp::Eq:
        case BinaryOp::Lt: return kCompare;
        case BinaryOp::Add:
        case BinaryOp::Sub: return kAdd;
        case BinaryOp::Mul:
        case BinaryOp::Div: return kMul;
      }
      return kPrimary;
    default: return kPrimary;
  }
}

class Printer {
 public:
  std::string out;

  void pattern(const Pattern& p) {
    switch (p.kind) {
      case Pattern::Kind::Var:
      case Pattern::Kind::Atom: out += p.name; break;
      case Pattern::Kind::Int: out += std::to_string(p.value); break;
      case Pattern::Kind::Meta:
        out += '@';
        out += p.name;
        if (p.meta_list) out += "...";
        break;
      case Pattern::Kind::Tuple:
        out += '{';
        patterns(p.elements);
        out += '}';
        break;
    }
  }

  void patterns(std::span<const PatternPtr> ps) {
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (i) out += ", ";
      pattern(*ps[i]);
    }
  }

  void sequence(std::span<const ExprPtr> seq) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (i) out += ", ";
      expr(*seq[i], kMatch);
    }
  }

  void expr(const Expr& e, int context) {
    bool parens = level_of(e) < context;
    if (parens) out += '(';
    body(e);
    if (parens) out += ')';
  }

  void fundef(const FunDef& d) {
    if (d.name_is_meta) out += '@';
    out += d.name;
    out += '(';
    patterns(d.params);
    out += ") -> ";
    sequence(d.body);
    out += '.';
  }

 private:
  void body(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Int: out += std::to_string(e.value); break;
      case Expr::Kind::Atom:
      case Expr::Kind::Var: out += e.name; break;
      case Expr::Kind::Meta:
        out += '@';
        out += e.name;
        if (e.meta_list) out += "...";
        break;
      case Expr::Kind::Binary: {
        int l = level_of(e);
        bool chain = l != kCompare;
        expr(*e.children[0], chain ? l : l + 1);
        out += ' ';
        out += op_text(e.op);
        out += ' ';
        expr(*e.children[1], l + 1);
        break;
      }
      case Expr::Kind::Match:
        pattern(*e.pattern);
        out += " = ";
        expr(*e.children[0], kMatch);
        break;
      case Expr::Kind::Block:
        out += "begin ";
        sequence(e.children);
        out += " end";
        break;
      case Expr::Kind::Lambda:
        out += "fun(";
        patterns(e.params);
        out += ") -> ";
        sequence(e.children);
        out += " end";
        break;
      case Expr::Kind::Call:
        if (e.name_is_meta) out += '@';
        out += e.name;
        out += '(';
        sequence(e.children);
        out += ')';
        break;
      case Expr::Kind::Apply: {
        const Expr& callee = e.callee();
        bool wrap = callee.kind == Expr::Kind::Lambda;
        if (wrap) out += '(';
        expr(callee, kPrimary);
        if (wrap) out += ')';
        out += '(';
        sequence(e.args());
        out += ')';
        break;
      }
      case Expr::Kind::Print:
        out += "print(";
        expr(*e.children[0], kMatch);
        out += ')';
        break;
      case Expr::Kind::Tuple:
        out += '{';
        sequence(e.children);
        out += '}';
        break;
    }
  }
};

}  // namespace

std::string pretty(const Pattern& p) {
  Printer pr;
  pr.pattern(p);
  return pr.out;
}

std::string pretty(const Expr& e) {
  Printer pr;
  pr.expr(e, kMatch);
  return pr.out;
}

std::string pretty_sequence(std::span<const ExprPtr> seq) {
  Printer pr;
  pr.sequence(seq);
  return pr.out;
}

std::string pretty_patterns(std::span<const PatternPtr> ps) {
  Printer pr;
  pr.patterns(ps);
  return pr.out;
}

std::string pretty(const FunDef& d) {
  Printer pr;
  pr.fundef(d);
  return pr.out;
}

std::string pretty(const Module& m) {
  std::string out;
  for (const auto& d : m.definitions()) {
    out += pretty(*d);
    out += '\n';
  }
  return out;
}

std::optional<NodeId> find_node(const Module& m, SourcePos pos) {
  // Spans of siblings are disjoint, so the last containing node in pre-order
  // is the innermost one.
  const Expr* best = nullptr;
  for (const auto& d : m.definitions())
    for (const auto& e : d->body)
      for_each_expr(*e, [&](const Expr& x) {
        if (x.span.contains(pos)) best = &x;
      });
  if (!best) return std::nullopt;
  return best->id;
}

std::vector<NodeId> find_occurrences(const Module& m, const Expr& needle) {
  std::vector<NodeId> out;
  for (const auto& d : m.definitions())
    for (const auto& e : d->body)
      for_each_expr(*e, [&](const Expr& x) {
        if (same_shape(x, needle)) out.push_back(x.id);
      });
  return out;
}

}  // namespace mer
