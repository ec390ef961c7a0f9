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

#include <set>

#include <fmt/format.h>

#include "lexer.hpp"
#include "mer/syntax.hpp"

namespace mer {

using detail::Tok;
using detail::Token;

namespace {

class Parser {
 public:
  Parser(std::string_view src, IdAllocator& ids, bool allow_meta)
      : toks_(detail::lex(src, allow_meta)), ids_(ids), allow_meta_(allow_meta) {}

  std::vector<FunDefPtr> module() {
    std::vector<FunDefPtr> defs;
    while (!at(Tok::Eof)) defs.push_back(fundef());
    return defs;
  }

  FunDefPtr fundef() {
    SourcePos start = peek().span.start;
    auto d = std::make_shared<FunDef>();
    d->id = ids_.fresh();
    if (at(Tok::Meta) && allow_meta_) {
      d->name = take().text;
      d->name_is_meta = true;
    } else {
      d->name = expect(Tok::Name, "function name").text;
    }
    expect(Tok::LParen, "'(' after function name");
    d->params = patterns_until(Tok::RParen);
    expect(Tok::RParen, "')'");
    expect(Tok::Arrow, "'->'");
    d->body_id = ids_.fresh();
    d->body = sequence();
    SourcePos end = expect(Tok::Dot, "'.' ending the definition").span.end;
    d->span = {start, end};
    if (d->name == "print" && d->params.size() == 1)
      throw ParseError(start, "print/1 is reserved");
    return d;
  }

  ClauseFragment clause() {
    ClauseFragment c;
    expect(Tok::LParen, "'(' opening the clause head");
    c.params = patterns_until(Tok::RParen);
    expect(Tok::RParen, "')'");
    expect(Tok::Arrow, "'->'");
    c.body = sequence();
    return c;
  }

  SignatureFragment signature() {
    SignatureFragment s;
    if (at(Tok::Meta) && allow_meta_) {
      s.name = take().text;
      s.name_is_meta = true;
    } else {
      s.name = expect(Tok::Name, "function name").text;
    }
    expect(Tok::LParen, "'('");
    s.args = items_until(Tok::RParen);
    expect(Tok::RParen, "')'");
    return s;
  }

  std::vector<ExprPtr> arg_list() {
    expect(Tok::LParen, "'('");
    auto args = items_until(Tok::RParen);
    expect(Tok::RParen, "')'");
    return args;
  }

  std::vector<ExprPtr> sequence() {
    std::vector<ExprPtr> seq;
    seq.push_back(item());
    while (accept(Tok::Comma)) seq.push_back(item());
    return seq;
  }

  std::vector<PatternPtr> pattern_list_to_eof() {
    auto ps = patterns_until(Tok::Eof);
    return ps;
  }

  ExprPtr expression() { return expr(); }

  void finish() { expect(Tok::Eof, "end of input"); }

 private:
  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at(Tok t) const { return peek().kind == t; }
  const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool accept(Tok t) {
    if (!at(t)) return false;
    take();
    return true;
  }
  const Token& expect(Tok t, const char* what) {
    if (!at(t))
      throw ParseError(peek().span.start,
                       fmt::format("expected {}, found {}", what, describe(peek())));
    return take();
  }
  static std::string describe(const Token& t) {
    if (t.kind == Tok::Eof) return "end of input";
    if (t.text.empty()) return detail::tok_name(t.kind);
    return fmt::format("'{}'", t.text);
  }
  [[noreturn]] void fail_here(const std::string& msg) {
    throw ParseError(peek().span.start, msg);
  }

  // A list item: an expression, or a list metavariable in meta mode.
  ExprPtr item() {
    if (at(Tok::MetaList)) return meta_expr(take(), true);
    return expr();
  }

  std::vector<ExprPtr> items_until(Tok close) {
    std::vector<ExprPtr> out;
    if (at(close)) return out;
    out.push_back(item());
    while (accept(Tok::Comma)) out.push_back(item());
    return out;
  }

  std::vector<PatternPtr> patterns_until(Tok close) {
    std::vector<PatternPtr> out;
    if (at(close)) return out;
    out.push_back(pattern());
    while (accept(Tok::Comma)) out.push_back(pattern());
    return out;
  }

  ExprPtr meta_expr(const Token& t, bool list) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Meta;
    e->id = ids_.fresh();
    e->name = t.text;
    e->meta_list = list;
    e->span = t.span;
    return e;
  }

  PatternPtr pattern() {
    const Token& t = peek();
    auto p = std::make_shared<Pattern>();
    SourcePos start = t.span.start;
    switch (t.kind) {
      case Tok::Var:
        p->kind = Pattern::Kind::Var;
        p->name = take().text;
        break;
      case Tok::Int:
        p->kind = Pattern::Kind::Int;
        p->value = take().value;
        break;
      case Tok::Minus:
        take();
        p->kind = Pattern::Kind::Int;
        p->value = -expect(Tok::Int, "integer after '-'").value;
        break;
      case Tok::Name:
        p->kind = Pattern::Kind::Atom;
        p->name = take().text;
        break;
      case Tok::Meta:
      case Tok::MetaList:
        p->kind = Pattern::Kind::Meta;
        p->meta_list = t.kind == Tok::MetaList;
        p->name = take().text;
        break;
      case Tok::LBrace: {
        take();
        p->kind = Pattern::Kind::Tuple;
        p->elements = patterns_until(Tok::RBrace);
        expect(Tok::RBrace, "'}'");
        break;
      }
      default:
        fail_here(fmt::format("expected pattern, found {}", describe(t)));
    }
    p->id = ids_.fresh();
    p->span = {start, toks_[pos_ - 1].span.end};
    check_linear(*p);
    return p;
  }

  void check_linear(const Pattern& p) {
    std::set<std::string> seen;
    for_each_pattern_var(p, [&](const Pattern& v) {
      if (!seen.insert(v.name).second)
        throw ParseError(v.span.start,
                         fmt::format("variable {} occurs twice in one pattern", v.name));
    });
  }

  ExprPtr expr() {
    auto lhs = comparison();
    if (!at(Tok::Assign)) return lhs;
    SourcePos at_eq = take().span.start;
    auto pat = expr_to_pattern(*lhs, ids_);
    if (!pat) throw ParseError(lhs->span.start, "left side of '=' is not a pattern");
    check_linear(**pat);
    if ((*pat)->kind == Pattern::Kind::Meta && (*pat)->meta_list)
      throw ParseError(at_eq, "list metavariable cannot be a match pattern");
    auto rhs = expr();
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Match;
    e->id = ids_.fresh();
    e->pattern = *pat;
    e->span = {lhs->span.start, rhs->span.end};
    e->children = {std::move(rhs)};
    return e;
  }

  ExprPtr comparison() {
    auto lhs = additive();
    if (at(Tok::EqEq) || at(Tok::Less)) {
      BinaryOp op = take().kind == Tok::EqEq ? BinaryOp::Eq : BinaryOp::Lt;
      auto rhs = additive();
      lhs = binary(op, std::move(lhs), std::move(rhs));
      if (at(Tok::EqEq) || at(Tok::Less)) fail_here("comparison operators do not chain");
    }
    return lhs;
  }

  ExprPtr additive() {
    auto lhs = multiplicative();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      BinaryOp op = take().kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
      lhs = binary(op, std::move(lhs), multiplicative());
    }
    return lhs;
  }

  ExprPtr multiplicative() {
    auto lhs = postfix();
    while (at(Tok::Star) || at(Tok::DivKw)) {
      BinaryOp op = take().kind == Tok::Star ? BinaryOp::Mul : BinaryOp::Div;
      lhs = binary(op, std::move(lhs), postfix());
    }
    return lhs;
  }

  ExprPtr binary(BinaryOp op, ExprPtr l, ExprPtr r) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Binary;
    e->id = ids_.fresh();
    e->op = op;
    e->span = {l->span.start, r->span.end};
    e->children = {std::move(l), std::move(r)};
    return e;
  }

  ExprPtr postfix() {
    SourcePos start = peek().span.start;
    bool parenthesized = at(Tok::LParen);
    auto callee = primary();
    if (!at(Tok::LParen)) return callee;
    bool ok = callee->kind == Expr::Kind::Var ||
              (callee->kind == Expr::Kind::Meta && !callee->meta_list) ||
              (callee->kind == Expr::Kind::Lambda && parenthesized);
    if (!ok) {
      if (callee->kind == Expr::Kind::Lambda)
        fail_here("a fun must be parenthesized to be applied");
      fail_here("only a variable or a parenthesized fun can be applied");
    }
    take();
    auto args = items_until(Tok::RParen);
    SourcePos end = expect(Tok::RParen, "')' closing the argument list").span.end;
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Apply;
    e->id = ids_.fresh();
    e->span = {start, end};
    e->children.push_back(std::move(callee));
    for (auto& a : args) e->children.push_back(std::move(a));
    if (at(Tok::LParen)) fail_here("the result of an application cannot be applied directly");
    return e;
  }

  ExprPtr primary() {
    const Token& t = peek();
    SourcePos start = t.span.start;
    auto e = std::make_shared<Expr>();
    switch (t.kind) {
      case Tok::Int:
        e->kind = Expr::Kind::Int;
        e->value = take().value;
        break;
      case Tok::Minus: {
        take();
        e->kind = Expr::Kind::Int;
        e->value = -expect(Tok::Int, "integer after unary '-'").value;
        break;
      }
      case Tok::Var:
        e->kind = Expr::Kind::Var;
        e->name = take().text;
        break;
      case Tok::Meta:
        if (peek(1).kind == Tok::LParen) return call(true);
        return meta_expr(take(), false);
      case Tok::MetaList:
        fail_here("list metavariable in a single-expression position");
      case Tok::Name:
        if (peek(1).kind == Tok::LParen) return call(false);
        e->kind = Expr::Kind::Atom;
        e->name = take().text;
        break;
      case Tok::LParen: {
        take();
        auto inner = expr();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Begin: {
        take();
        e->kind = Expr::Kind::Block;
        e->children = sequence();
        expect(Tok::End, "'end' closing 'begin'");
        break;
      }
      case Tok::Fun: {
        take();
        e->kind = Expr::Kind::Lambda;
        expect(Tok::LParen, "'(' after 'fun'");
        e->params = patterns_until(Tok::RParen);
        expect(Tok::RParen, "')'");
        expect(Tok::Arrow, "'->'");
        e->body_id = ids_.fresh();
        e->children = sequence();
        expect(Tok::End, "'end' closing 'fun'");
        break;
      }
      case Tok::LBrace: {
        take();
        e->kind = Expr::Kind::Tuple;
        e->children = items_until(Tok::RBrace);
        expect(Tok::RBrace, "'}'");
        break;
      }
      default:
        fail_here(fmt::format("expected expression, found {}", describe(t)));
    }
    e->id = ids_.fresh();
    e->span = {start, toks_[pos_ - 1].span.end};
    return e;
  }

  ExprPtr call(bool meta_name) {
    SourcePos start = peek().span.start;
    std::string name = take().text;
    take();  // (
    auto args = items_until(Tok::RParen);
    SourcePos end = expect(Tok::RParen, "')' closing the argument list").span.end;
    auto e = std::make_shared<Expr>();
    if (!meta_name && name == "print") {
      if (args.size() != 1 || (args[0]->kind == Expr::Kind::Meta && args[0]->meta_list))
        throw ParseError(start, "print takes exactly one argument");
      e->kind = Expr::Kind::Print;
    } else {
      e->kind = Expr::Kind::Call;
      e->name = std::move(name);
      e->name_is_meta = meta_name;
    }
    e->id = ids_.fresh();
    e->span = {start, end};
    e->children = std::move(args);
    return e;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  IdAllocator& ids_;
  bool allow_meta_;
};

}  // namespace

Module parse(std::string_view source) {
  IdAllocator ids;
  Parser p(source, ids, false);
  auto defs = p.module();
  return Module::build(std::move(defs), ids.peek());
}

ExprPtr parse_expression(std::string_view source, IdAllocator& ids, bool allow_meta) {
  Parser p(source, ids, allow_meta);
  auto e = p.expression();
  p.finish();
  return e;
}

std::vector<ExprPtr> parse_expression_list(std::string_view source, IdAllocator& ids,
                                           bool allow_meta) {
  Parser p(source, ids, allow_meta);
  auto seq = p.sequence();
  p.finish();
  return seq;
}

ClauseFragment parse_clause(std::string_view source, IdAllocator& ids, bool allow_meta) {
  Parser p(source, ids, allow_meta);
  auto c = p.clause();
  p.finish();
  return c;
}

SignatureFragment parse_signature(std::string_view source, IdAllocator& ids, bool allow_meta) {
  Parser p(source, ids, allow_meta);
  auto s = p.signature();
  p.finish();
  return s;
}

std::vector<ExprPtr> parse_arg_list(std::string_view source, IdAllocator& ids, bool allow_meta) {
  Parser p(source, ids, allow_meta);
  auto a = p.arg_list();
  p.finish();
  return a;
}

FunDefPtr parse_fundef(std::string_view source, IdAllocator& ids, bool allow_meta) {
  Parser p(source, ids, allow_meta);
  auto d = p.fundef();
  p.finish();
  return d;
}

std::vector<PatternPtr> parse_pattern_list(std::string_view source, IdAllocator& ids) {
  Parser p(source, ids, false);
  auto ps = p.pattern_list_to_eof();
  p.finish();
  return ps;
}

bool is_variable_name(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isupper(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

bool is_lower_name(std::string_view s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return s != "begin" && s != "end" && s != "fun" && s != "div";
}

}  // namespace mer
