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

#include "lexer.hpp"

#include <cctype>
#include <charconv>

#include <fmt/format.h>

#include "mer/syntax.hpp"

namespace mer {

ParseError::ParseError(SourcePos pos, const std::string& message)
    : std::runtime_error(fmt::format("{}:{}: {}", pos.line, pos.col, message)),
      pos_(pos),
      message_(message) {}

namespace detail {

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Int: return "integer";
    case Tok::Var: return "variable";
    case Tok::Name: return "name";
    case Tok::Meta: return "metavariable";
    case Tok::MetaList: return "list metavariable";
    case Tok::Begin: return "'begin'";
    case Tok::End: return "'end'";
    case Tok::Fun: return "'fun'";
    case Tok::DivKw: return "'div'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::Arrow: return "'->'";
    case Tok::Assign: return "'='";
    case Tok::EqEq: return "'=='";
    case Tok::Less: return "'<'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Eof: return "end of input";
  }
  return "?";
}

namespace {

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Lexer {
 public:
  Lexer(std::string_view src, bool allow_meta) : src_(src), allow_meta_(allow_meta) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.span.start = pos();
      if (i_ >= src_.size()) {
        t.kind = Tok::Eof;
        t.span.end = pos();
        out.push_back(t);
        return out;
      }
      char c = src_[i_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        number(t);
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        word(t);
      } else if (c == '@') {
        meta(t);
      } else {
        punct(t);
      }
      t.span.end = pos();
      out.push_back(std::move(t));
    }
  }

 private:
  SourcePos pos() const { return {line_, col_}; }

  void advance(std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i_ < src_.size(); ++k) {
      if (src_[i_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++i_;
    }
  }

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(pos(), msg); }

  void skip_space() {
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (c == '%') {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void number(Token& t) {
    std::size_t j = i_;
    while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
    t.kind = Tok::Int;
    t.text = std::string(src_.substr(i_, j - i_));
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.value);
    if (ec != std::errc()) fail("integer literal out of range");
    advance(j - i_);
  }

  void word(Token& t) {
    std::size_t j = i_;
    while (j < src_.size() && ident_char(src_[j])) ++j;
    t.text = std::string(src_.substr(i_, j - i_));
    advance(j - i_);
    char c = t.text.front();
    if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
      t.kind = Tok::Var;
    } else if (t.text == "begin") {
      t.kind = Tok::Begin;
    } else if (t.text == "end") {
      t.kind = Tok::End;
    } else if (t.text == "fun") {
      t.kind = Tok::Fun;
    } else if (t.text == "div") {
      t.kind = Tok::DivKw;
    } else {
      t.kind = Tok::Name;
    }
  }

  void meta(Token& t) {
    if (!allow_meta_) fail("unexpected '@' outside a rule template");
    advance();
    std::size_t j = i_;
    while (j < src_.size() && ident_char(src_[j])) ++j;
    if (j == i_) fail("expected metavariable name after '@'");
    t.text = std::string(src_.substr(i_, j - i_));
    advance(j - i_);
    if (src_.substr(i_, 3) == "...") {
      t.kind = Tok::MetaList;
      advance(3);
    } else {
      t.kind = Tok::Meta;
    }
  }

  void punct(Token& t) {
    auto two = src_.substr(i_, 2);
    if (two == "->") {
      t.kind = Tok::Arrow;
      advance(2);
      return;
    }
    if (two == "==") {
      t.kind = Tok::EqEq;
      advance(2);
      return;
    }
    switch (src_[i_]) {
      case '(': t.kind = Tok::LParen; break;
      case ')': t.kind = Tok::RParen; break;
      case '{': t.kind = Tok::LBrace; break;
      case '}': t.kind = Tok::RBrace; break;
      case ',': t.kind = Tok::Comma; break;
      case '.': t.kind = Tok::Dot; break;
      case '=': t.kind = Tok::Assign; break;
      case '<': t.kind = Tok::Less; break;
      case '+': t.kind = Tok::Plus; break;
      case '-': t.kind = Tok::Minus; break;
      case '*': t.kind = Tok::Star; break;
      default: fail(fmt::format("unexpected character '{}'", src_[i_]));
    }
    advance();
  }

  std::string_view src_;
  bool allow_meta_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<Token> lex(std::string_view source, bool allow_meta) {
  return Lexer(source, allow_meta).run();
}

}  // namespace detail
}  // namespace mer
