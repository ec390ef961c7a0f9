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

#include <string>
#include <string_view>
#include <vector>

#include "mer/ast.hpp"

namespace mer::detail {

enum class Tok {
  Int, Var, Name, Meta, MetaList,
  Begin, End, Fun, DivKw,
  LParen, RParen, LBrace, RBrace, Comma, Dot, Arrow,
  Assign, EqEq, Less, Plus, Minus, Star,
  Eof,
};

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  std::int64_t value = 0;
  SourceSpan span;
};

const char* tok_name(Tok t);

// Throws ParseError. `%` starts a comment running to end of line.
std::vector<Token> lex(std::string_view source, bool allow_meta);

}  // namespace mer::detail
