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

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mer/ast.hpp"

namespace mer {

class ParseError : public std::runtime_error {
 public:
  ParseError(SourcePos pos, const std::string& message);
  SourcePos pos() const { return pos_; }
  const std::string& message() const { return message_; }

 private:
  SourcePos pos_;
  std::string message_;
};

// Throws ParseError or DuplicateDefinition.
Module parse(std::string_view source);

// Fragment parsers. With `allow_meta`, `@Name` and `@Name...` are accepted
// wherever an expression, pattern, argument or function name may appear.
ExprPtr parse_expression(std::string_view source, IdAllocator& ids, bool allow_meta = false);
std::vector<ExprPtr> parse_expression_list(std::string_view source, IdAllocator& ids,
                                           bool allow_meta = false);

// `(P1, ..., Pn) -> E1, ..., Em`
struct ClauseFragment {
  std::vector<PatternPtr> params;
  std::vector<ExprPtr> body;
};
ClauseFragment parse_clause(std::string_view source, IdAllocator& ids, bool allow_meta = false);

// `Name(A1, ..., An)`; the arguments stay expression-shaped.
struct SignatureFragment {
  std::string name;
  bool name_is_meta = false;
  std::vector<ExprPtr> args;
};
SignatureFragment parse_signature(std::string_view source, IdAllocator& ids,
                                  bool allow_meta = false);

// `(A1, ..., An)`
std::vector<ExprPtr> parse_arg_list(std::string_view source, IdAllocator& ids,
                                    bool allow_meta = false);

// `Name(P1, ..., Pn) -> E1, ..., Em.`
FunDefPtr parse_fundef(std::string_view source, IdAllocator& ids, bool allow_meta = false);

std::vector<PatternPtr> parse_pattern_list(std::string_view source, IdAllocator& ids);

std::string pretty(const Module& m);
std::string pretty(const FunDef& d);
std::string pretty(const Expr& e);
std::string pretty(const Pattern& p);
std::string pretty_sequence(std::span<const ExprPtr> seq);
std::string pretty_patterns(std::span<const PatternPtr> ps);

// Smallest expression whose span contains `pos`.
std::optional<NodeId> find_node(const Module& m, SourcePos pos);

// All expressions structurally equal to `needle`, in source order.
std::vector<NodeId> find_occurrences(const Module& m, const Expr& needle);

bool is_variable_name(std::string_view s);
bool is_lower_name(std::string_view s);

}  // namespace mer
