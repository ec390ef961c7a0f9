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

#include <cctype>
#include <regex>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "mer/refactor.hpp"

namespace mer::refactor {

namespace {

bool is_local(const std::string& n) { return !n.empty() && std::isupper(static_cast<unsigned char>(n[0])); }

class TermParser {
 public:
  explicit TermParser(std::string_view s) : s_(s) {}

  Term parse() {
    Term t = primary();
    while (eat('.')) {
      std::string n = ident();
      std::vector<Term> args{std::move(t)};
      expect('(');
      arguments(args);
      t = call(std::move(n), std::move(args));
    }
    skip();
    if (pos_ != s_.size()) fail("trailing text");
    return t;
  }

 private:
  Term primary() {
    std::string n = ident();
    if (eat('(')) {
      if (is_local(n)) fail("`" + n + "` is a local, not a function");
      std::vector<Term> args;
      arguments(args);
      if (args.empty()) fail("`" + n + "(...)` needs an argument to apply to");
      return call(std::move(n), std::move(args));
    }
    Term t;
    t.kind = is_local(n) ? Term::Kind::Local : Term::Kind::Literal;
    t.name = std::move(n);
    return t;
  }

  void arguments(std::vector<Term>& out) {
    if (eat(')')) return;
    do {
      std::size_t depth = 0, start = pos_;
      while (pos_ < s_.size()) {
        char c = s_[pos_];
        if (c == '(') ++depth;
        if (c == ')') {
          if (depth == 0) break;
          --depth;
        }
        if (c == ',' && depth == 0) break;
        ++pos_;
      }
      out.push_back(TermParser(s_.substr(start, pos_ - start)).parse());
    } while (eat(','));
    expect(')');
  }

  static Term call(std::string n, std::vector<Term> args) {
    Term t;
    t.kind = Term::Kind::Call;
    t.name = std::move(n);
    t.args = std::move(args);
    return t;
  }

  std::string ident() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    if (start == pos_) fail("expected a name");
    return std::string(s_.substr(start, pos_ - start));
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(fmt::format("expected `{}`", c));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument(fmt::format("in `{}`: {}", s_, what));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

void check_uses(const Term& t, const std::set<std::string>& defined) {
  if (t.kind == Term::Kind::Local && !defined.count(t.name))
    throw std::invalid_argument(fmt::format("local `{}` used before assignment", t.name));
  for (const auto& a : t.args) check_uses(a, defined);
}

}  // namespace

std::string Term::text() const {
  if (kind != Kind::Call) return name;
  std::string out = args.front().text() + "." + name + "(";
  for (std::size_t i = 1; i < args.size(); ++i) out += (i > 1 ? ", " : "") + args[i].text();
  return out + ")";
}

CompositeProgram parse_composite(std::string_view text) {
  static const std::regex header(R"(^\s*REFACTORING\s+([a-z][A-Za-z0-9_]*)\s*\(([^)]*)\)\s*DO\b)");
  static const std::regex assign(R"(^([A-Z][A-Za-z0-9_]*)\s*=\s*(.*)$)");
  static const std::regex iterate(R"(^ITERATE\s+(.*)$)");
  std::string src(text);
  std::smatch h;
  if (!std::regex_search(src, h, header)) throw std::invalid_argument("expected `REFACTORING name(...) DO`");

  CompositeProgram p;
  p.name = h[1].str();
  p.text = src;
  std::set<std::string> defined{"THIS"};
  std::stringstream params(h[2].str());
  for (std::string item; std::getline(params, item, ',');) {
    auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    item = item.substr(b, e - b + 1);
    if (!is_local(item) || item == "THIS") throw std::invalid_argument("bad composite parameter `" + item + "`");
    p.params.push_back(item);
    defined.insert(item);
  }

  std::stringstream body(h.suffix().str());
  for (std::string line; std::getline(body, line);) {
    auto b = line.find_first_not_of(" \t\r"), e = line.find_last_not_of(" \t\r");
    if (b == std::string::npos) continue;
    line = line.substr(b, e - b + 1);
    Statement st;
    std::smatch m;
    if (std::regex_match(line, m, iterate)) {
      st.kind = Statement::Kind::Iterate;
      st.term = TermParser(m[1].str()).parse();
      if (st.term.kind != Term::Kind::Call) throw std::invalid_argument("ITERATE needs a refactoring call");
    } else if (std::regex_match(line, m, assign)) {
      st.kind = Statement::Kind::Assign;
      st.local = m[1].str();
      st.term = TermParser(m[2].str()).parse();
    } else {
      st.term = TermParser(line).parse();
    }
    check_uses(st.term, defined);
    if (st.kind == Statement::Kind::Assign) {
      if (st.local != "THIS" && defined.count(st.local))
        throw std::invalid_argument(fmt::format("local `{}` is assigned twice", st.local));
      defined.insert(st.local);
    }
    p.steps.push_back(std::move(st));
  }
  return p;
}

const Registry& Registry::builtin() {
  static const Registry r = [] {
    Registry out;
    for (const char* text : {
             R"(REFACTORING generalise_function(ParamName)
DO
  THIS.wrap()
  THIS = THIS.function_part()
  Old = function(THIS)
  Name = name(Old)
  Params = function_params(Old)
  New = Old.body().extract_to_function(tmp, Params)
  Var = THIS.extract_to_variable(ParamName)
  Var.to_function_parameter()
  New.rename_function(Name)
)",
             R"(REFACTORING to_function_parameter()
DO
  ITERATE THIS.outer_variable()
  function(THIS).var_to_param(THIS)
)"}) {
      auto p = parse_composite(text);
      out.composites.emplace(p.name, std::move(p));
    }
    return out;
  }();
  return r;
}

}  // namespace mer::refactor
