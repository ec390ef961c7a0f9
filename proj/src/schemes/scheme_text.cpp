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

#include <regex>

#include <fmt/format.h>

#include "mer/schemes.hpp"

namespace mer::schemes {

namespace {

using rewrite::Sort;

std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<Param> parse_params(const std::string& text) {
  static const std::regex param(R"(^([A-Z][A-Za-z0-9_]*)(\.\.\.?)?$)");
  std::vector<Param> out;
  std::string rest = trim(text);
  if (rest.empty()) return out;
  std::size_t start = 0;
  while (start <= rest.size()) {
    auto comma = rest.find(',', start);
    std::string item = trim(rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    std::smatch m;
    if (!std::regex_match(item, m, param))
      throw std::invalid_argument(fmt::format("bad refactoring parameter `{}`", item));
    out.push_back({m[1].str(), m[2].matched});
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

struct Sections {
  std::string definition;
  std::string reference;
  std::string when;
  std::optional<Placement> placement;
};

// Splits the instance body at its DEFINITION / REFERENCE / WHEN keywords.
Sections split(const std::string& body) {
  static const std::regex kw(R"(\b(DEFINITION(\s+IN\s+(OUTER\s+)?SCOPE)?|REFERENCE|WHEN)\b)");
  Sections s;
  std::string* into = nullptr;
  std::size_t last = 0;
  for (auto it = std::sregex_iterator(body.begin(), body.end(), kw); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    std::string chunk = body.substr(last, m.position() - last);
    if (into) {
      *into += chunk;
    } else if (!trim(chunk).empty()) {
      throw std::invalid_argument(fmt::format("unexpected text `{}` before {}", trim(chunk), m.str()));
    }
    std::string word = m[1].str();
    if (word.rfind("DEFINITION", 0) == 0) {
      into = &s.definition;
      if (m[2].matched) s.placement = m[3].matched ? Placement::OuterScope : Placement::InScope;
    } else if (word == "REFERENCE") {
      into = &s.reference;
    } else {
      into = &s.when;
    }
    if (!into->empty()) throw std::invalid_argument("repeated section " + word);
    last = m.position() + m.length();
  }
  if (!into) throw std::invalid_argument("missing DEFINITION / REFERENCE sections");
  *into += body.substr(last);
  s.definition = trim(s.definition);
  s.reference = trim(s.reference);
  s.when = trim(s.when);
  return s;
}

std::string without_when(const std::string& body, std::string& when) {
  static const std::regex kw(R"((^|\s)WHEN(\s|$))");
  std::smatch m;
  if (!std::regex_search(body, m, kw)) return body;
  when = trim(m.suffix().str());
  return m.prefix().str();
}

}  // namespace

SchemeInstance parse_scheme(std::string_view text) {
  static const std::regex header(
      R"(^\s*(LOCAL REFACTORING|INTRODUCE VARIABLE|INTRODUCE FUNCTION|FUNCTION SIGNATURE REFACTORING|FUNCTION REFACTORING)\s+([a-z][A-Za-z0-9_]*)\s*\(([^)]*)\))");
  std::string src(text);
  std::smatch h;
  if (!std::regex_search(src, h, header))
    throw std::invalid_argument("expected a refactoring scheme header");
  SchemeInstance out;
  out.name = h[2].str();
  out.params = parse_params(h[3].str());
  out.text = trim(src);
  std::string body = h.suffix().str();
  std::string kind = h[1].str();

  if (kind == "LOCAL REFACTORING") {
    out.scheme = Local{rewrite::parse_rule(body, Sort::Expr)};
  } else if (kind == "FUNCTION SIGNATURE REFACTORING") {
    std::string when;
    std::string rule = without_when(body, when);
    out.scheme = SignatureRefactoring{rewrite::parse_rule(rule + (when.empty() ? "" : " WHEN " + when), Sort::Signature)};
  } else {
    Sections s = split(body);
    if (s.definition.empty() || s.reference.empty())
      throw std::invalid_argument(fmt::format("{}: DEFINITION and REFERENCE are required", out.name));
    if (kind == "INTRODUCE VARIABLE") {
      if (!s.placement) throw std::invalid_argument(out.name + ": DEFINITION needs IN SCOPE or IN OUTER SCOPE");
      IntroduceVariable v;
      v.placement = *s.placement;
      v.def_template = rewrite::parse_meta_pattern(s.definition, Sort::Expr);
      v.ref_rule = rewrite::parse_rule(s.reference, Sort::Expr);
      v.when = rewrite::parse_condition(s.when);
      out.scheme = std::move(v);
    } else if (s.placement) {
      throw std::invalid_argument(out.name + ": placement applies to variable introduction only");
    } else if (kind == "INTRODUCE FUNCTION") {
      IntroduceFunction f;
      f.def_template = rewrite::parse_meta_pattern(s.definition, Sort::FunDef);
      f.ref_rule = rewrite::parse_rule(s.reference, Sort::Expr);
      f.when = rewrite::parse_condition(s.when);
      out.scheme = std::move(f);
    } else {
      FunctionRefactoring f;
      f.def_rule = rewrite::parse_rule(s.definition, Sort::Clause);
      f.ref_rule = rewrite::parse_rule(s.reference, Sort::ArgList);
      f.when = rewrite::parse_condition(s.when);
      out.scheme = std::move(f);
    }
  }
  return out;
}

}  // namespace mer::schemes
