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

#include <map>
#include <set>

#include <fmt/format.h>

#include "mer/refactor.hpp"
#include "mer/syntax.hpp"

namespace mer::refactor {

namespace {

using rewrite::Fragment;

struct PrimeText {
  const char* name;
  const char* text;
};

constexpr PrimeText kPrimes[] = {
    {"wrap", R"(LOCAL REFACTORING wrap()
  @E
  -----
  (fun(@Vars...) -> @E end)(@Vars...)
WHEN
  @Vars... = free_vars(@E) AND non_bind(@E)
)"},
    {"extract_to_variable", R"(INTRODUCE VARIABLE extract_to_variable(Name)
DEFINITION IN SCOPE
  @Name = @E
REFERENCE
  @E
  -----
  @Name
)"},
    {"outer_variable", R"(INTRODUCE VARIABLE outer_variable()
DEFINITION IN OUTER SCOPE
  @Name = @E
REFERENCE
  @Name = @E
  -----
  @Name
)"},
    {"extract_to_function", R"(INTRODUCE FUNCTION extract_to_function(Name, Params..)
DEFINITION
  @Name(@Params...) -> @E.
REFERENCE
  @E
  -----
  @Name(@Params...)
WHEN is_subset(free_vars(@E), vars(@Params...))
)"},
    {"var_to_param", R"(FUNCTION REFACTORING var_to_param(X)
DEFINITION
  (@Args...) -> @X = @E, @Body...
  -----
  (@Args..., @X) -> @Body...
REFERENCE
  (@Args2...)
  -----
  (@Args2..., @E)
WHEN pure(@E) AND closed(@E)
)"},
    {"rename_function", R"(FUNCTION SIGNATURE REFACTORING rename_function(NewName)
  @Name(@Args...)
  -----
  @NewName(@Args...)
)"},
};

const std::map<std::string, schemes::SchemeInstance, std::less<>>& instances() {
  static const auto table = [] {
    std::map<std::string, schemes::SchemeInstance, std::less<>> t;
    for (const auto& p : kPrimes) t.emplace(p.name, schemes::parse_scheme(p.text));
    return t;
  }();
  return table;
}

StepOutcome run(std::string_view name, const Module& m, NodeRef target,
                const rewrite::MetaBinding& args) {
  return schemes::run(prime(name), m, target, args);
}

}  // namespace

std::vector<std::string> prime_names() {
  std::vector<std::string> out;
  for (const auto& p : kPrimes) out.emplace_back(p.name);
  return out;
}

std::string_view prime_text(std::string_view name) {
  for (const auto& p : kPrimes)
    if (name == p.name) return p.text;
  throw std::invalid_argument(fmt::format("unknown prime refactoring `{}`", name));
}

const schemes::SchemeInstance& prime(std::string_view name) {
  auto it = instances().find(name);
  if (it == instances().end())
    throw std::invalid_argument(fmt::format("unknown prime refactoring `{}`", name));
  return it->second;
}

StepOutcome wrap(const Module& m, NodeRef target) { return run("wrap", m, target, {}); }

StepOutcome extract_to_variable(const Module& m, NodeRef target, const std::string& name) {
  if (!is_variable_name(name))
    return StepOutcome::not_applicable(fmt::format("`{}` is not a variable name", name));
  return run("extract_to_variable", m, target, {{"Name", Fragment::of_name(name)}});
}

StepOutcome outer_variable(const Module& m, NodeRef match) {
  return run("outer_variable", m, match, {});
}

StepOutcome extract_to_function(const Module& m, NodeRef target, const std::string& name,
                                std::vector<PatternPtr> params) {
  if (!is_lower_name(name))
    return StepOutcome::not_applicable(fmt::format("`{}` is not a function name", name));
  return run("extract_to_function", m, target,
             {{"Name", Fragment::of_name(name)}, {"Params", Fragment::of(std::move(params))}});
}

StepOutcome var_to_param(const Module& m, NodeRef fn, NodeRef match) {
  const FunDef& d = analysis::resolve_fundef(m, fn);
  const Expr& e = analysis::resolve_expr(m, match);
  if (d.body.empty() || d.body.front()->id != e.id || e.kind != Expr::Kind::Match)
    return StepOutcome::not_applicable("the match is not the first element of the function body");
  return run("var_to_param", m, fn, {{"X", Fragment::of(rewrite::shared_pattern(m, e.pattern->id))}});
}

StepOutcome rename_function(const Module& m, NodeRef fn, const std::string& new_name) {
  if (!is_lower_name(new_name))
    return StepOutcome::not_applicable(fmt::format("`{}` is not a function name", new_name));
  return run("rename_function", m, fn, {{"NewName", Fragment::of_name(new_name)}});
}

std::string fresh_function_name(const Module& m, const std::string& base) {
  std::set<std::string> used;
  for (const auto& d : m.definitions()) {
    used.insert(d->name);
    for (const auto& e : d->body)
      for_each_expr(*e, [&](const Expr& x) {
        if (x.kind == Expr::Kind::Call) used.insert(x.name);
      });
  }
  if (!used.count(base)) return base;
  for (int i = 1;; ++i) {
    std::string n = base + std::to_string(i);
    if (!used.count(n)) return n;
  }
}

}  // namespace mer::refactor
