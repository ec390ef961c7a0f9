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
#include <atomic>
#include <set>

#include <fmt/format.h>

#include "mer/equiv.hpp"
#include "mer/syntax.hpp"

namespace mer::equiv {

namespace {

using rewrite::Fragment;
using rewrite::MetaBinding;

struct Metas {
  std::set<std::string> exprs;  // expression positions
  std::set<std::string> names;  // pattern positions
  std::set<std::string> lists;
  std::set<std::string> fresh, pure, closed;
};

void collect(const Pattern& p, Metas& out) {
  if (p.kind == Pattern::Kind::Meta) (p.meta_list ? out.lists : out.names).insert(p.name);
  for (const auto& c : p.elements) collect(*c, out);
}

void collect(const Expr& e, Metas& out) {
  if (e.kind == Expr::Kind::Meta) (e.meta_list ? out.lists : out.exprs).insert(e.name);
  if (e.name_is_meta) throw std::invalid_argument("function-name metavariables are not generated");
  if (e.pattern) collect(*e.pattern, out);
  for (const auto& p : e.params) collect(*p, out);
  for (const auto& c : e.children) collect(*c, out);
}

Metas scan(const rewrite::MetaPattern& lhs, const rewrite::MetaPattern& rhs,
           const rewrite::Condition& cond) {
  if (lhs.sort != rewrite::Sort::Expr || rhs.sort != rewrite::Sort::Expr || !lhs.expr || !rhs.expr)
    throw std::invalid_argument("rule equivalence needs expression templates");
  Metas m;
  collect(*lhs.expr, m);
  collect(*rhs.expr, m);
  for (const auto& a : cond.atoms) {
    const auto& t = a.term;
    if (t.args.size() != 1 || !t.args[0].is_meta) continue;
    if (t.name == "fresh") m.fresh.insert(t.args[0].name);
    if (t.name == "pure") m.pure.insert(t.args[0].name);
    if (t.name == "closed") m.closed.insert(t.args[0].name);
  }
  // a name used as an expression too is still generated as a name
  for (const auto& n : m.names) m.exprs.erase(n);
  return m;
}

void add_names(const Expr& e, std::set<std::string>& out) {
  for_each_expr(e, [&](const Expr& x) {
    if (x.kind == Expr::Kind::Var) out.insert(x.name);
    auto pat = [&](const Pattern& p) { for_each_pattern_var(p, [&](const Pattern& v) { out.insert(v.name); }); };
    if (x.pattern) pat(*x.pattern);
    for (const auto& p : x.params) pat(*p);
  });
}

const std::vector<std::string> kVarPool = {"X", "Y", "Z", "W", "V"};
const std::vector<std::string> kNamePool = {"X", "Y", "Z", "W", "V", "N1", "N2"};

struct Sample {
  Env env;
  MetaBinding binding;
  std::vector<std::string> fresh;
};

// One instantiation satisfying the condition, or nullopt.
std::optional<Sample> draw(const Metas& metas, const rewrite::Condition& cond, const RulePlan& plan,
                           std::uint64_t seed) {
  Rng rng(seed);
  Sample s;
  std::vector<std::string> env_names;
  for (const auto& n : kVarPool)
    if (std::bernoulli_distribution(0.45)(rng)) env_names.push_back(n);
  s.env = gen_env(rng, env_names);
  IdAllocator ids;
  std::set<std::string> taken;
  for (const auto& m : metas.exprs) {
    GenOptions o;
    o.pure = metas.pure.count(m) > 0;
    o.closed = metas.closed.count(m) > 0;
    const int depth = std::uniform_int_distribution<int>(0, plan.max_depth)(rng);
    auto e = gen_expr(rng, depth, env_names, ids, o);
    add_names(*e, taken);
    s.binding[m] = Fragment::of(std::move(e));
  }
  for (const auto& m : metas.names) {
    const auto& pool = metas.fresh.count(m) ? kNamePool : kVarPool;
    std::string n = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
    s.binding[m] = Fragment::of_name(n);
    if (metas.fresh.count(m)) s.fresh.push_back(n);
  }
  std::set<std::string> bound;
  for (const auto& [k, v] : s.env) bound.insert(k);
  rewrite::StandaloneContext ctx(bound, taken);
  if (!rewrite::evaluate(cond, s.binding, ctx).holds) return std::nullopt;
  for (const auto& m : metas.lists)
    if (!s.binding.count(m))
      throw std::invalid_argument(fmt::format("list metavariable @{}... is not bound by the condition", m));
  return s;
}

struct RuleTrial {
  Comparison cmp;
  Witness w;
  std::size_t attempts = 0;
  bool exhausted = false;
  bool printing = false;
};

bool has_print(const Expr& e) {
  bool found = false;
  for_each_expr(e, [&](const Expr& x) { found = found || x.kind == Expr::Kind::Print; });
  return found;
}

RuleTrial run_rule_trial(const rewrite::MetaPattern& lhs, const rewrite::MetaPattern& rhs,
                         const rewrite::Condition& cond, const RulePlan& plan, const Metas& metas,
                         std::size_t t) {
  RuleTrial r;
  std::optional<Sample> s;
  while (!s) {
    if (r.attempts == plan.max_attempts) {
      r.exhausted = true;
      return r;
    }
    s = draw(metas, cond, plan, mix_seed(plan.seed, t, r.attempts++));
  }
  IdAllocator ids(1u << 20);
  auto li = rewrite::substitute(lhs, s->binding, ids);
  auto ri = rewrite::substitute(rhs, s->binding, ids);
  r.printing = has_print(*li.expr);
  const auto fuel = static_cast<std::uint64_t>(plan.fuel);
  auto a = interp::eval_expr(*li.expr, s->env, fuel);
  auto b = interp::eval_expr(*ri.expr, s->env, fuel);
  r.cmp = eq_outcomes(a, b, false);
  if (r.cmp.kind == Comparison::Kind::Equal && a.kind == Outcome::Kind::Ok) {
    // names required fresh are not observable by the surrounding program
    Env ea = interp::env_remove(a.env_after, s->fresh);
    Env eb = interp::env_remove(b.env_after, s->fresh);
    if (ea != eb) r.cmp = {Comparison::Kind::Different, "env"};
  }
  r.w = Witness{"rule", {}, fmt::format("{} | {}", pretty(*li.expr), pretty(*ri.expr)), s->env,
                std::move(a), std::move(b), r.cmp.reason};
  return r;
}

void exhausted(const RulePlan& plan, std::size_t t) {
  throw GenerationExhausted(fmt::format(
      "no instantiation satisfying the condition after {} candidates (trial {})", plan.max_attempts, t + 1));
}

Verdict finish(std::vector<RuleTrial>& results, std::size_t upto, const RulePlan& plan) {
  Verdict v;
  for (std::size_t i = 0; i < upto; ++i) {
    auto& r = results[i];
    if (r.exhausted) exhausted(plan, i);
    ++v.trials;
    if (r.printing) ++v.printing;
    if (r.cmp.kind == Comparison::Kind::Unknown) ++v.timeouts;
    if (r.cmp.kind == Comparison::Kind::Different) {
      v.kind = Verdict::Kind::Inequivalent;
      v.witness = std::move(r.w);
      return v;
    }
  }
  v.kind = v.timeouts ? Verdict::Kind::Unknown : Verdict::Kind::Equivalent;
  return v;
}

void check_plan(const RulePlan& plan) {
  if (plan.trials < 1) throw PlanError("trials must be at least 1");
  if (plan.fuel < 1) throw PlanError("fuel must be at least 1");
  if (plan.max_attempts < 1) throw PlanError("max_attempts must be at least 1");
}

std::string conj(std::initializer_list<std::string> parts) {
  std::string out;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (!out.empty()) out += " AND ";
    out += p;
  }
  return out;
}

}  // namespace

Verdict check_rule_equiv_serial(const rewrite::MetaPattern& lhs, const rewrite::MetaPattern& rhs,
                                const rewrite::Condition& cond, const RulePlan& plan) {
  check_plan(plan);
  const auto metas = scan(lhs, rhs, cond);
  Verdict v;
  for (std::size_t t = 0; t < plan.trials; ++t) {
    auto r = run_rule_trial(lhs, rhs, cond, plan, metas, t);
    if (r.exhausted) exhausted(plan, t);
    ++v.trials;
    if (r.printing) ++v.printing;
    if (r.cmp.kind == Comparison::Kind::Unknown) ++v.timeouts;
    if (r.cmp.kind == Comparison::Kind::Different) {
      v.kind = Verdict::Kind::Inequivalent;
      v.witness = std::move(r.w);
      return v;
    }
  }
  v.kind = v.timeouts ? Verdict::Kind::Unknown : Verdict::Kind::Equivalent;
  return v;
}

Verdict check_rule_equiv(const rewrite::MetaPattern& lhs, const rewrite::MetaPattern& rhs,
                         const rewrite::Condition& cond, const RulePlan& plan) {
  check_plan(plan);
  const auto metas = scan(lhs, rhs, cond);
  std::vector<RuleTrial> results(plan.trials);
  std::atomic<std::size_t> first_stop{plan.trials};
  std::atomic<bool> failed{false};
  std::string error;
  const auto n = static_cast<std::ptrdiff_t>(plan.trials);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto t = static_cast<std::size_t>(i);
    if (t > first_stop.load(std::memory_order_relaxed) || failed.load()) continue;
    try {
      results[t] = run_rule_trial(lhs, rhs, cond, plan, metas, t);
    } catch (const std::exception& e) {
#pragma omp critical
      {
        if (!failed.exchange(true)) error = e.what();
      }
      continue;
    }
    if (results[t].exhausted || results[t].cmp.kind == Comparison::Kind::Different) {
      auto cur = first_stop.load();
      while (t < cur && !first_stop.compare_exchange_weak(cur, t)) {
      }
    }
  }
  if (failed) throw std::invalid_argument(error);
  const auto upto = std::min(plan.trials, first_stop.load() + 1);
  return finish(results, upto, plan);
}

RuleObligation obligation(const schemes::SchemeInstance& s) {
  using rewrite::Sort;
  if (const auto* l = std::get_if<schemes::Local>(&s.scheme)) {
    if (l->rule.sort != Sort::Expr) throw std::invalid_argument("local rule is not an expression rule");
    return {l->rule.lhs, l->rule.rhs, l->rule.when};
  }
  if (const auto* iv = std::get_if<schemes::IntroduceVariable>(&s.scheme)) {
    const auto& def = iv->def_template;
    if (!def.expr || def.expr->kind != Expr::Kind::Match || def.expr->pattern->kind != Pattern::Kind::Meta ||
        def.expr->children[0]->kind != Expr::Kind::Meta)
      throw std::invalid_argument("definition template is not `@Name = @E`");
    const auto& name = def.expr->pattern->name;
    const auto& moved = def.expr->children[0]->name;
    auto rhs = rewrite::parse_meta_pattern(
        fmt::format("begin {}, {} end", def.text, iv->ref_rule.rhs.text), Sort::Expr);
    auto cond = rewrite::parse_condition(
        conj({iv->ref_rule.when.text, iv->when.text,
              fmt::format("fresh(@{0}) AND pure(@{1}) AND closed(@{1})", name, moved)}));
    return {iv->ref_rule.lhs, std::move(rhs), std::move(cond)};
  }
  throw std::invalid_argument(fmt::format("no expression-level obligation for {}", s.name));
}

}  // namespace mer::equiv
