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

#include <random>

#include <gtest/gtest.h>

#include "mer/rewrite.hpp"
#include "random_text.hpp"
#include "test_util.hpp"

namespace mer::rewrite {
namespace {

using analysis::ref;
using test::kBefore;
using test::node_of;

const char* kWrap =
    "@E\n"
    "-----\n"
    "(fun(@Vars...) -> @E end)(@Vars...)\n"
    "WHEN @Vars... = free_vars(@E) AND non_bind(@E)";

Instance expr_instance(const std::string& text) {
  static IdAllocator ids(1u << 28);
  Instance i;
  i.expr = parse_expression(text, ids);
  return i;
}

TEST(Match, BareMetavariable) {
  auto b = match(parse_meta_pattern("@E", Sort::Expr), expr_instance("X * 2"));
  ASSERT_TRUE(b);
  ASSERT_EQ(b->size(), 1u);
  EXPECT_EQ(to_text(b->at("E")), "X * 2");
}

TEST(Match, ClauseWithListMetavariables) {
  auto m = parse("tmp(X) -> Y = fun() -> 2 end, begin X * Y() end.");
  auto p = parse_meta_pattern("(@Args...) -> @X = @E, @Body...", Sort::Clause);
  auto b = match(p, m, ref(m, m.definitions()[0]->id));
  ASSERT_TRUE(b);
  EXPECT_EQ(to_text(b->at("Args")), "X");
  EXPECT_EQ(to_text(b->at("X")), "Y");
  EXPECT_EQ(to_text(b->at("E")), "fun() -> 2 end");
  EXPECT_EQ(to_text(b->at("Body")), "begin X * Y() end");
  EXPECT_EQ(b->at("Args").kind, Fragment::Kind::PatternList);
  EXPECT_EQ(b->at("X").kind, Fragment::Kind::Pattern);
}

TEST(Match, SignatureAgainstBlockFails) {
  auto p = parse_meta_pattern("@Name(@Args...)", Sort::Signature);
  auto m = parse("f() -> begin 1 end.");
  EXPECT_FALSE(match(p, m, ref(m, m.definitions()[0]->body[0]->id)));
  auto call = parse("f() -> g(1, 2).");
  auto b = match(p, call, ref(call, call.definitions()[0]->body[0]->id));
  ASSERT_TRUE(b);
  EXPECT_EQ(b->at("Name").name, "g");
  EXPECT_EQ(to_text(b->at("Args")), "1, 2");
}

TEST(Match, NonLinearRequiresEqualFragments) {
  auto p = parse_meta_pattern("{@A, @A}", Sort::Expr);
  EXPECT_TRUE(match(p, expr_instance("{X + 1, X + 1}")));
  EXPECT_FALSE(match(p, expr_instance("{X + 1, X + 2}")));
}

TEST(Match, ListPrefixAndSuffix) {
  auto p = parse_meta_pattern("{1, @Rest..., 9}", Sort::Expr);
  auto b = match(p, expr_instance("{1, 2, 3, 9}"));
  ASSERT_TRUE(b);
  EXPECT_EQ(to_text(b->at("Rest")), "2, 3");
  EXPECT_TRUE(match(p, expr_instance("{1, 9}")));
  EXPECT_FALSE(match(p, expr_instance("{1}")));
}

TEST(Template, RejectsTwoListMetavariables) {
  EXPECT_THROW(parse_meta_pattern("{@A..., @B...}", Sort::Expr), std::invalid_argument);
}

TEST(Substitute, Examples) {
  IdAllocator ids(1000);
  MetaBinding b;
  b["Vars"] = Fragment::of_names({});
  b["E"] = Fragment::of(parse_expression("2", ids));
  auto wrap = substitute(parse_meta_pattern("(fun(@Vars...) -> @E end)(@Vars...)", Sort::Expr), b, ids);
  EXPECT_EQ(pretty(wrap), "(fun() -> 2 end)()");

  MetaBinding x;
  x["E"] = Fragment::of(parse_expression("X", ids));
  auto same = substitute(parse_meta_pattern("@E", Sort::Expr), x, ids);
  EXPECT_EQ(same.expr, x["E"].expr);

  MetaBinding args;
  args["Args2"] = Fragment::of(std::vector<ExprPtr>{parse_expression("X", ids)});
  args["E"] = Fragment::of(parse_expression("fun() -> 2 end", ids));
  auto out = substitute(parse_meta_pattern("(@Args2..., @E)", Sort::ArgList), args, ids);
  EXPECT_EQ(pretty(out), "(X, fun() -> 2 end)");
}

TEST(Substitute, UnboundMetavariable) {
  IdAllocator ids(1);
  EXPECT_THROW(substitute(parse_meta_pattern("@E + 1", Sort::Expr), {}, ids), UnboundMetavariable);
}

TEST(Substitute, NamesBecomeParamsAndArgs) {
  IdAllocator ids(1);
  MetaBinding b;
  b["Vars"] = Fragment::of_names({"X", "Y"});
  b["E"] = Fragment::of(parse_expression("X + Y", ids));
  auto out = substitute(parse_meta_pattern("(fun(@Vars...) -> @E end)(@Vars...)", Sort::Expr), b, ids);
  EXPECT_EQ(pretty(out), "(fun(X, Y) -> X + Y end)(X, Y)");
}

TEST(Condition, Parse) {
  auto c = parse_condition("@Vars... = free_vars(@E) AND non_bind(@E)");
  ASSERT_EQ(c.atoms.size(), 2u);
  ASSERT_TRUE(c.atoms[0].bind);
  EXPECT_EQ(c.atoms[0].bind->name, "Vars");
  EXPECT_TRUE(c.atoms[0].bind->list);
  EXPECT_EQ(c.atoms[1].term.name, "non_bind");
  auto s = parse_condition("is_subset(free_vars(@E), vars(@Params...))");
  ASSERT_EQ(s.atoms.size(), 1u);
  EXPECT_EQ(s.atoms[0].term.args.size(), 2u);
  EXPECT_TRUE(parse_condition("").empty());
  EXPECT_THROW(parse_condition("pure(@E) OR closed(@E)"), std::invalid_argument);
}

TEST(Condition, Evaluate) {
  IdAllocator ids(1);
  StandaloneContext ctx({"X"}, {});
  MetaBinding b;
  b["E"] = Fragment::of(parse_expression("X + Z", ids));
  auto r = evaluate(parse_condition("@Vs... = free_vars(@E)"), b, ctx);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(b.at("Vs").names, (std::vector<std::string>{"X", "Z"}));
  b["Params"] = Fragment::of(parse_pattern_list("X", ids));
  auto s = evaluate(parse_condition("is_subset(free_vars(@E), vars(@Params...))"), b, ctx);
  EXPECT_FALSE(s.holds);
  EXPECT_EQ(s.predicate, "is_subset");
  b["P"] = Fragment::of(parse_expression("print(1)", ids));
  EXPECT_EQ(evaluate(parse_condition("closed(@P) AND pure(@P)"), b, ctx).predicate, "pure");
  b["N"] = Fragment::of_name("X");
  EXPECT_FALSE(evaluate(parse_condition("fresh(@N)"), b, ctx).holds);
}

TEST(ApplyRule, WrapOnLiteral) {
  auto m = parse(kBefore);
  auto rule = parse_rule(kWrap, Sort::Expr);
  auto out = apply_rule(rule, m, ref(m, node_of(m, "2")));
  ASSERT_TRUE(out.ok()) << describe(out);
  EXPECT_EQ(pretty(*out.snapshot.definitions()[0]), "f(X) -> begin X * (fun() -> 2 end)() end.");
  EXPECT_EQ(pretty(analysis::resolve_expr(out.snapshot, out.result)), "(fun() -> 2 end)()");
  EXPECT_EQ(pretty(*out.snapshot.definitions()[1]), pretty(*m.definitions()[1]));
}

TEST(ApplyRule, WrapWithFreeVariables) {
  auto m = parse("h(X) -> X + 1.");
  auto out = apply_rule(parse_rule(kWrap, Sort::Expr), m, ref(m, m.definitions()[0]->body[0]->id));
  ASSERT_TRUE(out.ok());
  EXPECT_EQ(pretty(out.snapshot), "h(X) -> (fun(X) -> X + 1 end)(X).\n");
}

TEST(ApplyRule, WrapRejectsLeakingBinding) {
  auto m = parse("f() -> Y = 5, Y + 1.");
  auto out = apply_rule(parse_rule(kWrap, Sort::Expr), m, ref(m, m.definitions()[0]->body[0]->id));
  EXPECT_EQ(out.kind, StepOutcome::Kind::PreconditionViolated);
  EXPECT_EQ(out.predicate, "non_bind");
}

TEST(ApplyRule, HeadRuleOnLiteralNotApplicable) {
  auto m = parse(kBefore);
  auto rule = parse_rule("(@Args...) -> @Body...\n---\n(@Args...) -> @Body...", Sort::Clause);
  EXPECT_EQ(apply_rule(rule, m, ref(m, node_of(m, "2"))).kind, StepOutcome::Kind::NotApplicable);
}

TEST(ApplyRule, InlineSeparator) {
  auto rule = parse_rule("@E ---- {@E}", Sort::Expr);
  auto m = parse("f() -> 1.");
  auto out = apply_rule(rule, m, ref(m, m.definitions()[0]->body[0]->id));
  ASSERT_TRUE(out.ok());
  EXPECT_EQ(pretty(out.snapshot), "f() -> {1}.\n");
}

TEST(ApplyRule, OriginStability) {
  auto m = parse("f(X) -> begin X * 2, X + 3 end.");
  auto rule = parse_rule("@A * @B ---- @B * @A", Sort::Expr);
  NodeId a = node_of(m, "X"), b = node_of(m, "2");
  auto out = apply_rule(rule, m, ref(m, node_of(m, "X * 2")));
  ASSERT_TRUE(out.ok());
  EXPECT_EQ(pretty(analysis::resolve_expr(out.snapshot, ref(out.snapshot, a))), "X");
  EXPECT_EQ(pretty(analysis::resolve_expr(out.snapshot, ref(out.snapshot, b))), "2");
  EXPECT_EQ(pretty(out.snapshot), "f(X) -> begin 2 * X, X + 3 end.\n");
  // The source snapshot is untouched.
  EXPECT_EQ(pretty(m), "f(X) -> begin X * 2, X + 3 end.\n");
}

// Template derived from a concrete expression by abstracting random
// subtrees and sequence slices into metavariables.
class Abstractor {
 public:
  explicit Abstractor(unsigned seed) : rng_(seed) {}

  ExprPtr expr(const Expr& e) {
    if (coin(0.2)) return meta_expr(false);
    auto copy = std::make_shared<Expr>(e);
    if (e.kind == Expr::Kind::Block || e.kind == Expr::Kind::Tuple || e.kind == Expr::Kind::Call) {
      copy->children = seq(e.children);
    } else {
      copy->children.clear();
      for (const auto& c : e.children) copy->children.push_back(expr(*c));
    }
    return copy;
  }

 private:
  std::vector<ExprPtr> seq(const std::vector<ExprPtr>& xs) {
    std::vector<ExprPtr> out;
    if (!xs.empty() && coin(0.3)) {
      std::size_t a = pick(xs.size() + 1), b = pick(xs.size() + 1);
      if (a > b) std::swap(a, b);
      for (std::size_t i = 0; i < a; ++i) out.push_back(expr(*xs[i]));
      out.push_back(meta_expr(true));
      for (std::size_t i = b; i < xs.size(); ++i) out.push_back(expr(*xs[i]));
      return out;
    }
    for (const auto& x : xs) out.push_back(expr(*x));
    return out;
  }

  ExprPtr meta_expr(bool list) {
    auto m = std::make_shared<Expr>();
    m->kind = Expr::Kind::Meta;
    m->meta_list = list;
    m->name = "M" + std::to_string(counter_++);
    return m;
  }

  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  std::mt19937 rng_;
  int counter_ = 0;
};

TEST(Properties, MatchSubstituteRoundTrip) {
  test::RandomText gen(31);
  Abstractor abs(32);
  IdAllocator ids(1);
  int matched_other = 0;
  for (int i = 0; i < 500; ++i) {
    auto e = parse_expression(gen.expr(4), ids);
    MetaPattern p;
    p.sort = Sort::Expr;
    p.expr = abs.expr(*e);
    Instance s;
    s.expr = e;
    auto b = match(p, s);
    ASSERT_TRUE(b) << pretty(*p.expr) << " vs " << pretty(*e);
    auto back = substitute(p, *b, ids);
    EXPECT_TRUE(same_shape(*back.expr, *e)) << pretty(*back.expr) << " vs " << pretty(*e);

    auto other = parse_expression(gen.expr(3), ids);
    s.expr = other;
    if (auto ob = match(p, s)) {
      ++matched_other;
      EXPECT_TRUE(same_shape(*substitute(p, *ob, ids).expr, *other));
    }
  }
  EXPECT_GT(matched_other, 0);
}

// NotApplicable iff the lhs fails to match; PreconditionViolated iff it
// matches and the condition is false.
TEST(Properties, OutcomeClassification) {
  std::vector<RewriteRule> rules{
      parse_rule(kWrap, Sort::Expr),
      parse_rule("@A + @B ---- @B + @A WHEN pure(@A) AND pure(@B)", Sort::Expr),
      parse_rule("{@Xs...} ---- begin @Xs... end WHEN closed(@Xs...)", Sort::Expr),
  };
  test::RandomText gen(77);
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < 200; ++i) {
    auto m = parse("f(X) -> " + gen.seq(3) + ".");
    std::vector<NodeId> nodes;
    for (const auto& e : m.definitions()[0]->body)
      for_each_expr(*e, [&](const Expr& x) { nodes.push_back(x.id); });
    for (const auto& r : rules)
      for (NodeId id : nodes) {
        auto n = ref(m, id);
        auto out = apply_rule(r, m, n);
        auto b = match(r.lhs, m, n);
        if (!b) {
          EXPECT_EQ(out.kind, StepOutcome::Kind::NotApplicable);
        } else {
          ModuleContext ctx(m, n);
          bool holds = evaluate(r.when, *b, ctx).holds;
          EXPECT_EQ(out.kind, holds ? StepOutcome::Kind::Applied
                                    : StepOutcome::Kind::PreconditionViolated);
        }
        ++counts[static_cast<int>(out.kind)];
      }
  }
  EXPECT_GT(counts[0], 0);
  EXPECT_GT(counts[1], 0);
  EXPECT_GT(counts[2], 0);
}

}  // namespace
}  // namespace mer::rewrite
