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
#include <functional>
#include <map>

#include <gtest/gtest.h>

#include "mer/analysis.hpp"
#include "random_text.hpp"
#include "test_util.hpp"

namespace mer::analysis {
namespace {

using test::kBefore;
using test::node_of;

using Names = std::vector<std::string>;

// Independent occurrence classifier: tracks, per name, where its visible
// binding came from, and records references with their source position.
enum class Origin { Outside, Target, Local };

struct Classifier {
  struct Ref {
    SourcePos at;
    std::string name;
    std::optional<Origin> origin;  // nullopt: unbound
  };
  std::vector<Ref> refs;

  using Env = std::map<std::string, Origin>;

  void touch(const std::string& n, SourcePos at, Env& env, Origin fresh_origin, bool pattern) {
    auto it = env.find(n);
    if (it != env.end()) {
      refs.push_back({at, n, it->second});
    } else if (pattern) {
      env[n] = fresh_origin;
    } else {
      refs.push_back({at, n, std::nullopt});
    }
  }

  void pat(const Pattern& p, Env& env, Origin o) {
    if (p.kind == Pattern::Kind::Var) touch(p.name, p.span.start, env, o, true);
    for (const auto& c : p.elements) pat(*c, env, o);
  }

  void walk(const Expr& e, Env& env, Origin o) {
    switch (e.kind) {
      case Expr::Kind::Var: touch(e.name, e.span.start, env, o, false); return;
      case Expr::Kind::Match:
        walk(*e.children[0], env, o);
        pat(*e.pattern, env, o);
        return;
      case Expr::Kind::Lambda: {
        Env inner = env;
        for (const auto& p : e.params)
          for_each_pattern_var(*p, [&](const Pattern& v) { inner[v.name] = o; });
        for (const auto& c : e.children) walk(*c, inner, o);
        return;
      }
      default:
        for (const auto& c : e.children) walk(*c, env, o);
    }
  }

  Names free() const {
    auto sorted = refs;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Ref& a, const Ref& b) { return a.at < b.at; });
    Names out;
    for (const auto& r : sorted)
      if ((!r.origin || *r.origin == Origin::Outside) &&
          std::find(out.begin(), out.end(), r.name) == out.end())
        out.push_back(r.name);
    return out;
  }
};

Module parse_one(const std::string& body) { return parse("f(X) -> " + body + "."); }

NodeRef first_body(const Module& m) { return ref(m, m.definitions()[0]->body[0]->id); }

TEST(FreeVars, Examples) {
  IdAllocator ids(1);
  EXPECT_EQ(free_vars(*parse_expression("2", ids), {}), Names{});
  auto m = parse(kBefore);
  EXPECT_EQ(free_vars(m, ref(m, node_of(m, "2"))), Names{});
  EXPECT_EQ(free_vars(m, ref(m, node_of(m, "X * 2"))), Names{"X"});
  auto l = parse("f(Y) -> fun(X) -> X + Y end.");
  EXPECT_EQ(free_vars(l, first_body(l)), Names{"Y"});
}

TEST(FreeVars, FirstOccurrenceOrder) {
  auto m = parse("f(A, B, C) -> {C, A, C, B}.");
  EXPECT_EQ(free_vars(m, first_body(m)), (Names{"C", "A", "B"}));
}

TEST(FreeVars, StaleRefRejected) {
  auto m = parse(kBefore);
  auto n = parse(kBefore);
  EXPECT_THROW(free_vars(n, ref(m, node_of(m, "2"))), StaleRef);
}

TEST(FreeVars, BodySequenceExcludesLambdaParams) {
  auto m = parse("f(Y) -> fun(X) -> Z = X, Z + Y end.");
  const Expr& lam = *m.definitions()[0]->body[0];
  EXPECT_EQ(free_vars_of_body(m, ref(m, lam.body_id)), (Names{"X", "Y"}));
}

TEST(Vars, Examples) {
  IdAllocator ids(1);
  EXPECT_EQ(vars(parse_pattern_list("X", ids)), Names{"X"});
  EXPECT_EQ(vars(parse_pattern_list("{X, Y}, Z", ids)), (Names{"X", "Y", "Z"}));
  EXPECT_EQ(vars(parse_pattern_list("", ids)), Names{});
}

TEST(Pure, Examples) {
  auto m = parse("f() -> 1 + 2, print(1), fun() -> print(1) end.");
  const auto& b = m.definitions()[0]->body;
  EXPECT_TRUE(pure(m, ref(m, b[0]->id)));
  EXPECT_FALSE(pure(m, ref(m, b[1]->id)));
  EXPECT_TRUE(pure(m, ref(m, b[2]->id)));
}

TEST(Pure, CallGraphFixpoint) {
  auto m = parse(
      "a() -> b().\nb() -> c().\nc() -> print(0).\n"
      "d() -> e().\ne() -> d().\n"
      "k(F) -> F().\n"
      "t() -> a(), d(), k(0).");
  auto impure = impure_functions(m);
  EXPECT_EQ(impure, (std::set<FunKey>{{"a", 0}, {"b", 0}, {"c", 0}, {"k", 1}, {"t", 0}}));
}

TEST(Closed, Examples) {
  auto m = parse("f(X) -> fun() -> 2 end, X + 1, fun(X) -> X end.");
  const auto& b = m.definitions()[0]->body;
  EXPECT_TRUE(closed(m, ref(m, b[0]->id)));
  EXPECT_FALSE(closed(m, ref(m, b[1]->id)));
  EXPECT_TRUE(closed(m, ref(m, b[2]->id)));
}

TEST(NonBind, Examples) {
  auto a = parse("f() -> Y = 5, Y + 1.");
  EXPECT_FALSE(non_bind(a, first_body(a)));
  auto b = parse("f() -> Y = 5.");
  EXPECT_TRUE(non_bind(b, first_body(b)));
  auto l = parse(kBefore);
  EXPECT_TRUE(non_bind(l, ref(l, node_of(l, "2"))));
}

TEST(NonBind, BlockLeaksBinding) {
  auto m = parse("f() -> begin Y = 5 end, Y.");
  EXPECT_FALSE(non_bind(m, first_body(m)));
  auto n = parse("f() -> fun() -> Y = 5 end, Y.");
  EXPECT_TRUE(non_bind(n, first_body(n)));
}

TEST(Fresh, Examples) {
  auto m = parse(kBefore);
  auto two = ref(m, node_of(m, "2"));
  EXPECT_TRUE(fresh(m, "Y", two));
  EXPECT_FALSE(fresh(m, "X", two));
  EXPECT_TRUE(fresh(m, "Z", ref(m, m.definitions()[1]->id)));
}

TEST(Fresh, OutsideExcludedSubtree) {
  auto m = parse("f() -> fun() -> Y = 1 end, 3.");
  auto lam = m.definitions()[0]->body[0]->id;
  EXPECT_FALSE(fresh(m, "Y", ref(m, lam)));
  EXPECT_TRUE(fresh_outside(m, "Y", ref(m, lam), lam));
}

TEST(Total, Cases) {
  IdAllocator ids(1);
  auto t = [&](const char* s) { return total(*parse_expression(s, ids)); };
  EXPECT_TRUE(t("2"));
  EXPECT_TRUE(t("fun() -> print(1) end"));
  EXPECT_TRUE(t("{1, ok, 3 * 4}"));
  EXPECT_TRUE(t("ok == 1"));
  EXPECT_FALSE(t("1 div 0"));
  EXPECT_FALSE(t("ok < 1"));
  EXPECT_FALSE(t("ok + 1"));
  EXPECT_FALSE(t("X"));
  EXPECT_FALSE(t("print(1)"));
  EXPECT_FALSE(t("9223372036854775807 + 1"));
  EXPECT_FALSE(t("(-9223372036854775807 - 1) div -1"));
}

TEST(Scope, Examples) {
  auto m = parse(kBefore);
  auto two = ref(m, node_of(m, "2"));
  const FunDef& f = *m.definitions()[0];
  EXPECT_EQ(scope(m, two).node, f.body_id);
  EXPECT_EQ(scope(m, ref(m, f.body[0]->id)).node, f.body_id);
  auto l = parse("f() -> fun() -> 1, 2 end.");
  const Expr& lam = *l.definitions()[0]->body[0];
  EXPECT_EQ(scope(l, ref(l, lam.children[1]->id)).node, lam.body_id);
}

TEST(TopExpression, Examples) {
  auto m = parse(kBefore);
  const FunDef& f = *m.definitions()[0];
  EXPECT_EQ(top_expression(m, ref(m, node_of(m, "2"))).node, f.body[0]->id);
  EXPECT_EQ(top_expression(m, ref(m, f.body[0]->id)).node, f.body[0]->id);
  auto w = parse("f(X) -> begin X * (fun() -> 2 end)() end.");
  const FunDef& g = *w.definitions()[0];
  EXPECT_EQ(top_expression(w, ref(w, node_of(w, "fun() -> 2 end"))).node, g.body[0]->id);
}

TEST(Selectors, FunctionNameParams) {
  auto m = parse(kBefore);
  auto f = function(m, ref(m, node_of(m, "2")));
  EXPECT_EQ(f.node, m.definitions()[0]->id);
  EXPECT_EQ(name(m, f), "f");
  auto ps = function_params(m, f);
  ASSERT_EQ(ps.size(), 1u);
  EXPECT_EQ(pretty(*ps[0]), "X");
  EXPECT_EQ(function(m, f), f);
  EXPECT_EQ(name(m, ref(m, m.definitions()[1]->id)), "g");
}

TEST(References, Examples) {
  auto m = parse(kBefore);
  auto r = references(m, {"f", 1});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(pretty(resolve_expr(m, r[0])), "f(X + 1)");
  EXPECT_TRUE(references(m, {"tmp", 1}).empty());
  auto rec = parse("h(N) -> h(N - 1), h(1, 2).");
  auto rr = references(rec, {"h", 1});
  ASSERT_EQ(rr.size(), 1u);
  EXPECT_EQ(pretty(resolve_expr(rec, rr[0])), "h(N - 1)");
}

TEST(FunctionPart, Examples) {
  auto m = parse("f() -> (fun() -> 2 end)(), f(1), (fun(X) -> X end)(2).");
  const auto& b = m.definitions()[0]->body;
  auto p = function_part(m, ref(m, b[0]->id));
  ASSERT_TRUE(p);
  EXPECT_EQ(p->node, b[0]->callee().id);
  EXPECT_FALSE(function_part(m, ref(m, b[1]->id)));
  EXPECT_TRUE(function_part(m, ref(m, b[2]->id)));
}

TEST(BoundAt, ThreadsThroughSequence) {
  auto m = parse("f(X) -> Y = X, begin Z = 1 end, fun(W) -> W end, Y + Z.");
  const auto& b = m.definitions()[0]->body;
  EXPECT_EQ(bound_at(m, ref(m, b[0]->id)), (std::set<std::string>{"X"}));
  EXPECT_EQ(bound_at(m, ref(m, b[3]->id)), (std::set<std::string>{"X", "Y", "Z"}));
  EXPECT_EQ(bound_at(m, ref(m, m.definitions()[0]->body_id)), (std::set<std::string>{"X"}));
}

TEST(Bindings, RepeatedPatternVariableIsReference) {
  auto m = parse("f(X) -> X = 1.");
  auto info = bindings(*m.definitions()[0]);
  const Expr& match = *m.definitions()[0]->body[0];
  const Occurrence* o = info.at(match.pattern->id);
  ASSERT_TRUE(o);
  EXPECT_FALSE(o->binding);
  EXPECT_EQ(o->binder, m.definitions()[0]->params[0]->id);
}

TEST(Bindings, EveryReferenceHasOneBinderOrIsUnbound) {
  test::RandomText gen(7);
  for (int i = 0; i < 300; ++i) {
    auto m = parse_one(gen.seq(4));
    auto info = bindings(*m.definitions()[0]);
    for (const auto& o : info.occurrences()) {
      if (o.binding) continue;
      if (o.binder == kNoNode) continue;
      const Occurrence* b = info.at(o.binder);
      ASSERT_TRUE(b);
      EXPECT_TRUE(b->binding);
      EXPECT_EQ(b->name, o.name);
    }
  }
}

// Generated expressions: free_vars, non_bind and vars agree with the
// classifier above.
TEST(Oracle, AgreesOnGeneratedExpressions) {
  test::RandomText gen(2026);
  for (int i = 0; i < 1000; ++i) {
    std::string target = gen.expr(4);
    std::string rest = gen.seq(3);
    SCOPED_TRACE(target + " ;; " + rest);
    auto m = parse_one(target + ", " + rest);
    const FunDef& f = *m.definitions()[0];
    const Expr& e = *f.body[0];

    Classifier c;
    Classifier::Env env{{"X", Origin::Outside}};
    c.walk(e, env, Origin::Target);
    EXPECT_EQ(free_vars(m, ref(m, e.id)), c.free());

    Classifier after;
    for (std::size_t k = 1; k < f.body.size(); ++k) after.walk(*f.body[k], env, Origin::Local);
    bool used_outside = std::any_of(after.refs.begin(), after.refs.end(), [](const auto& r) {
      return r.origin && *r.origin == Origin::Target;
    });
    EXPECT_EQ(non_bind(m, ref(m, e.id)), !used_outside);

    Classifier::Env standalone;
    Classifier s;
    s.walk(e, standalone, Origin::Target);
    EXPECT_EQ(free_vars(e, {}), s.free());
    EXPECT_EQ(non_bind(e, {}), standalone.empty());
  }
}

TEST(Oracle, VarsMatchesRecursiveCollection) {
  test::RandomText gen(11);
  for (int i = 0; i < 200; ++i) {
    std::string a = gen.var(), b = gen.var();
    if (a == b) b = "V";
    auto m = parse_one("{" + a + ", {" + b + "}} = 1");
    const Expr& e = *m.definitions()[0]->body[0];
    Names expected;
    std::function<void(const Pattern&)> rec = [&](const Pattern& p) {
      if (p.kind == Pattern::Kind::Var &&
          std::find(expected.begin(), expected.end(), p.name) == expected.end())
        expected.push_back(p.name);
      for (const auto& c : p.elements) rec(*c);
    };
    rec(*e.pattern);
    std::vector<PatternPtr> ps{e.pattern};
    EXPECT_EQ(vars(ps), expected);
  }
}

// Structural invariants of scope and top_expression over every node.
TEST(Oracle, ScopeAndTopExpression) {
  test::RandomText gen(99);
  for (int i = 0; i < 200; ++i) {
    auto m = parse_one(gen.seq(4));
    const FunDef& f = *m.definitions()[0];
    for (const auto& b : f.body)
      for_each_expr(*b, [&](const Expr& x) {
        auto s = scope(m, ref(m, x.id));
        EXPECT_EQ(m.at(s.node).kind, NodeInfo::Kind::Body);
        auto t = top_expression(m, ref(m, x.id));
        EXPECT_TRUE(is_within(m, x.id, t.node));
        EXPECT_EQ(m.at(t.node).parent, s.node);
      });
  }
}

TEST(Oracle, ReferencesByExhaustiveScan) {
  auto m = parse("a(X) -> a(X), b(a(1), a(1, 2)).\nb(X, Y) -> a(fun() -> a(Y) end).");
  std::vector<NodeId> scan;
  for (const auto& d : m.definitions())
    for (const auto& e : d->body)
      for_each_expr(*e, [&](const Expr& x) {
        if (x.kind == Expr::Kind::Call && x.name == "a" && x.children.size() == 1)
          scan.push_back(x.id);
      });
  std::vector<NodeId> got;
  for (auto r : references(m, {"a", 1})) got.push_back(r.node);
  EXPECT_EQ(got, scan);
  EXPECT_EQ(got.size(), 4u);
}

}  // namespace
}  // namespace mer::analysis
