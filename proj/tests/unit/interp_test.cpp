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

#include <gtest/gtest.h>

#include "mer/analysis.hpp"
#include "mer/interp.hpp"
#include "random_text.hpp"
#include "test_util.hpp"

namespace mer::interp {
namespace {

using test::kBefore;
using test::kAfter;

Value I(std::int64_t v) { return Value::of_int(v); }

Outcome run(const std::string& text, const Env& env = {}, std::uint64_t fuel = 100000) {
  static IdAllocator ids(1);
  auto seq = parse_expression_list(text, ids);
  if (seq.size() == 1) return eval_expr(*seq[0], env, fuel);
  return eval_sequence(seq, env, fuel);
}

TEST(Eval, Examples) {
  EXPECT_EQ(run("begin 3 * 2 end"), Outcome::ok(I(6), {}, {}));
  EXPECT_EQ(run("(fun(X) -> X end)(print(1))"), Outcome::ok(I(1), {}, {I(1)}));
  EXPECT_EQ(run("(fun(1) -> 2 end)(3)"), Outcome::raised(ExnKind::Badmatch, {}));
}

TEST(Eval, ModuleEntries) {
  auto l1 = parse(kBefore);
  auto l2 = parse(kAfter);
  std::vector<Value> three{I(3)};
  EXPECT_EQ(eval_call(l1, {"f", 1}, three, 1000), Outcome::ok(I(6), {}, {}));
  EXPECT_EQ(eval_call(l2, {"f", 1}, three, 1000), Outcome::ok(I(6), {}, {}));
  EXPECT_EQ(eval_call(l1, {"g", 1}, three, 1000), Outcome::ok(I(8), {}, {}));
  std::vector<Value> zero{I(0)};
  EXPECT_EQ(eval_call(l1, {"h", 1}, zero, 1000).exn, ExnKind::Undef);
  EXPECT_EQ(eval_call(l1, {"h", 1}, zero, 1000).kind, Outcome::Kind::Exn);
}

TEST(Eval, MatchBindsAndReturnsRhs) {
  auto o = run("{A, B} = {1, 2}");
  EXPECT_EQ(o.value, Value::of_tuple({I(1), I(2)}));
  EXPECT_EQ(o.env_after, (Env{{"A", I(1)}, {"B", I(2)}}));
  EXPECT_EQ(run("X = 2", {{"X", I(2)}}).kind, Outcome::Kind::Ok);
  EXPECT_EQ(run("X = 3", {{"X", I(2)}}).exn, ExnKind::Badmatch);
}

TEST(Eval, BlockLeaksCallRestores) {
  EXPECT_EQ(run("begin Y = 1 end, Y").env_after, (Env{{"Y", I(1)}}));
  EXPECT_EQ(run("(fun() -> Y = 1 end)()").env_after, Env{});
  // Bindings made while evaluating arguments belong to the caller.
  EXPECT_EQ(run("(fun(A) -> A end)(Y = 4)").env_after, (Env{{"Y", I(4)}}));
}

TEST(Eval, ClosuresCaptureCreationEnv) {
  auto o = run("begin Y = 5, F = fun(X) -> X + Y end, F(1) end");
  EXPECT_EQ(o.value, I(6));
  const Value& f = o.env_after.at("F");
  ASSERT_EQ(f.kind, Value::Kind::Closure);
  EXPECT_EQ(f.closure->captured, (Env{{"Y", I(5)}}));
  auto shadow = run("begin X = 7, F = fun(X) -> X end, F(1) end");
  EXPECT_EQ(shadow.value, I(1));
  EXPECT_FALSE(shadow.env_after.at("F").closure->captured.count("X"));
}

TEST(Eval, ExceptionKinds) {
  EXPECT_EQ(run("1 div 0").exn, ExnKind::Badarith);
  EXPECT_EQ(run("ok + 1").exn, ExnKind::Badarith);
  EXPECT_EQ(run("9223372036854775807 + 1").exn, ExnKind::Badarith);
  EXPECT_EQ(run("F = 1, F()").exn, ExnKind::Badfun);
  EXPECT_EQ(run("(fun(X) -> X end)()").exn, ExnKind::Badarity);
  EXPECT_EQ(run("Z").exn, ExnKind::Unbound);
  EXPECT_EQ(run("f(1)").exn, ExnKind::Undef);
}

TEST(Eval, ComparisonAndDivision) {
  EXPECT_EQ(run("{1, ok} == {1, ok}").value, Value::of_atom("true"));
  EXPECT_EQ(run("1 < 2").value, Value::of_atom("true"));
  EXPECT_EQ(run("-7 div 2").value, I(-3));
}

TEST(Eval, ExnTraceIsPrefixAtRaise) {
  auto o = run("print(1), print(2), 1 div 0, print(3)");
  EXPECT_EQ(o.kind, Outcome::Kind::Exn);
  EXPECT_EQ(o.trace, (Trace{I(1), I(2)}));
}

TEST(Eval, TimeoutIsNotAnException) {
  auto m = parse("loop(N) -> print(N), loop(N + 1).");
  std::vector<Value> zero{I(0)};
  auto o = eval_call(m, {"loop", 1}, zero, 50);
  EXPECT_EQ(o.kind, Outcome::Kind::Timeout);
  EXPECT_FALSE(o.trace.empty());
}

TEST(Eval, DeepRecursionStopsAtDepthBudget) {
  auto m = parse("r(N) -> 1 + r(N + 1).");
  std::vector<Value> zero{I(0)};
  EXPECT_EQ(eval_call(m, {"r", 1}, zero, 100000000).kind, Outcome::Kind::Timeout);
  std::string nested = "0";
  for (int i = 0; i < 1000; ++i) nested = "1 + (" + nested + ")";
  EXPECT_EQ(run(nested), Outcome::ok(I(1000), {}, {}));
}

TEST(EnvAlgebra, Examples) {
  Env e{{"X", I(1)}, {"Y", I(2)}};
  std::vector<std::string> x{"X"};
  EXPECT_EQ(env_remove(e, x), (Env{{"Y", I(2)}}));
  auto removed = env_remove(e, x);
  IdAllocator ids(1);
  auto ps = parse_pattern_list("X", ids);
  auto restored = env_concat(removed, *get_matching(*env_lookup(e, x), ps, removed));
  EXPECT_EQ(*restored, e);
  std::vector<Value> three{I(3)};
  EXPECT_FALSE(is_matching(three, ps, {{"X", I(4)}}));
  EXPECT_TRUE(is_matching(three, ps, {{"X", I(3)}}));
}

TEST(EnvAlgebra, LookupPreservesOrderAndLength) {
  Env e{{"A", I(1)}, {"B", I(2)}};
  std::vector<std::string> names{"B", "A", "B"};
  auto vs = env_lookup(e, names);
  ASSERT_TRUE(vs);
  EXPECT_EQ(*vs, (std::vector<Value>{I(2), I(1), I(2)}));
  std::vector<std::string> missing{"C"};
  EXPECT_FALSE(env_lookup(e, missing));
}

TEST(EnvAlgebra, ConcatConflict) {
  EXPECT_FALSE(env_concat({{"X", I(1)}}, {{"X", I(2)}}));
  EXPECT_TRUE(env_concat({{"X", I(1)}}, {{"X", I(1)}}));
}

// removing any subset of names and restoring them from the original
// values yields the original environment; all envs over up to three names
// with values in {1, 2}.
TEST(EnvAlgebra, RemoveThenRestoreExhaustive) {
  const std::vector<std::string> pool{"A", "B", "C"};
  IdAllocator ids(1);
  int cases = 0;
  for (int mask = 0; mask < 8; ++mask) {
    std::vector<std::string> names;
    for (int i = 0; i < 3; ++i)
      if (mask & (1 << i)) names.push_back(pool[i]);
    int combos = 1 << names.size();
    for (int vals = 0; vals < combos; ++vals) {
      Env e;
      for (std::size_t i = 0; i < names.size(); ++i) e[names[i]] = I(((vals >> i) & 1) + 1);
      for (int sub = 0; sub < combos; ++sub) {
        std::vector<std::string> vs;
        std::vector<PatternPtr> ps;
        for (std::size_t i = 0; i < names.size(); ++i)
          if (sub & (1 << i)) {
            vs.push_back(names[i]);
            ps.push_back(make::pvar(ids, names[i]));
          }
        Env removed = env_remove(e, vs);
        auto bound = get_matching(*env_lookup(e, vs), ps, removed);
        ASSERT_TRUE(bound);
        EXPECT_EQ(*env_concat(removed, *bound), e);
        ++cases;
      }
    }
  }
  EXPECT_EQ(cases, 1 + 3 * 4 + 3 * 16 + 64);
}

TEST(Properties, DeterminismAndFuelMonotonicity) {
  test::RandomText gen(5);
  Env env{{"X", I(1)}, {"Y", I(2)}, {"Z", I(3)}, {"W", I(4)}};
  int ok = 0;
  for (int i = 0; i < 300; ++i) {
    std::string text = gen.seq(4);
    IdAllocator ids(1);
    auto seq = parse_expression_list(text, ids);
    auto a = eval_sequence(seq, env, 100000);
    EXPECT_EQ(a, eval_sequence(seq, env, 100000)) << text;
    if (a.kind == Outcome::Kind::Timeout) continue;
    // Find the least sufficient fuel; every larger budget agrees.
    std::uint64_t lo = 1;
    while (eval_sequence(seq, env, lo).kind == Outcome::Kind::Timeout) ++lo;
    for (std::uint64_t k : {lo, lo + 1, lo * 2, lo + 1000})
      EXPECT_EQ(eval_sequence(seq, env, k), a) << text;
    EXPECT_EQ(eval_sequence(seq, env, lo - 1).kind, Outcome::Kind::Timeout);
    ok += a.kind == Outcome::Kind::Ok;
  }
  EXPECT_GT(ok, 50);
}

}  // namespace
}  // namespace mer::interp
