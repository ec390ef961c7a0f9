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

#include <fmt/format.h>

#include "mer/equiv.hpp"
#include "mer/syntax.hpp"

namespace mer::equiv {

namespace {

const std::vector<std::string> kPool = {"X", "Y", "Z", "W", "V"};

std::int64_t uniform(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(v.size()) - 1))];
}

// Untyped expressions over the variables in scope.
class ExprGen {
 public:
  ExprGen(Rng& rng, IdAllocator& ids, const GenOptions& opts) : rng_(rng), ids_(ids), opts_(opts) {}

  ExprPtr gen(int depth, std::vector<std::string>& scope, bool in_fun) {
    if (depth <= 0 || chance(rng_, 0.2)) return leaf(scope);
    const bool effects = !opts_.pure || in_fun;
    switch (uniform(rng_, 0, 9)) {
      case 0:
      case 1: {
        static const BinaryOp ops[] = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul,
                                       BinaryOp::Div, BinaryOp::Eq,  BinaryOp::Lt};
        auto op = ops[uniform(rng_, 0, 5)];
        auto l = gen(depth - 1, scope, in_fun);
        auto r = gen(depth - 1, scope, in_fun);
        return make::binary(ids_, op, std::move(l), std::move(r));
      }
      case 2: {
        auto rhs = gen(depth - 1, scope, in_fun);
        auto p = pattern(scope);
        return make::match(ids_, std::move(p), std::move(rhs));
      }
      case 3: {
        std::vector<ExprPtr> body;
        const auto n = uniform(rng_, 1, 3);
        for (std::int64_t i = 0; i < n; ++i) body.push_back(gen(depth - 1, scope, in_fun));
        return make::block(ids_, std::move(body));
      }
      case 4: {
        std::vector<ExprPtr> elems;
        const auto n = uniform(rng_, 0, 3);
        for (std::int64_t i = 0; i < n; ++i) elems.push_back(gen(depth - 1, scope, in_fun));
        return make::tuple(ids_, std::move(elems));
      }
      case 5:
        if (opts_.print && effects) return make::print(ids_, gen(depth - 1, scope, in_fun));
        return leaf(scope);
      case 6: return lambda(depth - 1, scope, static_cast<std::size_t>(uniform(rng_, 0, 2)));
      case 7:
      case 8: {
        if (!effects) return leaf(scope);
        const auto arity = static_cast<std::size_t>(uniform(rng_, 0, 2));
        ExprPtr callee;
        if (!scope.empty() && chance(rng_, 0.3)) {
          callee = make::var(ids_, pick(rng_, scope));
        } else {
          callee = lambda(depth - 1, scope, chance(rng_, 0.9) ? arity : arity + 1);
        }
        std::vector<ExprPtr> args;
        for (std::size_t i = 0; i < arity; ++i) args.push_back(gen(depth - 1, scope, in_fun));
        return make::apply(ids_, std::move(callee), std::move(args));
      }
      default:
        if (opts_.calls) {
          std::vector<ExprPtr> args;
          args.push_back(gen(depth - 1, scope, in_fun));
          return make::call(ids_, "h", std::move(args));
        }
        return leaf(scope);
    }
  }

  ExprPtr leaf(const std::vector<std::string>& scope) {
    if (!scope.empty() && chance(rng_, 0.5)) return make::var(ids_, pick(rng_, scope));
    if (chance(rng_, 0.15)) return make::atom(ids_, chance(rng_, 0.5) ? "ok" : "true");
    return make::int_lit(ids_, uniform(rng_, -3, 5));
  }

 private:
  PatternPtr pattern(std::vector<std::string>& scope) {
    auto var = [&] {
      const auto& n = pick(rng_, kPool);
      if (std::find(scope.begin(), scope.end(), n) == scope.end()) scope.push_back(n);
      return make::pvar(ids_, n);
    };
    if (chance(rng_, 0.15)) return make::pint(ids_, uniform(rng_, 0, 3));
    if (chance(rng_, 0.15)) {
      std::vector<PatternPtr> elems;
      elems.push_back(var());
      elems.push_back(var());
      return make::ptuple(ids_, std::move(elems));
    }
    return var();
  }

  ExprPtr lambda(int depth, const std::vector<std::string>& scope, std::size_t arity) {
    std::vector<std::string> inner = scope;
    std::vector<PatternPtr> params;
    std::vector<std::string> used;
    for (std::size_t i = 0; i < arity; ++i) {
      std::string n;
      do n = pick(rng_, kPool);
      while (std::find(used.begin(), used.end(), n) != used.end());
      used.push_back(n);
      params.push_back(make::pvar(ids_, n));
      if (std::find(inner.begin(), inner.end(), n) == inner.end()) inner.push_back(n);
    }
    std::vector<ExprPtr> body;
    const auto n = uniform(rng_, 1, 2);
    for (std::int64_t i = 0; i < n; ++i) body.push_back(gen(depth, inner, true));
    return make::lambda(ids_, std::move(params), std::move(body));
  }

  Rng& rng_;
  IdAllocator& ids_;
  const GenOptions& opts_;
};

// Integer-valued function bodies for generated modules.
class ModuleGen {
 public:
  ModuleGen(Rng& rng, IdAllocator& ids, const std::vector<FunKey>& keys, std::size_t self)
      : rng_(rng), ids_(ids), keys_(keys), self_(self) {}

  FunDefPtr def() {
    std::vector<PatternPtr> params;
    Scope s;
    for (std::size_t i = 0; i < keys_[self_].arity; ++i) {
      std::string n = std::string(1, static_cast<char>('A' + i));
      params.push_back(make::pvar(ids_, n));
      s.ints.push_back(n);
    }
    auto body = sequence(s, 3, true);
    return make::fundef(ids_, keys_[self_].name, std::move(params), std::move(body));
  }

 private:
  struct Scope {
    std::vector<std::string> ints;
    std::vector<std::string> funs;  // zero-argument funs returning integers
  };

  std::string fresh(const char* stem) { return fmt::format("{}{}", stem, ++counter_); }

  // Total closed right-hand sides for a leading match.
  ExprPtr total_rhs(Scope& s, std::string& name) {
    if (chance(rng_, 0.5)) {
      name = fresh("K");
      s.ints.push_back(name);
      return make::int_lit(ids_, uniform(rng_, 0, 9));
    }
    name = fresh("F");
    std::vector<ExprPtr> body;
    body.push_back(make::int_lit(ids_, uniform(rng_, 0, 9)));
    auto e = make::lambda(ids_, {}, std::move(body));
    s.funs.push_back(name);
    return e;
  }

  std::vector<ExprPtr> sequence(Scope& s, int depth, bool top) {
    std::vector<ExprPtr> out;
    if (chance(rng_, top ? 0.6 : 0.4)) {
      std::string name;
      auto rhs = total_rhs(s, name);
      out.push_back(make::match(ids_, make::pvar(ids_, name), std::move(rhs)));
    }
    const auto extra = uniform(rng_, 0, top ? 2 : 1);
    for (std::int64_t i = 0; i < extra; ++i) out.push_back(statement(s, depth));
    out.push_back(int_expr(s, depth));
    return out;
  }

  ExprPtr statement(Scope& s, int depth) {
    switch (uniform(rng_, 0, 2)) {
      case 0: {
        auto rhs = int_expr(s, depth - 1);
        auto n = fresh("V");
        s.ints.push_back(n);
        return make::match(ids_, make::pvar(ids_, n), std::move(rhs));
      }
      case 1: {
        Scope inner = s;
        auto body = sequence(inner, depth - 1, false);
        auto n = fresh("G");
        s.funs.push_back(n);
        return make::match(ids_, make::pvar(ids_, n), make::lambda(ids_, {}, std::move(body)));
      }
      default: return make::print(ids_, int_expr(s, depth - 1));
    }
  }

  ExprPtr int_leaf(const Scope& s) {
    if (!s.ints.empty() && chance(rng_, 0.6)) return make::var(ids_, pick(rng_, s.ints));
    return make::int_lit(ids_, uniform(rng_, -3, 9));
  }

  ExprPtr int_expr(Scope& s, int depth) {
    if (depth <= 0 || chance(rng_, 0.25)) return int_leaf(s);
    switch (uniform(rng_, 0, 9)) {
      case 0:
      case 1:
      case 2: {
        static const BinaryOp ops[] = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Add,
                                       BinaryOp::Div};
        auto op = ops[uniform(rng_, 0, 4)];
        auto l = int_expr(s, depth - 1);
        auto r = int_expr(s, depth - 1);
        return make::binary(ids_, op, std::move(l), std::move(r));
      }
      case 3: return make::print(ids_, int_expr(s, depth - 1));
      case 4:
        if (!s.funs.empty()) return make::apply(ids_, make::var(ids_, pick(rng_, s.funs)), {});
        return int_leaf(s);
      case 5: {
        Scope inner = s;
        auto p = fresh("P");
        inner.ints.push_back(p);
        std::vector<PatternPtr> params;
        params.push_back(make::pvar(ids_, p));
        auto body = sequence(inner, depth - 1, false);
        std::vector<ExprPtr> args;
        args.push_back(int_expr(s, depth - 1));
        return make::apply(ids_, make::lambda(ids_, std::move(params), std::move(body)),
                           std::move(args));
      }
      case 6:
      case 7: {
        if (self_ + 1 >= keys_.size()) return int_leaf(s);
        const auto j = static_cast<std::size_t>(
            uniform(rng_, static_cast<std::int64_t>(self_) + 1, static_cast<std::int64_t>(keys_.size()) - 1));
        std::vector<ExprPtr> args;
        for (std::size_t i = 0; i < keys_[j].arity; ++i) args.push_back(int_expr(s, depth - 2));
        return make::call(ids_, keys_[j].name, std::move(args));
      }
      case 8: {
        Scope inner = s;
        std::vector<ExprPtr> body;
        body.push_back(statement(inner, depth - 1));
        body.push_back(int_expr(inner, depth - 1));
        return make::block(ids_, std::move(body));
      }
      default: {
        Scope inner = s;
        auto body = sequence(inner, depth - 1, false);
        return make::apply(ids_, make::lambda(ids_, {}, std::move(body)), {});
      }
    }
  }

  Rng& rng_;
  IdAllocator& ids_;
  const std::vector<FunKey>& keys_;
  std::size_t self_;
  int counter_ = 0;
};

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  // splitmix64 over the three words
  auto step = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  return step(step(step(a) ^ b) ^ c);
}

ExprPtr gen_expr(Rng& rng, int depth, const std::vector<std::string>& env_vars, IdAllocator& ids,
                 const GenOptions& opts) {
  ExprGen g(rng, ids, opts);
  std::vector<std::string> scope;
  if (!opts.closed) scope = env_vars;
  return g.gen(depth, scope, false);
}

ExprPtr gen_expr(std::uint64_t seed, int depth, const std::vector<std::string>& env_vars,
                 const GenOptions& opts) {
  Rng rng(seed);
  IdAllocator ids;
  return gen_expr(rng, depth, env_vars, ids, opts);
}

Value gen_value(Rng& rng) {
  const auto k = uniform(rng, 0, 9);
  if (k < 6) return Value::of_int(uniform(rng, -5, 5));
  if (k == 6) return Value::of_atom("ok");
  if (k == 7) return Value::of_tuple({Value::of_int(uniform(rng, 0, 3)), Value::of_int(uniform(rng, 0, 3))});
  // a small closure; some print when applied
  IdAllocator ids;
  std::vector<PatternPtr> params;
  std::vector<ExprPtr> body;
  const auto arity = uniform(rng, 0, 1);
  if (arity == 1) {
    params.push_back(make::pvar(ids, "A"));
    body.push_back(make::binary(ids, BinaryOp::Add, make::var(ids, "A"), make::int_lit(ids, 1)));
  } else if (chance(rng, 0.5)) {
    body.push_back(make::print(ids, make::int_lit(ids, uniform(rng, 0, 3))));
  } else {
    body.push_back(make::int_lit(ids, uniform(rng, 0, 3)));
  }
  auto lam = make::lambda(ids, std::move(params), std::move(body));
  return interp::eval_expr(*lam, {}, 100).value;
}

Env gen_env(Rng& rng, const std::vector<std::string>& names) {
  Env env;
  for (const auto& n : names) env[n] = gen_value(rng);
  return env;
}

std::vector<Value> gen_args(std::uint64_t seed, std::size_t arity, std::int64_t lo, std::int64_t hi) {
  Rng rng(seed);
  std::vector<Value> out;
  for (std::size_t i = 0; i < arity; ++i) out.push_back(Value::of_int(uniform(rng, lo, hi)));
  return out;
}

Module gen_module(std::uint64_t seed, std::size_t size) {
  Rng rng(seed);
  const auto n = static_cast<std::size_t>(uniform(rng, 1, static_cast<std::int64_t>(std::max<std::size_t>(size, 1))));
  std::vector<FunKey> keys;
  for (std::size_t i = 0; i < n; ++i)
    keys.push_back({fmt::format("f{}", i + 1), static_cast<std::size_t>(uniform(rng, 0, 2))});
  IdAllocator ids;
  std::vector<FunDefPtr> defs;
  for (std::size_t i = 0; i < n; ++i) defs.push_back(ModuleGen(rng, ids, keys, i).def());
  return Module::build(std::move(defs), ids.peek());
}

}  // namespace mer::equiv
