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

#include <limits>
#include <stdexcept>

#include "mer/interp.hpp"

namespace mer::interp {

namespace {

struct Raise {
  ExnKind kind;
};
struct OutOfFuel {};

std::vector<std::string> param_names(std::span<const PatternPtr> ps) {
  std::vector<std::string> out;
  for (const auto& p : ps) for_each_pattern_var(*p, [&](const Pattern& v) { out.push_back(v.name); });
  return out;
}

class Evaluator {
 public:
  Evaluator(const Module* m, std::uint64_t fuel) : module_(m), fuel_(fuel) {
    char probe = 0;
    stack_base_ = reinterpret_cast<std::uintptr_t>(&probe);
  }

  Trace trace;

  Value sequence(std::span<const ExprPtr> seq, Env& env) {
    Value last;
    for (const auto& e : seq) last = expr(*e, env);
    return last;
  }

  Value expr(const Expr& e, Env& env) {
    if (fuel_ == 0) throw OutOfFuel{};
    --fuel_;
    char probe = 0;
    auto here = reinterpret_cast<std::uintptr_t>(&probe);
    if (stack_base_ - here > kMaxStackBytes) throw OutOfFuel{};
    return step(e, env);
  }

  Value call_function(const FunDef& d, std::span<const Value> args) {
    auto bound = get_matching(args, d.params, Env{});
    if (!bound) throw Raise{ExnKind::Badmatch};
    Env body_env = std::move(*bound);
    return sequence(d.body, body_env);
  }

  const FunDef* lookup(const std::string& name, std::size_t arity) const {
    if (!module_) return nullptr;
    auto idx = module_->index_of(FunKey{name, arity});
    if (!idx) return nullptr;
    return module_->definitions()[*idx].get();
  }

 private:
  std::vector<Value> values(std::span<const ExprPtr> es, Env& env) {
    std::vector<Value> out;
    out.reserve(es.size());
    for (const auto& e : es) out.push_back(expr(*e, env));
    return out;
  }

  static std::int64_t as_int(const Value& v) {
    if (v.kind != Value::Kind::Int) throw Raise{ExnKind::Badarith};
    return v.integer;
  }

  static Value arith(BinaryOp op, const Value& l, const Value& r) {
    if (op == BinaryOp::Eq) return Value::of_bool(l == r);
    std::int64_t a = as_int(l), b = as_int(r), out = 0;
    bool overflow = false;
    switch (op) {
      case BinaryOp::Add: overflow = __builtin_add_overflow(a, b, &out); break;
      case BinaryOp::Sub: overflow = __builtin_sub_overflow(a, b, &out); break;
      case BinaryOp::Mul: overflow = __builtin_mul_overflow(a, b, &out); break;
      case BinaryOp::Div:
        if (b == 0 || (a == std::numeric_limits<std::int64_t>::min() && b == -1))
          throw Raise{ExnKind::Badarith};
        out = a / b;
        break;
      case BinaryOp::Lt: return Value::of_bool(a < b);
      case BinaryOp::Eq: break;
    }
    if (overflow) throw Raise{ExnKind::Badarith};
    return Value::of_int(out);
  }

  // Applies a closure; the caller's environment is left as it was.
  Value apply(const Value& f, std::span<const Value> args) {
    if (f.kind != Value::Kind::Closure) throw Raise{ExnKind::Badfun};
    const Closure& c = *f.closure;
    if (c.params.size() != args.size()) throw Raise{ExnKind::Badarity};
    auto bound = get_matching(args, c.params, c.captured);
    if (!bound) throw Raise{ExnKind::Badmatch};
    auto env = env_concat(c.captured, *bound);
    if (!env) throw Raise{ExnKind::Badmatch};
    return sequence(c.body, *env);
  }

  Value step(const Expr& e, Env& env) {
    switch (e.kind) {
      case Expr::Kind::Int: return Value::of_int(e.value);
      case Expr::Kind::Atom: return Value::of_atom(e.name);
      case Expr::Kind::Var: {
        auto found = env_lookup(env, std::span<const std::string>(&e.name, 1));
        if (!found) throw Raise{ExnKind::Unbound};
        return std::move((*found)[0]);
      }
      case Expr::Kind::Binary: {
        Value l = expr(*e.children[0], env);
        Value r = expr(*e.children[1], env);
        return arith(e.op, l, r);
      }
      case Expr::Kind::Match: {
        Value v = expr(*e.children[0], env);
        auto bound = get_matching(std::span<const Value>(&v, 1), std::span(&e.pattern, 1), env);
        if (!bound) throw Raise{ExnKind::Badmatch};
        env = *env_concat(env, *bound);
        return v;
      }
      case Expr::Kind::Block: return sequence(e.children, env);
      case Expr::Kind::Lambda: {
        auto c = std::make_shared<Closure>();
        c->params = e.params;
        c->body = e.children;
        c->captured = env_remove(env, param_names(e.params));
        Value v;
        v.kind = Value::Kind::Closure;
        v.closure = std::move(c);
        return v;
      }
      case Expr::Kind::Call: {
        auto args = values(e.children, env);
        const FunDef* d = lookup(e.name, args.size());
        if (!d) throw Raise{ExnKind::Undef};
        return call_function(*d, args);
      }
      case Expr::Kind::Apply: {
        Value f = expr(e.callee(), env);
        auto args = values(e.args(), env);
        return apply(f, args);
      }
      case Expr::Kind::Print: {
        Value v = expr(*e.children[0], env);
        trace.push_back(v);
        return v;
      }
      case Expr::Kind::Tuple: return Value::of_tuple(values(e.children, env));
      case Expr::Kind::Meta: throw std::logic_error("cannot evaluate a metavariable");
    }
    throw std::logic_error("unknown expression kind");
  }

  const Module* module_;
  std::uint64_t fuel_;
  std::uintptr_t stack_base_ = 0;
};

template <class F>
Outcome run(Evaluator& ev, F&& body) {
  try {
    return body();
  } catch (const Raise& r) {
    return Outcome::raised(r.kind, std::move(ev.trace));
  } catch (const OutOfFuel&) {
    return Outcome::timeout(std::move(ev.trace));
  }
}

}  // namespace

Outcome eval_expr(const Expr& e, const Env& env, std::uint64_t fuel, const Module* m) {
  Evaluator ev(m, fuel);
  return run(ev, [&] {
    Env local = env;
    Value v = ev.expr(e, local);
    return Outcome::ok(std::move(v), std::move(local), std::move(ev.trace));
  });
}

Outcome eval_sequence(std::span<const ExprPtr> seq, const Env& env, std::uint64_t fuel,
                      const Module* m) {
  Evaluator ev(m, fuel);
  return run(ev, [&] {
    Env local = env;
    Value v = ev.sequence(seq, local);
    return Outcome::ok(std::move(v), std::move(local), std::move(ev.trace));
  });
}

Outcome eval_call(const Module& m, const FunKey& k, std::span<const Value> args,
                  std::uint64_t fuel) {
  Evaluator ev(&m, fuel);
  return run(ev, [&] {
    const FunDef* d = ev.lookup(k.name, k.arity);
    if (!d) throw Raise{ExnKind::Undef};
    if (args.size() != k.arity) throw Raise{ExnKind::Badarity};
    Value v = ev.call_function(*d, args);
    return Outcome::ok(std::move(v), Env{}, std::move(ev.trace));
  });
}

}  // namespace mer::interp
