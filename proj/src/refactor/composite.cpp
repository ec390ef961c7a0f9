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

#include <fmt/format.h>

#include "mer/refactor.hpp"
#include "mer/syntax.hpp"

namespace mer::refactor {

Transaction::Transaction(Module original, std::string original_text) : text_(std::move(original_text)) {
  history_.push_back(std::move(original));
}

std::string describe(const Result& r) {
  if (r.ok()) return "applied";
  return fmt::format("step {} ({}) failed: {}", r.failed_step, r.failed_name, rewrite::describe(r.outcome));
}

namespace {

constexpr std::size_t kMaxIterations = 10000;

std::string render(const Module& m, NodeRef r) {
  const NodeInfo& info = analysis::resolve(m, r);
  switch (info.kind) {
    case NodeInfo::Kind::Expr: return pretty(*info.expr);
    case NodeInfo::Kind::Pattern: return pretty(*info.pattern);
    case NodeInfo::Kind::FunDef: return fmt::format("{}/{}", info.fundef->name, info.fundef->arity());
    case NodeInfo::Kind::Body: {
      const auto& seq = info.fundef ? info.fundef->body : info.lambda->children;
      return pretty_sequence(seq);
    }
  }
  return {};
}

struct Failure {
  StepOutcome outcome;
  std::string name;
};

// Step counting, failure injection, tracing and rollback shared by the
// interpreter and the hand-written composites.
class Runner {
 public:
  Runner(const Module& m, std::string_view text, const Options& opts)
      : tx_(m, std::string(text)), opts_(opts) {}

  const Module& current() const { return tx_.current(); }

  void begin(const std::string& name) {
    ++step_;
    if (opts_.inject_failure && opts_.inject_failure(step_, name))
      throw Failure{StepOutcome::violated("injected_failure", {}, fmt::format("failure injected at step {}", step_)),
                    name};
  }

  // Applies one attempt; Applied outcomes become the current snapshot.
  StepOutcome attempt(const std::function<StepOutcome(const Module&)>& f) {
    auto o = f(tx_.current());
    if (o.ok()) {
      tx_.push(o.snapshot);
      rebase();
    }
    return o;
  }

  void emit(const std::string& name, std::vector<std::string> args) {
    TraceEntry e{name, std::move(args), pretty(tx_.current())};
    if (opts_.trace) opts_.trace(e);
    trace_.push_back(std::move(e));
  }

  NodeRef prime(const std::string& name, std::vector<std::string> args,
                const std::function<StepOutcome(const Module&)>& f) {
    begin(name);
    auto o = attempt(f);
    if (!o.ok()) throw Failure{o, name};
    emit(name, std::move(args));
    return o.result;
  }

  // Repeats `f` on `target` until it is not applicable.
  void iterate(const std::string& name, NodeRef& target,
               const std::function<StepOutcome(const Module&, NodeRef)>& f) {
    begin("ITERATE " + name);
    for (std::size_t i = 0;; ++i) {
      if (i == kMaxIterations)
        throw Failure{StepOutcome::violated("iteration_bound", target), "ITERATE " + name};
      auto o = attempt([&](const Module& m) { return f(m, target); });
      if (o.kind == StepOutcome::Kind::NotApplicable) break;
      if (!o.ok()) throw Failure{o, "ITERATE " + name};
      target = o.result;
    }
    emit("ITERATE " + name, {});
  }

  // References held across steps; re-pinned after every snapshot.
  void track(NodeRef* r) { tracked_.push_back(r); }
  void untrack(NodeRef* r) { std::erase(tracked_, r); }

  Result finish() {
    Result out;
    out.module = tx_.current();
    out.outcome = StepOutcome::applied(out.module, last_result_);
    out.text = pretty(out.module);
    out.trace = std::move(trace_);
    return out;
  }

  Result fail(Failure f) {
    tx_.rollback();
    Result out;
    out.outcome = std::move(f.outcome);
    out.module = tx_.original();
    out.text = tx_.original_text();
    out.failed_step = step_;
    out.failed_name = std::move(f.name);
    out.trace = std::move(trace_);
    return out;
  }

  void set_result(NodeRef r) { last_result_ = r.node; }

 private:
  void rebase() {
    for (NodeRef* r : tracked_) {
      if (r->node == kNoNode) continue;
      auto again = analysis::rebase(*r, tx_.current());
      *r = again ? *again : NodeRef{};
    }
  }

  Transaction tx_;
  const Options& opts_;
  std::size_t step_ = 0;
  std::vector<TraceEntry> trace_;
  std::vector<NodeRef*> tracked_;
  NodeId last_result_ = kNoNode;
};

NodeRef live(NodeRef r, const std::string& what) {
  if (r.node == kNoNode)
    throw Failure{StepOutcome::not_applicable(fmt::format("{} no longer exists", what)), what};
  return r;
}

// Interpreter values.
struct Val {
  enum class Kind { Node, Name, Patterns };
  Kind kind = Kind::Name;
  NodeRef node;
  std::string name;
  std::vector<PatternPtr> patterns;

  static Val of(NodeRef r) { return {Kind::Node, r, {}, {}}; }
  static Val of(std::string n) { return {Kind::Name, {}, std::move(n), {}}; }
  static Val of(std::vector<PatternPtr> ps) { return {Kind::Patterns, {}, {}, std::move(ps)}; }
};

class Interpreter {
 public:
  Interpreter(Runner& r, const Registry& reg) : r_(r), reg_(reg) {}

  // Runs `p` with THIS = target; returns the result of its last prime step.
  NodeRef run(const CompositeProgram& p, NodeRef target, const std::vector<Val>& args) {
    if (args.size() != p.params.size())
      throw std::invalid_argument(fmt::format("{} takes {} arguments", p.name, p.params.size()));
    Frame f;
    f.locals.emplace("THIS", Val::of(target));
    for (std::size_t i = 0; i < args.size(); ++i) f.locals.emplace(p.params[i], args[i]);
    for (auto& [_, v] : f.locals)
      if (v.kind == Val::Kind::Node) r_.track(&v.node);
    frames_.push_back(&f);
    struct Pop {
      Interpreter& self;
      Frame& f;
      ~Pop() {
        for (auto& [_, v] : f.locals) self.r_.untrack(&v.node);
        self.frames_.pop_back();
      }
    } pop{*this, f};

    for (const auto& st : p.steps) {
      switch (st.kind) {
        case Statement::Kind::Iterate: iterate(st.term); break;
        case Statement::Kind::Assign: assign(st.local, eval(st.term)); break;
        case Statement::Kind::Do: {
          Val v = eval(st.term);
          const Term& recv = st.term.kind == Term::Kind::Call ? st.term.args.front() : st.term;
          if (recv.kind == Term::Kind::Local && recv.name == "THIS" && v.kind == Val::Kind::Node)
            assign("THIS", v);
          break;
        }
      }
    }
    return f.last;
  }

 private:
  struct Frame {
    std::map<std::string, Val> locals;
    NodeRef last;
  };

  void assign(const std::string& local, Val v) {
    Frame& f = *frames_.back();
    auto it = f.locals.find(local);
    if (it != f.locals.end()) {
      r_.untrack(&it->second.node);
      f.locals.erase(it);
    }
    auto& slot = f.locals.emplace(local, std::move(v)).first->second;
    r_.track(&slot.node);
  }

  NodeRef node(const Val& v, const std::string& what) {
    if (v.kind != Val::Kind::Node) throw std::invalid_argument(what + " expects a program element");
    return live(v.node, what);
  }

  std::string name(const Val& v, const std::string& what) {
    if (v.kind == Val::Kind::Name) return v.name;
    throw std::invalid_argument(what + " expects a name");
  }

  std::string show(const Val& v) {
    switch (v.kind) {
      case Val::Kind::Node: return render(r_.current(), live(v.node, "argument"));
      case Val::Kind::Name: return v.name;
      case Val::Kind::Patterns: return pretty_patterns(v.patterns);
    }
    return {};
  }

  Val eval(const Term& t) {
    switch (t.kind) {
      case Term::Kind::Local: {
        Frame& f = *frames_.back();
        auto it = f.locals.find(t.name);
        if (it == f.locals.end()) throw std::invalid_argument("unassigned local " + t.name);
        return it->second;
      }
      case Term::Kind::Literal: return Val::of(t.name);
      case Term::Kind::Call: break;
    }
    std::vector<Val> args;
    for (const auto& a : t.args) args.push_back(eval(a));
    return call(t, args);
  }

  Val call(const Term& t, const std::vector<Val>& a) {
    const Module& m = r_.current();
    const std::string& f = t.name;
    auto want = [&](std::size_t n) {
      if (a.size() != n)
        throw std::invalid_argument(fmt::format("{} takes {} arguments", f, n - 1));
    };
    auto select = [&](auto&& g) -> Val {
      try {
        return g();
      } catch (const UnknownNode& e) {
        throw Failure{StepOutcome::not_applicable(e.what()), f};
      }
    };
    // Selectors.
    if (f == "function_part") {
      want(1);
      auto p = analysis::function_part(m, node(a[0], f));
      if (!p) throw Failure{StepOutcome::not_applicable("target is not an applied fun"), f};
      return Val::of(*p);
    }
    if (f == "function") return want(1), select([&] { return Val::of(analysis::function(m, node(a[0], f))); });
    if (f == "body") return want(1), select([&] { return Val::of(analysis::body(m, node(a[0], f))); });
    if (f == "scope") return want(1), select([&] { return Val::of(analysis::scope(m, node(a[0], f))); });
    if (f == "top_expression")
      return want(1), select([&] { return Val::of(analysis::top_expression(m, node(a[0], f))); });
    if (f == "name") return want(1), select([&] { return Val::of(analysis::name(m, node(a[0], f))); });
    if (f == "function_params")
      return want(1), select([&] { return Val::of(analysis::function_params(m, node(a[0], f))); });

    // Composites.
    if (auto c = reg_.composites.find(f); c != reg_.composites.end()) {
      NodeRef target = node(a[0], f);
      NodeRef res = run(c->second, target, {a.begin() + 1, a.end()});
      record(res);
      return Val::of(res);
    }

    // Primes.
    std::vector<std::string> shown;
    auto step = make_step(t, a, shown);
    NodeRef recv = node(a[0], f);
    NodeRef res = r_.prime(f, shown, [&](const Module& x) { return step(x, recv); });
    record(res);
    return Val::of(res);
  }

  using Step = std::function<StepOutcome(const Module&, NodeRef)>;

  Step make_step(const Term& t, const std::vector<Val>& a, std::vector<std::string>& shown) {
    const std::string& f = t.name;
    auto want = [&](std::size_t n) {
      if (a.size() != n)
        throw std::invalid_argument(fmt::format("{} takes {} arguments", f, n - 1));
    };
    for (std::size_t i = 1; i < a.size(); ++i) shown.push_back(show(a[i]));
    if (f == "wrap") {
      want(1);
      return [](const Module& x, NodeRef at) { return wrap(x, at); };
    }
    if (f == "outer_variable") {
      want(1);
      return [](const Module& x, NodeRef at) { return outer_variable(x, at); };
    }
    if (f == "extract_to_variable") {
      want(2);
      auto n = name(a[1], f);
      return [=](const Module& x, NodeRef at) { return extract_to_variable(x, at, n); };
    }
    if (f == "extract_to_function") {
      want(3);
      // A literal function name is a stem for a fresh one.
      std::string n = name(a[1], f);
      if (t.args[1].kind == Term::Kind::Literal) n = fresh_function_name(r_.current(), n);
      shown[0] = n;
      if (a[2].kind != Val::Kind::Patterns) throw std::invalid_argument(f + " expects parameters");
      auto ps = a[2].patterns;
      return [=](const Module& x, NodeRef at) { return extract_to_function(x, at, n, ps); };
    }
    if (f == "var_to_param") {
      want(2);
      NodeRef match = node(a[1], f);
      return [=](const Module& x, NodeRef at) { return var_to_param(x, at, match); };
    }
    if (f == "rename_function") {
      want(2);
      auto n = name(a[1], f);
      return [=](const Module& x, NodeRef at) { return rename_function(x, at, n); };
    }
    throw std::invalid_argument(fmt::format("unknown refactoring function `{}`", f));
  }

  void iterate(const Term& t) {
    if (reg_.composites.count(t.name)) throw std::invalid_argument("ITERATE applies to prime steps only");
    std::vector<Val> a;
    for (const auto& x : t.args) a.push_back(eval(x));
    std::vector<std::string> shown;
    auto step = make_step(t, a, shown);
    NodeRef target = node(a[0], t.name);
    r_.iterate(t.name, target, step);
    record(target);
    const Term& recv = t.args.front();
    if (recv.kind == Term::Kind::Local) assign(recv.name, Val::of(target));
  }

  void record(NodeRef res) {
    frames_.back()->last = res;
    r_.set_result(res);
  }

  Runner& r_;
  const Registry& reg_;
  std::vector<Frame*> frames_;
};

}  // namespace

Result run_composite(const CompositeProgram& p, const Module& m, std::string_view original_text,
                     NodeRef target, const std::vector<std::string>& args, const Registry& registry,
                     const Options& opts) {
  Runner r(m, original_text, opts);
  Interpreter in(r, registry);
  std::vector<Val> vals;
  for (const auto& a : args) vals.push_back(Val::of(a));
  try {
    in.run(p, target, vals);
  } catch (Failure& f) {
    return r.fail(std::move(f));
  }
  return r.finish();
}

namespace {

NodeRef lift_to_parameter(Runner& r, NodeRef var) {
  r.track(&var);
  r.iterate("outer_variable", var, [](const Module& m, NodeRef at) { return outer_variable(m, at); });
  NodeRef fn = analysis::function(r.current(), live(var, "the binding"));
  NodeRef out = r.prime("var_to_param", {render(r.current(), var)},
                        [&](const Module& m) { return var_to_param(m, fn, var); });
  r.untrack(&var);
  r.set_result(out);
  return out;
}

}  // namespace

Result to_function_parameter(const Module& m, std::string_view original_text, NodeRef match,
                             const Options& opts) {
  Runner r(m, original_text, opts);
  try {
    lift_to_parameter(r, match);
  } catch (Failure& f) {
    return r.fail(std::move(f));
  }
  return r.finish();
}

Result generalise_function(const Module& m, std::string_view original_text, NodeRef target,
                           const std::string& param_name, const Options& opts) {
  Runner r(m, original_text, opts);
  NodeRef self = target, old_fn, fresh_fn;
  r.track(&self);
  r.track(&old_fn);
  r.track(&fresh_fn);
  try {
    self = r.prime("wrap", {}, [&](const Module& x) { return wrap(x, self); });
    auto part = analysis::function_part(r.current(), self);
    if (!part) throw Failure{StepOutcome::not_applicable("target is not an applied fun"), "function_part"};
    self = *part;
    old_fn = analysis::function(r.current(), self);
    std::string name = analysis::name(r.current(), old_fn);
    auto params = analysis::function_params(r.current(), old_fn);
    std::string tmp = fresh_function_name(r.current(), "tmp");
    NodeRef body = analysis::body(r.current(), old_fn);
    fresh_fn = r.prime("extract_to_function", {tmp, pretty_patterns(params)},
                       [&](const Module& x) { return extract_to_function(x, body, tmp, params); });
    NodeRef var = r.prime("extract_to_variable", {param_name}, [&](const Module& x) {
      return extract_to_variable(x, live(self, "the target"), param_name);
    });
    lift_to_parameter(r, var);
    NodeRef out = r.prime("rename_function", {name}, [&](const Module& x) {
      return rename_function(x, live(fresh_fn, "the extracted function"), name);
    });
    r.set_result(out);
  } catch (Failure& f) {
    return r.fail(std::move(f));
  }
  return r.finish();
}

}  // namespace mer::refactor
