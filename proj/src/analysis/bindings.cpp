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

#include "mer/analysis.hpp"

namespace mer::analysis {

const Occurrence* BindingInfo::at(NodeId node) const {
  auto it = by_node_.find(node);
  return it == by_node_.end() ? nullptr : &occurrences_[it->second];
}

std::vector<const Occurrence*> BindingInfo::references_to(NodeId binder) const {
  std::vector<const Occurrence*> out;
  for (const auto& o : occurrences_)
    if (!o.binding && o.binder == binder) out.push_back(&o);
  return out;
}

std::optional<std::set<std::string>> BindingInfo::bound_before(NodeId node) const {
  auto it = probes_.find(node);
  if (it == probes_.end()) return std::nullopt;
  return it->second;
}

class BindingWalker {
 public:
  using Scope = std::map<std::string, NodeId>;

  BindingWalker(BindingInfo& info, std::optional<NodeId> probe) : info_(info), probe_(probe) {}

  void fundef(const FunDef& d) {
    Scope scope;
    head(d.params, scope, d.body_id);
    sequence(d.body, scope, d.body_id);
  }

  void standalone(const Expr& e, const std::set<std::string>& context) {
    Scope scope;
    for (const auto& n : context) scope[n] = kContextBinder;
    expr(e, scope, kNoNode);
  }

 private:
  void record(NodeId node, const std::string& name, bool binding, NodeId binder, NodeId scope) {
    info_.by_node_[node] = info_.occurrences_.size();
    info_.occurrences_.push_back({node, name, binding, binder, scope});
  }

  void maybe_probe(NodeId id, const Scope& scope) {
    if (probe_ && *probe_ == id) {
      std::set<std::string> names;
      for (const auto& [n, _] : scope) names.insert(n);
      info_.probes_[id] = std::move(names);
    }
  }

  // Clause heads shadow outer bindings; a name repeated across parameters is
  // an equality test against the earlier parameter.
  void head(const std::vector<PatternPtr>& params, Scope& scope, NodeId body_scope) {
    std::set<std::string> seen;
    for (const auto& p : params)
      for_each_pattern_var(*p, [&](const Pattern& v) {
        if (seen.count(v.name)) {
          record(v.id, v.name, false, scope[v.name], body_scope);
        } else {
          seen.insert(v.name);
          record(v.id, v.name, true, kNoNode, body_scope);
          scope[v.name] = v.id;
        }
      });
  }

  void sequence(const std::vector<ExprPtr>& seq, Scope& scope, NodeId scope_id) {
    maybe_probe(scope_id, scope);
    for (const auto& e : seq) expr(*e, scope, scope_id);
  }

  void pattern(const Pattern& p, Scope& scope, NodeId scope_id) {
    for_each_pattern_var(p, [&](const Pattern& v) {
      auto it = scope.find(v.name);
      if (it != scope.end()) {
        record(v.id, v.name, false, it->second, scope_id);
      } else {
        record(v.id, v.name, true, kNoNode, scope_id);
        scope[v.name] = v.id;
      }
    });
  }

  void expr(const Expr& e, Scope& scope, NodeId scope_id) {
    maybe_probe(e.id, scope);
    switch (e.kind) {
      case Expr::Kind::Var: {
        auto it = scope.find(e.name);
        record(e.id, e.name, false, it == scope.end() ? kNoNode : it->second, scope_id);
        return;
      }
      case Expr::Kind::Match:
        expr(*e.children[0], scope, scope_id);
        pattern(*e.pattern, scope, scope_id);
        return;
      case Expr::Kind::Lambda: {
        Scope inner = scope;
        head(e.params, inner, e.body_id);
        sequence(e.children, inner, e.body_id);
        return;
      }
      default:
        for (const auto& c : e.children) expr(*c, scope, scope_id);
    }
  }

  BindingInfo& info_;
  std::optional<NodeId> probe_;
};

BindingInfo bindings(const FunDef& d, std::optional<NodeId> probe) {
  BindingInfo info;
  BindingWalker(info, probe).fundef(d);
  return info;
}

BindingInfo bindings(const Expr& e, const std::set<std::string>& context) {
  BindingInfo info;
  BindingWalker(info, std::nullopt).standalone(e, context);
  return info;
}

}  // namespace mer::analysis
