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

#include "mer/interp.hpp"

namespace mer::interp {

std::optional<std::vector<Value>> env_lookup(const Env& env, std::span<const std::string> names) {
  std::vector<Value> out;
  out.reserve(names.size());
  for (const auto& n : names) {
    auto it = env.find(n);
    if (it == env.end()) return std::nullopt;
    out.push_back(it->second);
  }
  return out;
}

Env env_remove(const Env& env, std::span<const std::string> names) {
  Env out = env;
  for (const auto& n : names) out.erase(n);
  return out;
}

std::optional<Env> env_concat(const Env& env, const Env& bindings) {
  Env out = env;
  for (const auto& [k, v] : bindings) {
    auto [it, inserted] = out.emplace(k, v);
    if (!inserted && !(it->second == v)) return std::nullopt;
  }
  return out;
}

namespace {

bool match_one(const Value& v, const Pattern& p, const Env& env, Env& out) {
  switch (p.kind) {
    case Pattern::Kind::Var: {
      if (auto it = env.find(p.name); it != env.end()) return it->second == v;
      if (auto it = out.find(p.name); it != out.end()) return it->second == v;
      out.emplace(p.name, v);
      return true;
    }
    case Pattern::Kind::Int: return v.kind == Value::Kind::Int && v.integer == p.value;
    case Pattern::Kind::Atom: return v.kind == Value::Kind::Atom && v.atom == p.name;
    case Pattern::Kind::Tuple:
      if (v.kind != Value::Kind::Tuple || v.elements.size() != p.elements.size()) return false;
      for (std::size_t i = 0; i < v.elements.size(); ++i)
        if (!match_one(v.elements[i], *p.elements[i], env, out)) return false;
      return true;
    case Pattern::Kind::Meta: return false;
  }
  return false;
}

}  // namespace

std::optional<Env> get_matching(std::span<const Value> values, std::span<const PatternPtr> patterns,
                                const Env& env) {
  if (values.size() != patterns.size()) return std::nullopt;
  Env out;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!match_one(values[i], *patterns[i], env, out)) return std::nullopt;
  return out;
}

bool is_matching(std::span<const Value> values, std::span<const PatternPtr> patterns,
                 const Env& env) {
  return get_matching(values, patterns, env).has_value();
}

Outcome restore_env(Outcome o, const Env& saved) {
  if (o.kind == Outcome::Kind::Ok) o.env_after = saved;
  return o;
}

}  // namespace mer::interp
