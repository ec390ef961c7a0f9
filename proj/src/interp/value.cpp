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

#include "mer/interp.hpp"
#include "mer/syntax.hpp"

namespace mer::interp {

Value Value::of_int(std::int64_t v) {
  Value out;
  out.kind = Kind::Int;
  out.integer = v;
  return out;
}

Value Value::of_atom(std::string name) {
  Value out;
  out.kind = Kind::Atom;
  out.atom = std::move(name);
  return out;
}

Value Value::of_tuple(std::vector<Value> elems) {
  Value out;
  out.kind = Kind::Tuple;
  out.elements = std::move(elems);
  return out;
}

// Closures compare structurally: same parameter patterns and body shape, and
// equal captured environments.
bool Value::operator==(const Value& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::Int: return integer == o.integer;
    case Kind::Atom: return atom == o.atom;
    case Kind::Tuple: return elements == o.elements;
    case Kind::Closure:
      if (closure == o.closure) return true;
      return same_shape(closure->params, o.closure->params) &&
             same_shape(closure->body, o.closure->body) && closure->captured == o.closure->captured;
  }
  return false;
}

std::string to_string(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Int: return std::to_string(v.integer);
    case Value::Kind::Atom: return v.atom;
    case Value::Kind::Tuple: return "{" + to_string(std::span<const Value>(v.elements)) + "}";
    case Value::Kind::Closure: {
      std::string out = fmt::format("fun({}) -> {} end", pretty_patterns(v.closure->params),
                                    pretty_sequence(v.closure->body));
      if (!v.closure->captured.empty()) out += to_string(v.closure->captured);
      return out;
    }
  }
  return {};
}

std::string to_string(std::span<const Value> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += to_string(values[i]);
  }
  return out;
}

std::string to_string(const Env& env) {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : env) {
    if (!first) out += ", ";
    first = false;
    out += k + "=" + to_string(v);
  }
  return out + "}";
}

const char* exn_name(ExnKind k) {
  switch (k) {
    case ExnKind::Badmatch: return "badmatch";
    case ExnKind::Badarith: return "badarith";
    case ExnKind::Badfun: return "badfun";
    case ExnKind::Badarity: return "badarity";
    case ExnKind::Undef: return "undef";
    case ExnKind::Unbound: return "unbound";
  }
  return "?";
}

bool Outcome::operator==(const Outcome& o) const {
  if (kind != o.kind || trace != o.trace) return false;
  switch (kind) {
    case Kind::Ok: return value == o.value && env_after == o.env_after;
    case Kind::Exn: return exn == o.exn;
    case Kind::Timeout: return true;
  }
  return false;
}

std::string to_string(const Outcome& o) {
  std::string trace = "[" + to_string(std::span<const Value>(o.trace)) + "]";
  switch (o.kind) {
    case Outcome::Kind::Ok:
      return fmt::format("ok value={} env={} trace={}", to_string(o.value), to_string(o.env_after),
                         trace);
    case Outcome::Kind::Exn: return fmt::format("exn kind={} trace={}", exn_name(o.exn), trace);
    case Outcome::Kind::Timeout: return fmt::format("timeout trace={}", trace);
  }
  return {};
}

}  // namespace mer::interp
