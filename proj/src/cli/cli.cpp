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

#include "mer/cli.hpp"

#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mer/analysis.hpp"
#include "mer/equiv.hpp"
#include "mer/refactor.hpp"
#include "mer/syntax.hpp"

namespace mer::cli {

namespace {

using analysis::NodeRef;
using analysis::ref;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("{}: cannot read file", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Loaded {
  std::string text;
  Module module;
};

Loaded load(const std::string& path) {
  Loaded l;
  l.text = read_file(path);
  try {
    l.module = parse(l.text);
  } catch (const ParseError& e) {
    throw InputError(fmt::format("{}:{}:{}: error: {}", path, e.pos().line, e.pos().col, e.message()));
  } catch (const DuplicateDefinition& e) {
    throw InputError(fmt::format("{}: error: {}", path, e.what()));
  }
  return l;
}

FunKey parse_key(const std::string& s) {
  static const std::regex re(R"(([a-z][A-Za-z0-9_]*)/([0-9]+))");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw InputError(fmt::format("malformed function name/arity '{}'", s));
  return {m[1].str(), std::stoul(m[2].str())};
}

NodeId resolve_target(const CliConfig& c, const Module& m) {
  if (c.pos.has_value() == c.expr.has_value())
    throw InputError("exactly one of --pos and --expr selects the target");
  if (c.pos) {
    static const std::regex re(R"(([0-9]+):([0-9]+))");
    std::smatch mt;
    if (!std::regex_match(*c.pos, mt, re)) throw InputError(fmt::format("malformed position '{}'", *c.pos));
    SourcePos p{std::stoi(mt[1].str()), std::stoi(mt[2].str())};
    auto id = find_node(m, p);
    if (!id) throw InputError(fmt::format("no expression at {}", *c.pos));
    return *id;
  }
  IdAllocator ids(m.next_node_id());
  ExprPtr needle;
  try {
    needle = parse_expression(*c.expr, ids);
  } catch (const ParseError& e) {
    throw InputError(fmt::format("--expr: {}", e.what()));
  }
  auto hits = find_occurrences(m, *needle);
  if (c.occurrence < 1 || c.occurrence > hits.size())
    throw InputError(fmt::format("occurrence {} of '{}' not found ({} present)", c.occurrence, *c.expr, hits.size()));
  return hits[c.occurrence - 1];
}

const FunDef& resolve_function(const CliConfig& c, const Module& m) {
  if (!c.function) throw InputError("--function name/arity is required");
  auto key = parse_key(*c.function);
  const FunDef* d = m.find(key);
  if (!d) throw InputError(fmt::format("{} is not defined", key.str()));
  return *d;
}

void emit(const CliConfig& c, const std::string& text, std::ostream& out) {
  if (c.write) {
    write_atomically(c.input, text);
  } else if (!c.output.empty()) {
    write_atomically(c.output, text);
  } else {
    out << text;
  }
}

std::vector<PatternPtr> param_patterns(const CliConfig& c, const Module& m, NodeId target) {
  std::vector<std::string> names;
  if (c.params) {
    std::stringstream ss(*c.params);
    for (std::string item; std::getline(ss, item, ',');) {
      item.erase(0, item.find_first_not_of(' '));
      item.erase(item.find_last_not_of(' ') + 1);
      if (!is_variable_name(item)) throw InputError(fmt::format("'{}' is not a variable name", item));
      names.push_back(item);
    }
  } else {
    const auto& info = m.at(target);
    names = info.kind == NodeInfo::Kind::Body ? analysis::free_vars_of_body(m, ref(m, target))
                                              : analysis::free_vars(m, ref(m, target));
  }
  IdAllocator ids(1u << 30);
  std::vector<PatternPtr> out;
  for (const auto& n : names) out.push_back(make::pvar(ids, n));
  return out;
}

int guarded(const std::function<int()>& f, std::ostream& err) {
  try {
    return f();
  } catch (const InputError& e) {
    err << e.what() << "\n";
  } catch (const equiv::PlanError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << "\n";
  }
  return kInputError;
}

}  // namespace

void write_atomically(const std::string& path, const std::string& contents) {
  std::string tmpl = path + ".XXXXXX";
  int fd = ::mkstemp(tmpl.data());
  if (fd < 0) throw InputError(fmt::format("{}: cannot create temporary file: {}", path, std::strerror(errno)));
  std::size_t done = 0;
  while (done < contents.size()) {
    auto n = ::write(fd, contents.data() + done, contents.size() - done);
    if (n < 0) {
      ::close(fd);
      std::remove(tmpl.c_str());
      throw InputError(fmt::format("{}: write failed", tmpl));
    }
    done += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0 || ::close(fd) != 0) {
    std::remove(tmpl.c_str());
    throw InputError(fmt::format("{}: write failed", tmpl));
  }
  std::error_code ec;
  // keep the permissions of the file being replaced
  auto perms = std::filesystem::status(path, ec).permissions();
  if (!ec) std::filesystem::permissions(tmpl, perms, ec);
  std::filesystem::rename(tmpl, path, ec);
  if (ec) {
    std::remove(tmpl.c_str());
    throw InputError(fmt::format("{}: cannot replace: {}", path, ec.message()));
  }
}

int cmd_check(const CliConfig& c, std::ostream& out, std::ostream& err) {
  return guarded([&] {
    auto l = load(c.input);
    for (const auto& d : l.module.definitions()) out << d->key().str() << "\n";
    return kOk;
  }, err);
}

int cmd_generalise(const CliConfig& c, std::ostream& out, std::ostream& err) {
  return guarded([&] {
    auto l = load(c.input);
    if (!is_variable_name(c.param)) throw InputError(fmt::format("--param '{}' is not a variable name", c.param));
    const NodeId target = resolve_target(c, l.module);
    refactor::Options opts;
    if (c.inject_failure)
      opts.inject_failure = [k = c.inject_failure](std::size_t step, std::string_view) { return step == k; };
    auto r = refactor::generalise_function(l.module, l.text, ref(l.module, target), c.param, opts);
    if (!r.ok()) {
      err << "error: generalise_function: " << refactor::describe(r) << "\n";
      return kFailed;
    }
    if (c.trace) {
      for (std::size_t i = 0; i < r.trace.size(); ++i)
        out << fmt::format("% step {}: {}\n", i + 1, r.trace[i].step) << r.trace[i].module_text;
      out << "% result\n";
    }
    if (c.write || !c.output.empty()) {
      emit(c, r.text, out);
      if (!c.trace) err << "wrote " << (c.write ? c.input : c.output) << "\n";
      else out << r.text;
    } else {
      out << r.text;
    }
    return kOk;
  }, err);
}

int cmd_step(const CliConfig& c, std::ostream& out, std::ostream& err) {
  return guarded([&] {
    auto l = load(c.input);
    const Module& m = l.module;
    refactor::StepOutcome o;
    const auto& s = c.step;
    if (s == "wrap") {
      o = refactor::wrap(m, ref(m, resolve_target(c, m)));
    } else if (s == "extract_to_variable") {
      if (c.name.empty()) throw InputError("--name is required");
      o = refactor::extract_to_variable(m, ref(m, resolve_target(c, m)), c.name);
    } else if (s == "outer_variable") {
      o = refactor::outer_variable(m, ref(m, resolve_target(c, m)));
    } else if (s == "extract_to_function") {
      const NodeId t = resolve_target(c, m);
      const auto name = c.name.empty() ? refactor::fresh_function_name(m, "tmp") : c.name;
      o = refactor::extract_to_function(m, ref(m, t), name, param_patterns(c, m, t));
    } else if (s == "var_to_param") {
      const auto& d = resolve_function(c, m);
      if (d.body.empty()) throw InputError("empty body");
      o = refactor::var_to_param(m, ref(m, d.id), ref(m, d.body.front()->id));
    } else if (s == "rename_function") {
      const auto& d = resolve_function(c, m);
      if (c.name.empty()) throw InputError("--name is required");
      o = refactor::rename_function(m, ref(m, d.id), c.name);
    } else {
      throw InputError(fmt::format("unknown step '{}'", s));
    }
    if (!o.ok()) {
      err << "error: " << s << ": " << rewrite::describe(o) << "\n";
      return kFailed;
    }
    emit(c, pretty(o.snapshot), out);
    return kOk;
  }, err);
}

int cmd_verify(const CliConfig& c, std::ostream& out, std::ostream& err) {
  return guarded([&] {
    auto a = load(c.input);
    auto b = load(c.second);
    equiv::TrialPlan plan;
    for (const auto& e : c.entries) plan.entries.push_back(parse_key(e));
    if (plan.entries.empty()) plan.entries = equiv::all_entries(a.module);
    plan.trials = c.trials;
    plan.seed = c.seed;
    plan.fuel = c.fuel;
    auto v = equiv::check_module_equiv(a.module, b.module, plan);
    out << equiv::to_text(v);
    switch (v.kind) {
      case equiv::Verdict::Kind::Equivalent: return kOk;
      case equiv::Verdict::Kind::Inequivalent: return kFailed;
      case equiv::Verdict::Kind::Unknown: return kUnknown;
    }
    return kUnknown;
  }, err);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliConfig c;
  CLI::App app{"Mini-Erlang refactoring engine", "mer"};
  app.require_subcommand(1);

  auto target_opts = [&](CLI::App* sub) {
    sub->add_option("--pos", c.pos, "target position L:C (1-based)");
    sub->add_option("--expr", c.expr, "target expression text");
    sub->add_option("--occurrence", c.occurrence, "which occurrence of --expr (1-based)")->check(CLI::PositiveNumber);
  };

  auto* check = app.add_subcommand("check", "parse a module and list its definitions");
  check->add_option("FILE", c.input)->required();
  check->callback([&] { c.command = "check"; });

  auto* refactor = app.add_subcommand("refactor", "apply a refactoring");
  refactor->require_subcommand(1);
  auto* gen = refactor->add_subcommand("generalise", "turn an expression into a function parameter");
  gen->add_option("FILE", c.input)->required();
  target_opts(gen);
  gen->add_option("--param", c.param, "name of the new parameter")->required();
  gen->add_flag("--write", c.write, "replace FILE in place");
  gen->add_flag("--trace", c.trace, "print every prime step and its module");
  gen->add_option("-o,--output", c.output, "write the result to a file");
  gen->add_option("--inject-failure", c.inject_failure)->group("");
  gen->callback([&] { c.command = "generalise"; });

  auto* step = refactor->add_subcommand("step", "apply one prime refactoring");
  step->add_option("NAME", c.step, "wrap, extract_to_variable, outer_variable, extract_to_function, "
                                   "var_to_param or rename_function")->required();
  step->add_option("FILE", c.input)->required();
  target_opts(step);
  step->add_option("--name", c.name, "new variable or function name");
  step->add_option("--params", c.params, "extract_to_function parameters, comma-separated");
  step->add_option("--function", c.function, "definition name/arity");
  step->add_flag("--write", c.write, "replace FILE in place");
  step->add_option("-o,--output", c.output, "write the result to a file");
  step->callback([&] { c.command = "step"; });

  auto* verify = app.add_subcommand("verify", "differential equivalence check of two modules");
  verify->add_option("BEFORE", c.input)->required();
  verify->add_option("AFTER", c.second)->required();
  verify->add_option("--entry", c.entries, "entry name/arity (repeatable; default: all of BEFORE)");
  verify->add_option("--trials", c.trials, "trials per entry")->check(CLI::PositiveNumber);
  verify->add_option("--seed", c.seed, "random seed");
  verify->add_option("--fuel", c.fuel, "evaluation steps per run")->check(CLI::PositiveNumber);
  verify->callback([&] { c.command = "verify"; });

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }
  if (c.write && !c.output.empty()) {
    err << "error: --write and --output are exclusive\n";
    return kInputError;
  }
  if (c.command == "check") return cmd_check(c, out, err);
  if (c.command == "generalise") return cmd_generalise(c, out, err);
  if (c.command == "step") return cmd_step(c, out, err);
  if (c.command == "verify") return cmd_verify(c, out, err);
  return kInputError;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace mer::cli
