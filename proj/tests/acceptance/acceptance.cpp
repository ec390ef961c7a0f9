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

// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is the number of failing criteria.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <regex>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "mer/analysis.hpp"
#include "mer/equiv.hpp"
#include "mer/refactor.hpp"
#include "mer/syntax.hpp"
#include "sweep.hpp"

namespace fs = std::filesystem;
using namespace mer;

namespace {

struct Check {
  bool pass = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond && pass) {
      pass = false;
      detail = what;
    } else if (!cond) {
      detail += "; " + what;
    }
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

struct Proc {
  int code = -1;
  std::string out, err;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

// Runs the mer executable; stderr goes to a side file.
Proc mer(const std::vector<std::string>& args, const fs::path& scratch) {
  std::string cmd = quote(MER_BINARY);
  for (const auto& a : args) cmd += " " + quote(a);
  const auto errfile = scratch / "stderr.txt";
  cmd += " 2>" + quote(errfile.string());
  Proc p;
  FILE* f = ::popen(cmd.c_str(), "r");
  if (!f) return p;
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, f)) > 0;) p.out.append(buf, n);
  const int status = ::pclose(f);
  p.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  p.err = slurp(errfile);
  return p;
}

std::set<std::string> definition_set(const Module& m) {
  std::set<std::string> out;
  for (const auto& d : m.definitions()) out.insert(pretty(*d));
  return out;
}

// Splits `% step k: name` sections of a trace. The result section is dropped.
std::vector<std::pair<std::string, std::string>> trace_sections(const std::string& out) {
  std::vector<std::pair<std::string, std::string>> sections;
  std::istringstream in(out);
  static const std::regex header(R"(% step [0-9]+: (.*))");
  std::string line;
  bool in_result = false;
  while (std::getline(in, line)) {
    std::smatch m;
    if (std::regex_match(line, m, header)) {
      sections.push_back({m[1].str(), ""});
      in_result = false;
    } else if (line == "% result") {
      in_result = true;
    } else if (!in_result && !sections.empty()) {
      sections.back().second += line + "\n";
    }
  }
  return sections;
}

equiv::TrialPlan case_plan() {
  equiv::TrialPlan p;
  p.entries = {{"f", 1}, {"g", 1}};
  p.trials = 50;
  p.fuel = 100000;
  return p;
}

const fs::path kCorpus = MER_CORPUS_DIR;

Check case_study(const fs::path& scratch) {
  Check c;
  const auto in = scratch / "generalise_before.mer";
  fs::copy_file(kCorpus / "generalise_before.mer", in, fs::copy_options::overwrite_existing);
  auto r = mer({"refactor", "generalise", in.string(), "--pos", "1:19", "--param", "Y"}, scratch);
  c.require(r.code == 0, fmt::format("exit {}: {}", r.code, r.err));
  if (r.code != 0) return c;
  const std::set<std::string> want = {"f(X, Y) -> begin X * Y() end.", "f(X) -> f(X, fun() -> 2 end).",
                                      "g(X) -> f(X + 1)."};
  c.require(definition_set(parse(r.out)) == want, "definitions differ:\n" + r.out);
  c.require(definition_set(parse(r.out)) == definition_set(parse(slurp(kCorpus / "generalise_after.mer"))),
            "differs from the expected generalised module");
  c.detail = "three definitions match";
  return c;
}

Check trace_equivalence(const fs::path& scratch) {
  Check c;
  const auto in = scratch / "generalise_before.mer";
  fs::copy_file(kCorpus / "generalise_before.mer", in, fs::copy_options::overwrite_existing);
  auto r = mer({"refactor", "generalise", in.string(), "--expr", "2", "--param", "Y", "--trace"}, scratch);
  c.require(r.code == 0, fmt::format("exit {}: {}", r.code, r.err));
  auto sections = trace_sections(r.out);
  c.require(sections.size() == 6, fmt::format("{} trace sections", sections.size()));
  const auto l1 = parse(slurp(kCorpus / "generalise_before.mer"));
  std::size_t trials = 0;
  for (const auto& [step, text] : sections) {
    auto v = equiv::check_module_equiv(l1, parse(text), case_plan());
    trials += v.trials;
    c.require(v.kind == equiv::Verdict::Kind::Equivalent && v.timeouts == 0,
              fmt::format("{}: {}", step, equiv::to_text(v)));
  }
  if (c.pass) c.detail = fmt::format("6 snapshots equivalent, {} trials, 0 timeouts", trials);
  return c;
}

Check rollback(const fs::path& scratch) {
  Check c;
  std::size_t assertions = 0;
  auto expect = [&](bool cond, const std::string& what) {
    ++assertions;
    c.require(cond, what);
  };
  const auto clash = scratch / "clash.mer";
  const std::string clash_src = slurp(kCorpus / "generalise_before.mer") + "f(A, B) -> A.\n";
  spit(clash, clash_src);
  auto r = mer({"refactor", "generalise", clash.string(), "--expr", "2", "--param", "Y", "--write"}, scratch);
  expect(r.code == 1 && r.err.find("rename_function") != std::string::npos &&
             r.err.find("signature clash") != std::string::npos,
         fmt::format("clash: exit {} '{}'", r.code, r.err));
  expect(slurp(clash) == clash_src, "clash: file changed");
  const auto in = scratch / "inject.mer";
  const std::string src = slurp(kCorpus / "generalise_before.mer");
  for (int k = 1; k <= 6; ++k) {
    spit(in, src);
    auto q = mer({"refactor", "generalise", in.string(), "--expr", "2", "--param", "Y", "--write",
                  "--inject-failure", std::to_string(k)},
                 scratch);
    expect(q.code == 1 && q.err.find(fmt::format("step {} ", k)) != std::string::npos,
           fmt::format("inject {}: exit {} '{}'", k, q.code, q.err));
    expect(slurp(in) == src, fmt::format("inject {}: file changed", k));
  }
  if (c.pass) c.detail = fmt::format("{} assertions", assertions);
  return c;
}

Check rule_check(const equiv::RuleObligation& ob, bool need_printing) {
  Check c;
  equiv::RulePlan p;
  p.trials = 500;
  p.max_depth = 4;
  auto v = equiv::check_rule_equiv(ob.lhs, ob.rhs, ob.cond, p);
  c.require(v.kind == equiv::Verdict::Kind::Equivalent, equiv::to_text(v));
  c.require(v.trials == 500, fmt::format("{} trials", v.trials));
  if (need_printing) c.require(v.printing > 0, "no instance prints");
  if (c.pass) c.detail = fmt::format("{} trials, {} with print, 0 counterexamples", v.trials, v.printing);
  return c;
}

Check env_restore_exhaustive() {
  Check c;
  using interp::Value;
  const std::vector<std::string> pool{"A", "B", "C"};
  IdAllocator ids;
  std::size_t cases = 0, ok = 0;
  for (int mask = 0; mask < 8; ++mask) {
    std::vector<std::string> names;
    for (int i = 0; i < 3; ++i)
      if (mask & (1 << i)) names.push_back(pool[i]);
    const int combos = 1 << names.size();
    for (int vals = 0; vals < combos; ++vals) {
      interp::Env e;
      for (std::size_t i = 0; i < names.size(); ++i) e[names[i]] = Value::of_int(((vals >> i) & 1) + 1);
      for (int sub = 0; sub < combos; ++sub) {
        std::vector<std::string> vs;
        std::vector<PatternPtr> ps;
        for (std::size_t i = 0; i < names.size(); ++i)
          if (sub & (1 << i)) {
            vs.push_back(names[i]);
            ps.push_back(make::pvar(ids, names[i]));
          }
        ++cases;
        auto removed = interp::env_remove(e, vs);
        auto bound = interp::get_matching(*interp::env_lookup(e, vs), ps, removed);
        if (bound) {
          auto back = interp::env_concat(removed, *bound);
          if (back && *back == e) ++ok;
        }
      }
    }
  }
  c.require(ok == cases, fmt::format("{}/{} cases", ok, cases));
  c.detail = fmt::format("{}/{} cases", ok, cases);
  return c;
}

template <class Keep, class Prop>
Check sampled_property(Keep keep, Prop prop, std::uint64_t seed) {
  Check c;
  const std::vector<std::string> names = {"X", "Y", "Z"};
  std::size_t exprs = 0, runs = 0, draws = 0;
  for (std::uint64_t s = 0; exprs < 300 && draws < 100000; ++s, ++draws) {
    equiv::Rng rng(equiv::mix_seed(seed, s));
    IdAllocator ids;
    auto e = equiv::gen_expr(rng, 1 + static_cast<int>(s % 4), names, ids);
    if (!keep(*e, names)) continue;
    ++exprs;
    for (int k = 0; k < 20; ++k, ++runs) {
      auto env = equiv::gen_env(rng, names);
      if (!prop(*e, env)) {
        c.require(false, fmt::format("fails for {} in {}", pretty(*e), interp::to_string(env)));
        return c;
      }
    }
  }
  c.require(exprs == 300, fmt::format("only {} expressions generated", exprs));
  if (c.pass) c.detail = fmt::format("{} expressions, {} evaluations", exprs, runs);
  return c;
}

Check non_bind_restoration() {
  return sampled_property(
      [](const Expr& e, const std::vector<std::string>& names) {
        return analysis::non_bind(e, std::set<std::string>(names.begin(), names.end()));
      },
      [](const Expr& e, const interp::Env& env) {
        auto o = interp::eval_expr(e, env, 100000);
        return interp::restore_env(o, env) == o;
      },
      71);
}

Check purity() {
  return sampled_property([](const Expr& e, const std::vector<std::string>&) { return analysis::pure_expr(e, {}); },
                          [](const Expr& e, const interp::Env& env) {
                            return interp::eval_expr(e, env, 100000).trace.empty();
                          },
                          83);
}

Check sweep() {
  Check c;
  auto st = test::soundness_sweep(2024, 200, 30, 5);
  c.require(st.inequivalent == 0,
            fmt::format("{} inequivalent; first:\n{}", st.inequivalent, st.failures.empty() ? "" : st.failures[0]));
  c.require(st.applied > 0 && st.rejected > 0, "degenerate sweep");
  std::string by;
  for (const auto& [k, v] : st.applied_by_prime) by += fmt::format(" {}={}", k, v);
  if (c.pass)
    c.detail = fmt::format("{} modules, {} attempts, {} applied ({} equivalent, {} unknown, {} unchecked), "
                           "{} rejected, 0 inequivalent;{}",
                           st.modules, st.attempts, st.applied, st.equivalent, st.unknown, st.unchecked, st.rejected,
                           by);
  return c;
}

Check round_trip() {
  Check c;
  std::size_t files = 0;
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(kCorpus))
    if (e.path().extension() == ".mer") paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  for (const char* need : {"generalise_before.mer", "generalise_after.mer"})
    c.require(std::find(paths.begin(), paths.end(), kCorpus / need) != paths.end(), std::string("missing ") + need);
  std::size_t traces = 0;
  for (const auto& p : paths) {
    ++files;
    if (p.filename().string().rfind("trace", 0) == 0) ++traces;
    try {
      auto m = parse(slurp(p));
      auto once = pretty(m);
      auto m2 = parse(once);
      c.require(same_shape(m, m2), p.filename().string() + ": parse(pretty) changes the tree");
      c.require(pretty(m2) == once, p.filename().string() + ": pretty not idempotent");
    } catch (const std::exception& e) {
      c.require(false, p.filename().string() + ": " + e.what());
    }
  }
  c.require(files >= 30, fmt::format("{} programs", files));
  c.require(traces == 6, fmt::format("{} trace modules", traces));
  if (c.pass) c.detail = fmt::format("{} programs ({} trace modules)", files, traces);
  return c;
}

}  // namespace

int main() {
  const auto scratch = fs::temp_directory_path() / fmt::format("mer_acceptance_{}", ::getpid());
  fs::create_directories(scratch);
  struct Criterion {
    int n;
    const char* name;
    double limit;  // seconds; 0 for none
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "case-study reproduction", 1.0, [&] { return case_study(scratch); }},
      {2, "six-step trace equivalence", 5.0, [&] { return trace_equivalence(scratch); }},
      {3, "precondition and rollback", 0, [&] { return rollback(scratch); }},
      {4, "wrap rule equivalence", 10.0,
       [] { return rule_check(equiv::obligation(refactor::prime("wrap")), true); }},
      {5, "introduce-variable contract", 0,
       [] { return rule_check(equiv::obligation(refactor::prime("extract_to_variable")), false); }},
      {6, "env remove/restore exhaustive", 0, env_restore_exhaustive},
      {7, "non-binding restoration", 0, non_bind_restoration},
      {8, "purity soundness", 0, purity},
      {9, "engine-wide soundness sweep", 180.0, sweep},
      {10, "syntax round trip", 0, round_trip},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
      c = cr.run();
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cr.limit > 0) c.require(secs < cr.limit, fmt::format("took {:.2f}s, limit {:.0f}s", secs, cr.limit));
    if (!c.pass) ++failed;
    std::cout << fmt::format("{} criterion {}: {} ({}; {:.2f}s)\n", c.pass ? "PASS" : "FAIL", cr.n, cr.name,
                             c.detail, secs)
              << std::flush;
  }
  fs::remove_all(scratch);
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed;
}
