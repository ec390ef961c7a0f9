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

#include <benchmark/benchmark.h>
#include <omp.h>

#include "mer/equiv.hpp"
#include "mer/refactor.hpp"
#include "mer/syntax.hpp"

namespace {

using namespace mer;

struct Workload {
  std::vector<Module> before, after;
};

// Generated modules paired with their wrap of the first applicable node.
const Workload& workload() {
  static const Workload w = [] {
    Workload w;
    for (std::uint64_t s = 1; w.before.size() < 16; ++s) {
      auto m = equiv::gen_module(s, 5);
      for (NodeId id = 1; id < m.next_node_id(); ++id) {
        const auto* info = m.lookup(id);
        if (!info || info->kind != NodeInfo::Kind::Expr) continue;
        auto o = refactor::wrap(m, analysis::ref(m, id));
        if (!o.ok()) continue;
        w.before.push_back(m);
        w.after.push_back(o.snapshot);
        break;
      }
    }
    return w;
  }();
  return w;
}

template <equiv::Verdict (*Check)(const Module&, const Module&, const equiv::TrialPlan&)>
void module_equiv(benchmark::State& state) {
  const auto& w = workload();
  std::size_t trials = 0;
  for (auto _ : state) {
    for (std::size_t i = 0; i < w.before.size(); ++i) {
      equiv::TrialPlan p;
      p.entries = equiv::all_entries(w.before[i]);
      p.trials = static_cast<std::size_t>(state.range(0));
      auto v = Check(w.before[i], w.after[i], p);
      benchmark::DoNotOptimize(v);
      trials += v.trials;
    }
  }
  state.counters["trials/s"] = benchmark::Counter(static_cast<double>(trials), benchmark::Counter::kIsRate);
  state.counters["threads"] = omp_get_max_threads();
}

template <equiv::Verdict (*Check)(const rewrite::MetaPattern&, const rewrite::MetaPattern&,
                                  const rewrite::Condition&, const equiv::RulePlan&)>
void rule_equiv(benchmark::State& state) {
  const auto ob = equiv::obligation(refactor::prime("wrap"));
  std::size_t trials = 0;
  for (auto _ : state) {
    equiv::RulePlan p;
    p.trials = static_cast<std::size_t>(state.range(0));
    auto v = Check(ob.lhs, ob.rhs, ob.cond, p);
    benchmark::DoNotOptimize(v);
    trials += v.trials;
  }
  state.counters["trials/s"] = benchmark::Counter(static_cast<double>(trials), benchmark::Counter::kIsRate);
}

}  // namespace

BENCHMARK(module_equiv<equiv::check_module_equiv_serial>)->Name("module_equiv/serial")->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(module_equiv<equiv::check_module_equiv>)->Name("module_equiv/omp")->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(rule_equiv<equiv::check_rule_equiv_serial>)->Name("rule_equiv/serial")->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(rule_equiv<equiv::check_rule_equiv>)->Name("rule_equiv/omp")->Arg(500)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
