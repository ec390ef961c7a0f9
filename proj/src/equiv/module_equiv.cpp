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

#include <atomic>

#include <fmt/format.h>

#include "mer/equiv.hpp"

namespace mer::equiv {

namespace {

struct Resolved {
  FunKey before, after;
  std::vector<Value> extra;
};

std::vector<Resolved> resolve(const Module& before, const Module& after, const TrialPlan& plan) {
  if (plan.trials < 1) throw PlanError("trials must be at least 1");
  if (plan.fuel < 1) throw PlanError("fuel must be at least 1");
  if (plan.arg_min > plan.arg_max) throw PlanError("empty argument range");
  std::vector<Resolved> out;
  for (const auto& k : plan.entries) {
    auto it = plan.remap.find(k);
    FunKey ak = it == plan.remap.end() ? k : it->second;
    if (!before.find(k)) throw PlanError(fmt::format("entry {} is not defined in the first module", k.str()));
    if (!after.find(ak)) throw PlanError(fmt::format("entry {} is not defined in the second module", ak.str()));
    std::vector<Value> extra;
    if (auto e = plan.extra_args.find(k); e != plan.extra_args.end()) extra = e->second;
    if (ak.arity != k.arity + extra.size())
      throw PlanError(fmt::format("entry {} is remapped to {} without matching extra arguments", k.str(), ak.str()));
    out.push_back({k, ak, std::move(extra)});
  }
  return out;
}

struct TrialResult {
  Comparison cmp;
  std::vector<Value> args;
  Outcome a, b;
};

TrialResult run_trial(const Module& before, const Module& after, const TrialPlan& plan,
                      const std::vector<Resolved>& entries, std::size_t flat) {
  const std::size_t e = flat / plan.trials, t = flat % plan.trials;
  TrialResult r;
  r.args = gen_args(mix_seed(plan.seed, e, t), entries[e].before.arity, plan.arg_min, plan.arg_max);
  const auto fuel = static_cast<std::uint64_t>(plan.fuel);
  r.a = interp::eval_call(before, entries[e].before, r.args, fuel);
  if (entries[e].extra.empty()) {
    r.b = interp::eval_call(after, entries[e].after, r.args, fuel);
  } else {
    auto args = r.args;
    args.insert(args.end(), entries[e].extra.begin(), entries[e].extra.end());
    r.b = interp::eval_call(after, entries[e].after, args, fuel);
  }
  r.cmp = eq_outcomes(r.a, r.b, false);
  return r;
}

Verdict inequivalent(TrialResult r, const FunKey& entry, std::size_t trials, std::size_t timeouts) {
  Verdict v;
  v.kind = Verdict::Kind::Inequivalent;
  v.trials = trials;
  v.timeouts = timeouts;
  v.witness = Witness{entry.str(), std::move(r.args), {}, {}, std::move(r.a), std::move(r.b),
                      r.cmp.reason};
  return v;
}

Verdict settle(std::size_t trials, std::size_t timeouts) {
  Verdict v;
  v.kind = timeouts ? Verdict::Kind::Unknown : Verdict::Kind::Equivalent;
  v.trials = trials;
  v.timeouts = timeouts;
  return v;
}

}  // namespace

std::vector<FunKey> all_entries(const Module& m) {
  std::vector<FunKey> out;
  for (const auto& d : m.definitions()) out.push_back(d->key());
  return out;
}

Verdict check_module_equiv_serial(const Module& before, const Module& after, const TrialPlan& plan) {
  const auto entries = resolve(before, after, plan);
  const std::size_t total = entries.size() * plan.trials;
  std::size_t timeouts = 0;
  for (std::size_t i = 0; i < total; ++i) {
    auto r = run_trial(before, after, plan, entries, i);
    if (r.cmp.kind == Comparison::Kind::Unknown) ++timeouts;
    if (r.cmp.kind == Comparison::Kind::Different)
      return inequivalent(std::move(r), entries[i / plan.trials].before, i + 1, timeouts);
  }
  return settle(total, timeouts);
}

Verdict check_module_equiv(const Module& before, const Module& after, const TrialPlan& plan) {
  const auto entries = resolve(before, after, plan);
  const std::size_t total = entries.size() * plan.trials;
  std::vector<TrialResult> results(total);
  std::vector<char> ran(total, 0);
  // Trials past the earliest known difference are skipped; every trial
  // before it still runs, so the chosen witness is schedule-independent.
  std::atomic<std::size_t> first_diff{total};
  const auto n = static_cast<std::ptrdiff_t>(total);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (idx > first_diff.load(std::memory_order_relaxed)) continue;
    results[idx] = run_trial(before, after, plan, entries, idx);
    ran[idx] = 1;
    if (results[idx].cmp.kind == Comparison::Kind::Different) {
      auto cur = first_diff.load();
      while (idx < cur && !first_diff.compare_exchange_weak(cur, idx)) {
      }
    }
  }
  std::size_t timeouts = 0;
  for (std::size_t i = 0; i < total; ++i) {
    if (!ran[i]) continue;
    auto& r = results[i];
    if (r.cmp.kind == Comparison::Kind::Unknown) ++timeouts;
    if (r.cmp.kind == Comparison::Kind::Different)
      return inequivalent(std::move(r), entries[i / plan.trials].before, i + 1, timeouts);
  }
  return settle(total, timeouts);
}

}  // namespace mer::equiv
