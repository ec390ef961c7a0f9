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

#pragma once

#include <random>
#include <string>
#include <vector>

namespace mer::test {

// Random, fully parenthesized expression text over a handful of variable
// names. Not guaranteed to evaluate; used for static-analysis oracles.
class RandomText {
 public:
  explicit RandomText(unsigned seed) : rng_(seed) {}

  std::string expr(int depth) {
    int pick = depth <= 0 ? below(3) : below(10);
    switch (pick) {
      case 0: return std::to_string(below(5));
      case 1:
      case 2: return var();
      case 3: return "(" + expr(depth - 1) + " + " + expr(depth - 1) + ")";
      case 4: return "(" + pattern() + " = " + expr(depth - 1) + ")";
      case 5: return "fun(" + params() + ") -> " + seq(depth - 1) + " end";
      case 6: return "begin " + seq(depth - 1) + " end";
      case 7: return "{" + expr(depth - 1) + ", " + expr(depth - 1) + "}";
      case 8: return "h(" + expr(depth - 1) + ")";
      default: return "(" + pattern() + " = " + expr(depth - 1) + ")";
    }
  }

  std::string seq(int depth) {
    std::string out = expr(depth);
    int n = below(3);
    for (int i = 0; i < n; ++i) out += ", " + expr(depth);
    return out;
  }

  std::string var() { return kNames[below(kNames.size())]; }

  int below(std::size_t n) { return std::uniform_int_distribution<int>(0, int(n) - 1)(rng_); }

 private:
  std::string pattern() {
    if (below(3)) return var();
    std::string a = var(), b = var();
    if (a == b) return a;
    return "{" + a + ", " + b + "}";
  }

  std::string params() {
    std::string out;
    int n = below(3);
    std::vector<std::string> used;
    for (int i = 0; i < n; ++i) {
      std::string v = var();
      if (std::find(used.begin(), used.end(), v) != used.end()) continue;
      used.push_back(v);
      if (!out.empty()) out += ", ";
      out += v;
    }
    return out;
  }

  static inline const std::vector<std::string> kNames{"X", "Y", "Z", "W"};
  std::mt19937 rng_;
};

}  // namespace mer::test
