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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "mer/cli.hpp"
#include "test_util.hpp"

namespace mer::cli {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out, err;
};

Run mer(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / fmt_name();
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string file(const std::string& name, const std::string& text) {
    auto p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p.string();
  }
  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  std::size_t entries() const {
    return static_cast<std::size_t>(std::distance(fs::directory_iterator(dir_), fs::directory_iterator{}));
  }

 private:
  static std::string fmt_name() {
    return "mer_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name());
  }
  fs::path dir_;
};

const char* kAfterText =
    "f(X) -> f(X, fun() -> 2 end).\ng(X) -> f(X + 1).\nf(X, Y) -> begin X * Y() end.\n";

TEST_F(CliTest, Check) {
  auto r = mer({"check", file("l1.mer", test::kBefore)});
  EXPECT_EQ(r.code, kOk);
  EXPECT_EQ(r.out, "f/1\ng/1\n");
  EXPECT_EQ(mer({"check", file("dup.mer", "f(X) -> X.\nf(Y) -> Y.\n")}).code, kInputError);
  auto e = mer({"check", file("empty.mer", "")});
  EXPECT_EQ(e.code, kOk);
  EXPECT_EQ(e.out, "");
  auto bad = mer({"check", file("bad.mer", "f(X) ->\n  X +.\n")});
  EXPECT_EQ(bad.code, kInputError);
  EXPECT_NE(bad.err.find("bad.mer:2:6: error:"), std::string::npos) << bad.err;
  EXPECT_EQ(mer({"check", "/nonexistent/x.mer"}).code, kInputError);
}

TEST_F(CliTest, GeneraliseByPositionAndByText) {
  auto in = file("l1.mer", test::kBefore);
  auto a = mer({"refactor", "generalise", in, "--pos", "1:19", "--param", "Y"});
  ASSERT_EQ(a.code, kOk) << a.err;
  EXPECT_EQ(a.out, kAfterText);
  auto b = mer({"refactor", "generalise", in, "--expr", "2", "--occurrence", "1", "--param", "Y"});
  EXPECT_EQ(b.code, kOk);
  EXPECT_EQ(b.out, a.out);
  EXPECT_EQ(slurp(in), test::kBefore);
}

TEST_F(CliTest, GeneraliseTrace) {
  auto in = file("l1.mer", test::kBefore);
  auto r = mer({"refactor", "generalise", in, "--expr", "2", "--param", "Y", "--trace"});
  ASSERT_EQ(r.code, kOk);
  for (const char* s : {"% step 1: wrap\n", "% step 2: extract_to_function\n", "% step 3: extract_to_variable\n",
                        "% step 4: ITERATE outer_variable\n", "% step 5: var_to_param\n",
                        "% step 6: rename_function\n", "% result\n"})
    EXPECT_NE(r.out.find(s), std::string::npos) << s;
  // the whole trace is itself a parseable module stream
  EXPECT_EQ(r.out.substr(r.out.size() - std::string(kAfterText).size()), kAfterText);
}

TEST_F(CliTest, WriteReplacesInPlace) {
  auto in = file("l1.mer", test::kBefore);
  auto r = mer({"refactor", "generalise", in, "--expr", "2", "--param", "Y", "--write"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(r.out, "");
  EXPECT_EQ(slurp(in), kAfterText);
  EXPECT_EQ(entries(), 1u);  // no temporary left behind
}

TEST_F(CliTest, ClashLeavesFileUntouched) {
  const std::string src = std::string(test::kBefore) + "f(A, B) -> A.\n";
  auto in = file("clash.mer", src);
  auto r = mer({"refactor", "generalise", in, "--expr", "2", "--param", "Y", "--write"});
  EXPECT_EQ(r.code, kFailed);
  EXPECT_NE(r.err.find("rename_function"), std::string::npos);
  EXPECT_NE(r.err.find("signature clash"), std::string::npos);
  EXPECT_EQ(r.out, "");
  EXPECT_EQ(slurp(in), src);
  EXPECT_EQ(entries(), 1u);
}

TEST_F(CliTest, InjectedFailureEachStep) {
  auto in = file("l1.mer", test::kBefore);
  for (int k = 1; k <= 6; ++k) {
    auto r = mer({"refactor", "generalise", in, "--expr", "2", "--param", "Y", "--write", "--inject-failure",
                  std::to_string(k)});
    EXPECT_EQ(r.code, kFailed) << k;
    EXPECT_NE(r.err.find("step " + std::to_string(k)), std::string::npos) << r.err;
    EXPECT_EQ(slurp(in), test::kBefore) << k;
  }
}

TEST_F(CliTest, TargetErrors) {
  auto in = file("l1.mer", test::kBefore);
  EXPECT_EQ(mer({"refactor", "generalise", in, "--param", "Y"}).code, kInputError);
  EXPECT_EQ(mer({"refactor", "generalise", in, "--pos", "1:19", "--expr", "2", "--param", "Y"}).code, kInputError);
  EXPECT_EQ(mer({"refactor", "generalise", in, "--expr", "2", "--occurrence", "2", "--param", "Y"}).code,
            kInputError);
  EXPECT_EQ(mer({"refactor", "generalise", in, "--pos", "9:1", "--param", "Y"}).code, kInputError);
  EXPECT_EQ(mer({"refactor", "generalise", in, "--pos", "x", "--param", "Y"}).code, kInputError);
  EXPECT_EQ(mer({"refactor", "generalise", in, "--expr", "2", "--param", "lower"}).code, kInputError);
  EXPECT_EQ(mer({"refactor", "generalise", in, "--expr", "2"}).code, kInputError);
  EXPECT_EQ(mer({"bogus"}).code, kInputError);
  EXPECT_EQ(mer({"--help"}).code, kOk);
}

TEST_F(CliTest, Steps) {
  auto in = file("l1.mer", test::kBefore);
  auto w = mer({"refactor", "step", "wrap", in, "--expr", "X + 1"});
  EXPECT_EQ(w.code, kOk);
  EXPECT_EQ(w.out, "f(X) -> begin X * 2 end.\ng(X) -> f((fun(X) -> X + 1 end)(X)).\n");
  auto f = mer({"refactor", "step", "extract_to_function", in, "--expr", "X * 2", "--name", "dbl"});
  EXPECT_EQ(f.code, kOk) << f.err;
  EXPECT_EQ(f.out, "f(X) -> begin dbl(X) end.\ng(X) -> f(X + 1).\ndbl(X) -> X * 2.\n");
  auto v = mer({"refactor", "step", "extract_to_variable", in, "--expr", "2", "--name", "N"});
  EXPECT_EQ(v.code, kOk) << v.err;
  EXPECT_EQ(v.out, "f(X) -> N = 2, begin X * N end.\ng(X) -> f(X + 1).\n");
  auto rn = mer({"refactor", "step", "rename_function", in, "--function", "f/1", "--name", "h"});
  EXPECT_EQ(rn.code, kOk);
  EXPECT_EQ(rn.out, "h(X) -> begin X * 2 end.\ng(X) -> h(X + 1).\n");
  auto clash = mer({"refactor", "step", "rename_function", in, "--function", "g/1", "--name", "f"});
  EXPECT_EQ(clash.code, kFailed);
  EXPECT_NE(clash.err.find("unique_signature"), std::string::npos);
  auto vp = file("vp.mer", "tmp(X) -> Y = fun() -> 2 end, begin X * Y() end.\nf(X) -> tmp(X).\n");
  auto p = mer({"refactor", "step", "var_to_param", vp, "--function", "tmp/1"});
  EXPECT_EQ(p.code, kOk) << p.err;
  EXPECT_EQ(p.out, "tmp(X, Y) -> begin X * Y() end.\nf(X) -> tmp(X, fun() -> 2 end).\n");
  auto ov = file("ov.mer", "f(X) -> (fun() -> Y = 1, X + Y end)().\n");
  auto o = mer({"refactor", "step", "outer_variable", ov, "--expr", "Y = 1"});
  EXPECT_EQ(o.code, kOk) << o.err;
  EXPECT_EQ(o.out, "f(X) -> Y = 1, (fun() -> Y, X + Y end)().\n");
  EXPECT_EQ(mer({"refactor", "step", "inline", in, "--expr", "2"}).code, kInputError);
  EXPECT_EQ(mer({"refactor", "step", "wrap", in, "--expr", "X * 2", "--write"}).code, kOk);
  EXPECT_EQ(slurp(in), "f(X) -> begin (fun(X) -> X * 2 end)(X) end.\ng(X) -> f(X + 1).\n");
}

TEST_F(CliTest, Verify) {
  auto l1 = file("l1.mer", test::kBefore);
  auto l2 = file("l2.mer", test::kAfter);
  auto ok = mer({"verify", l1, l2, "--entry", "f/1", "--entry", "g/1"});
  EXPECT_EQ(ok.code, kOk);
  EXPECT_EQ(ok.out, "verdict=equivalent\ntrials=100\ntimeouts=0\n");
  auto mut = file("mut.mer", "f(X) -> begin X * 3 end.\ng(X) -> f(X+1).\n");
  auto bad = mer({"verify", l1, mut, "--entry", "f/1", "--seed", "5"});
  EXPECT_EQ(bad.code, kFailed);
  EXPECT_NE(bad.out.find("verdict=inequivalent\n"), std::string::npos);
  EXPECT_NE(bad.out.find("entry=f/1\n"), std::string::npos);
  EXPECT_EQ(mer({"verify", l1, mut, "--entry", "f/1", "--seed", "5"}).out, bad.out);
  auto unk = mer({"verify", l1, l2, "--fuel", "1"});
  EXPECT_EQ(unk.code, kUnknown);
  EXPECT_NE(unk.out.find("verdict=unknown\n"), std::string::npos);
  EXPECT_EQ(mer({"verify", l1, l2, "--entry", "h/0"}).code, kInputError);
  EXPECT_EQ(mer({"verify", l1, l2, "--entry", "f"}).code, kInputError);
  EXPECT_EQ(mer({"verify", l1, l2, "--trials", "0"}).code, kInputError);
}

}  // namespace
}  // namespace mer::cli
