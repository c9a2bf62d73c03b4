// Copyright 2026 The synth-eval Authors.
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

#include "synth_eval/transformer.h"

#include "doctest.h"

#include <set>
#include <string>

#include "synth_eval/error.h"

using namespace synth_eval;

namespace {

SourceUnit Py(std::string text) { return SourceUnit(Language::kPython, std::move(text)); }
SourceUnit Java(std::string text) { return SourceUnit(Language::kJava, std::move(text)); }

std::vector<std::string> Tokens(const SourceUnit& unit) { return Tokenize(unit); }

SourceUnit ApplyOnly(const SourceUnit& unit, TransformRule rule) {
  auto sites = FindSites(unit, {rule});
  REQUIRE(sites.size() == 1);
  return ApplyTransform(unit, sites[0]);
}

// Applies the single site of `rule` twice; the second application must undo
// the first.
void CheckInvolution(const SourceUnit& unit, TransformRule rule) {
  const SourceUnit once = ApplyOnly(unit, rule);
  CHECK_FALSE(once.has_error());
  CHECK(Tokens(once) != Tokens(unit));
  auto back_sites = FindSites(once, {rule});
  bool restored = false;
  for (const auto& site : back_sites) {
    if (Tokens(ApplyTransform(once, site)) == Tokens(unit)) restored = true;
  }
  CHECK_MESSAGE(restored, unit.text());
}

}  // namespace

TEST_CASE("expression exchange examples") {
  const SourceUnit unit = Py("a += b");
  auto sites = FindSites(unit, {TransformRule::kExpressionExchange});
  REQUIRE(sites.size() == 1);
  CHECK(sites[0].direction == Direction::kForward);
  CHECK(ApplyTransform(unit, sites[0]).text() == "a = a + b");

  CHECK(ApplyOnly(Py("a = a + b"), TransformRule::kExpressionExchange).text() == "a += b");
  CHECK(ApplyOnly(Py("x -= y * 2"), TransformRule::kExpressionExchange).text() ==
        "x = x - (y * 2)");
  CHECK(ApplyOnly(Py("x = x - (y * 2)"), TransformRule::kExpressionExchange).text() ==
        "x -= y * 2");
  CHECK(ApplyOnly(Py("x = x - (y)"), TransformRule::kExpressionExchange).text() ==
        "x -= (y)");
  CHECK(ApplyOnly(Java("class A { void f() { s[i] <<= 2; } }"),
                  TransformRule::kExpressionExchange)
            .text() == "class A { void f() { s[i] = s[i] << 2; } }");
}

TEST_CASE("expression exchange skips unsafe shapes") {
  CHECK(FindSites(Py("a = b + a"), {TransformRule::kExpressionExchange}).empty());
  CHECK(FindSites(Py("f().x += 1"), {TransformRule::kExpressionExchange}).empty());
  CHECK(FindSites(Py("a[g()] += 1"), {TransformRule::kExpressionExchange}).empty());
  CHECK(FindSites(Py("a: int = a + 1"), {TransformRule::kExpressionExchange}).empty());
  CHECK(FindSites(Java("class A { void f() { short s = 1; s += 2; } }"),
                  {TransformRule::kExpressionExchange})
            .empty());
  CHECK(FindSites(Java("class A { void f() { int s = 1; s *= 1.5; } }"),
                  {TransformRule::kExpressionExchange})
            .empty());
}

TEST_CASE("no sites in trivial code") {
  CHECK(FindSites(Py("return 1"), AllTransformRules()).empty());
  CHECK_FALSE(SampleVariant(Py("return 1"), AllTransformRules(), 7).has_value());
}

TEST_CASE("while loop with increment has loop and expression sites") {
  const SourceUnit unit = Py("while i < n: i += 1");
  auto sites = FindSites(unit, {TransformRule::kLoopExchange,
                                TransformRule::kExpressionExchange});
  REQUIRE(sites.size() == 2);
  CHECK(sites[0].anchor.begin <= sites[1].anchor.begin);
  for (const auto& site : sites) {
    CHECK_FALSE(ApplyTransform(unit, site).has_error());
  }
  CHECK(ApplyTransform(unit, sites[0]).text() == "for i in range(i, n): pass");
}

TEST_CASE("condition exchange examples") {
  CHECK(ApplyOnly(Py("a > b"), TransformRule::kConditionExchange).text() == "b < a");
  CHECK(ApplyOnly(Py("x <= y + 1"), TransformRule::kConditionExchange).text() ==
        "y + 1 >= x");
  CHECK(ApplyOnly(Py("flag = True"), TransformRule::kConditionExchange).text() ==
        "flag = (not False)");
  {
    // the literal inside is itself a forward site
    const SourceUnit unit = Py("flag = (not False)");
    auto sites = FindSites(unit, {TransformRule::kConditionExchange});
    REQUIRE(sites.size() == 2);
    CHECK(sites[0].direction == Direction::kBackward);
    CHECK(ApplyTransform(unit, sites[0]).text() == "flag = True");
    CHECK(ApplyTransform(unit, sites[1]).text() == "flag = (not (not True))");
  }
  CHECK(ApplyOnly(Java("class A { boolean f(int a, int b) { return a >= b; } }"),
                  TransformRule::kConditionExchange)
            .text() == "class A { boolean f(int a, int b) { return b <= a; } }");
  CHECK(FindSites(Py("a < b < c"), {TransformRule::kConditionExchange}).empty());
  CHECK(FindSites(Py("a in b"), {TransformRule::kConditionExchange}).empty());
  CHECK(FindSites(Py("f(x) < y"), {TransformRule::kConditionExchange}).empty());
  CHECK(FindSites(Py("a == a"), {TransformRule::kConditionExchange}).empty());
}

TEST_CASE("permute exchange examples") {
  const SourceUnit java =
      Java("class A { void f(boolean a) { if (a) { x(); } else { y(); } } }");
  const SourceUnit permuted = ApplyOnly(java, TransformRule::kPermuteExchange);
  CHECK(permuted.text() ==
        "class A { void f(boolean a) { if (!(a)) { y(); } else { x(); } } }");
  CHECK(ApplyOnly(permuted, TransformRule::kPermuteExchange).text() == java.text());

  const SourceUnit py = Py(
      "if a > 0:\n"
      "    x = 1\n"
      "else:\n"
      "    x = 2\n");
  CHECK(ApplyOnly(py, TransformRule::kPermuteExchange).text() ==
        "if not (a > 0):\n"
        "    x = 2\n"
        "else:\n"
        "    x = 1\n");
  CHECK(FindSites(Py("if a:\n    x = 1\nelif b:\n    x = 2\nelse:\n    x = 3\n"),
                  {TransformRule::kPermuteExchange})
            .empty());
  CHECK(FindSites(Py("if a: x = 1\nelse: x = 2\n"), {TransformRule::kPermuteExchange})
            .empty());
}

TEST_CASE("loop exchange python for to while") {
  const SourceUnit unit = Py(
      "def f(n):\n"
      "    s = 0\n"
      "    for i in range(1, n, 2):\n"
      "        s += i\n"
      "    return s\n");
  CHECK(ApplyOnly(unit, TransformRule::kLoopExchange).text() ==
        "def f(n):\n"
        "    s = 0\n"
        "    i = 1\n"
        "    while i < n:\n"
        "        s += i\n"
        "        i += 2\n"
        "    return s\n");

  const SourceUnit down = Py(
      "def f(n):\n"
      "    for k in range(n, 0, -1):\n"
      "        print(k)\n");
  CHECK(ApplyOnly(down, TransformRule::kLoopExchange).text() ==
        "def f(n):\n"
        "    k = n\n"
        "    while k > 0:\n"
        "        print(k)\n"
        "        k -= 1\n");
}

TEST_CASE("loop exchange python rejects unsafe loops") {
  const RuleSet loop = {TransformRule::kLoopExchange};
  // continue would skip the increment
  CHECK(FindSites(Py("for i in range(n):\n    if i:\n        continue\n    f(i)\n"), loop)
            .empty());
  // loop variable used after the loop
  CHECK(FindSites(Py("def g(n):\n    for i in range(n):\n        f(i)\n    return i\n"), loop)
            .empty());
  // bound mutated inside the body
  CHECK(FindSites(Py("for i in range(len(xs)):\n    xs.append(i)\n"), loop).empty());
  CHECK(FindSites(Py("for i in range(n):\n    n = n - 1\n"), loop).empty());
  // non-range iteration
  CHECK(FindSites(Py("for x in xs:\n    f(x)\n"), loop).empty());
}

TEST_CASE("loop exchange java") {
  const SourceUnit unit = Java(
      "class A { int f(int n) { int s = 0; for (int i = 0; i < n; i++) { s += i; } "
      "return s; } }");
  const SourceUnit out = ApplyOnly(unit, TransformRule::kLoopExchange);
  CHECK(out.text() ==
        "class A { int f(int n) { int s = 0; { int i = 0; while (i < n) { { s += i; } "
        "i++; } } return s; } }");
  const SourceUnit w = Java("class A { void f(int n) { while (n > 0) { n--; } } }");
  CHECK(ApplyOnly(w, TransformRule::kLoopExchange).text() ==
        "class A { void f(int n) { for (; n > 0; ) { n--; } } }");
  CHECK(FindSites(Java("class A { void f(int n) { for (int i = 0; i < n; i++) { if (i > 2) "
                       "continue; g(); } } }"),
                  {TransformRule::kLoopExchange})
            .empty());
}

TEST_CASE("single-site rules are involutions") {
  CheckInvolution(Py("a += b"), TransformRule::kExpressionExchange);
  CheckInvolution(Py("total = total * (k + 1)"), TransformRule::kExpressionExchange);
  CheckInvolution(Py("a > b"), TransformRule::kConditionExchange);
  CheckInvolution(Py("ok = False"), TransformRule::kConditionExchange);
  CheckInvolution(Py("if a:\n    x = 1\nelse:\n    x = 2\n"),
                  TransformRule::kPermuteExchange);
  CheckInvolution(Java("class A { void f(int a) { a >>>= 1; } }"),
                  TransformRule::kExpressionExchange);
  CheckInvolution(Java("class A { boolean f() { return true; } }"),
                  TransformRule::kConditionExchange);
  CheckInvolution(Java("class A { void f(boolean c) { if (c && d) { a(); } else { b(); } } }"),
                  TransformRule::kPermuteExchange);
}

TEST_CASE("sample variant") {
  CHECK(SampleVariant(Py("a += b"), AllTransformRules(), 0)->text() == "a = a + b");

  const SourceUnit unit = Py(
      "def f(xs, n):\n"
      "    t = 0\n"
      "    for i in range(n):\n"
      "        if xs[i] > t:\n"
      "            t += xs[i]\n"
      "        else:\n"
      "            t = t - 1\n"
      "    return t == 3\n");
  const size_t site_count = FindSites(unit, AllTransformRules()).size();
  CHECK(site_count >= 5);
  std::set<std::string> distinct;
  for (uint64_t seed = 0; seed < 40; ++seed) {
    auto a = SampleVariant(unit, AllTransformRules(), seed);
    auto b = SampleVariant(unit, AllTransformRules(), seed);
    REQUIRE(a.has_value());
    CHECK(a->text() == b->text());
    CHECK_FALSE(a->has_error());
    CHECK(Tokens(*a) != Tokens(unit));
    distinct.insert(a->text());
  }
  CHECK(distinct.size() > 10);
}

TEST_CASE("stale sites are rejected") {
  const SourceUnit unit = Py("a += b");
  auto sites = FindSites(unit, AllTransformRules());
  REQUIRE_FALSE(sites.empty());
  try {
    ApplyTransform(Py("a  += b"), sites[0]);
    FAIL("expected StaleSite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kStaleSite);
  }
  try {
    FindSites(Py("def ("), AllTransformRules());
    FAIL("expected ParseErrorInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParseErrorInput);
  }
}

TEST_CASE("rule names") {
  CHECK(ParseRuleSet("all") == AllTransformRules());
  CHECK(ParseRuleSet("loop,condition") ==
        RuleSet{TransformRule::kLoopExchange, TransformRule::kConditionExchange});
  CHECK_THROWS_AS(ParseRuleSet("loop,bogus"), Error);
}
