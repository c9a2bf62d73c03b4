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

#include "synth_eval/sketcher.h"

#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "synth_eval/error.h"

namespace synth_eval {
namespace {

std::string SketchText(Language lang, const std::string& text) {
  return Sketch(SourceUnit(lang, text)).unit.text();
}

const std::vector<std::string> kPythonSamples = {
    "def sum (a , b) :\n    a = a + b\n    return a\n",
    "def g(x):\n    y = x\n    return y\n",
    "def count_even(xs, limit=10):\n    total = 0\n    for i in range(len(xs)):\n"
    "        if xs[i] % 2 == 0 and total < limit:\n            total += 1\n"
    "    return total\n",
    "def pairs(n):\n    out = []\n    for a, b in zip(range(n), range(1, n + 1)):\n"
    "        out.append((a, b))\n    return [p for p in out if p[0] < n]\n",
    "def outer(k, *rest, **opts):\n    def inner(z):\n        return z * k\n"
    "    acc = [inner(v) for v in rest]\n    return sorted(acc, key=lambda t: -t)\n",
};

const std::vector<std::string> kJavaSamples = {
    "class Solution {\n    public int sum(int a, int b) {\n        a += b;\n"
    "        return a;\n    }\n}\n",
    "class Solution {\n    public static int countEven(int[] xs, int limit) {\n"
    "        int total = 0;\n        for (int i = 0; i < xs.length; i++) {\n"
    "            if (xs[i] % 2 == 0 && total < limit) { total++; }\n        }\n"
    "        for (int v : xs) { total = total + helper(v); }\n"
    "        return total;\n    }\n"
    "    static int helper(int v) { return Math.abs(v) > 3 ? 1 : 0; }\n}\n",
};

TEST_CASE("sketch follows the naming convention on the sum example") {
  CHECK(SketchText(Language::kPython,
                   "def sum (a , b) :\n    a = a + b\n    return a") ==
        "def f (arg_0 , arg_1) :\n    arg_0 = arg_0 + arg_1\n    return arg_0");
}

TEST_CASE("sketch leaves code without user identifiers unchanged") {
  CHECK(SketchText(Language::kPython, "return 1 + 2") == "return 1 + 2");
}

TEST_CASE("sketch numbers parameters before locals") {
  CHECK(SketchText(Language::kPython, "def g(x):\n    y = x\n    return y") ==
        "def f(arg_0):\n    var_0 = arg_0\n    return var_0");
  const auto result =
      Sketch(SourceUnit(Language::kPython, "def h(b, a):\n    c = a\n    d = b\n"));
  CHECK(result.map.entries() ==
        std::vector<std::pair<std::string, std::string>>{
            {"h", "f"}, {"b", "arg_0"}, {"a", "arg_1"}, {"c", "var_0"}, {"d", "var_1"}});
  CHECK(result.map.parameter_count() == 2);
  CHECK(result.map.variable_count() == 2);
}

TEST_CASE("sketch keeps attributes, builtins and imports") {
  CHECK(SketchText(Language::kPython,
                   "import math\ndef g(xs):\n    r = math.sqrt(len(xs))\n"
                   "    xs.append(r)\n    return xs.count\n") ==
        "import math\ndef f(arg_0):\n    var_0 = math.sqrt(len(arg_0))\n"
        "    arg_0.append(var_0)\n    return arg_0.count\n");
}

TEST_CASE("keyword arguments follow local callees only") {
  CHECK(SketchText(Language::kPython,
                   "def g(x, y=1):\n    return x + y\ndef h(v):\n"
                   "    return g(v, y=2) + sorted([v], reverse=True)[0]\n") ==
        "def f(arg_0, arg_1=1):\n    return arg_0 + arg_1\ndef f(arg_2):\n"
        "    return f(arg_2, arg_1=2) + sorted([arg_2], reverse=True)[0]\n");
}

TEST_CASE("java sketch renames methods, parameters and locals") {
  CHECK(SketchText(Language::kJava,
                   "class Solution {\n  int total;\n  public int sum(int a, int b) {\n"
                   "    int s = a + b;\n    for (int v : arr) { s += v; }\n"
                   "    this.total = s;\n    return helper(s) + Math.max(s, a);\n  }\n"
                   "  int helper(int q) { return q; }\n}\n") ==
        "class Solution {\n  int total;\n  public int f(int arg_0, int arg_1) {\n"
        "    int var_0 = arg_0 + arg_1;\n    for (int var_1 : arr) { var_0 += var_1; }\n"
        "    this.total = var_0;\n    return f(var_0) + Math.max(var_0, arg_0);\n  }\n"
        "  int f(int arg_2) { return arg_2; }\n}\n");
}

TEST_CASE("sketch rejects unparsable input") {
  try {
    Sketch(SourceUnit(Language::kPython, "def f(: return"));
    FAIL("expected ParseErrorInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParseErrorInput);
  }
}

TEST_CASE("sketch is idempotent and its output parses") {
  for (const auto& text : kPythonSamples) {
    const SourceUnit once = Sketch(SourceUnit(Language::kPython, text)).unit;
    CHECK_FALSE(once.has_error());
    CHECK(Sketch(once).unit.text() == once.text());
  }
  for (const auto& text : kJavaSamples) {
    const SourceUnit once = Sketch(SourceUnit(Language::kJava, text)).unit;
    CHECK_FALSE(once.has_error());
    CHECK(Sketch(once).unit.text() == once.text());
  }
}

TEST_CASE("sketch is invariant under consistent renaming") {
  auto check = [](Language lang, const std::string& text) {
    const SourceUnit unit(lang, text);
    const SketchResult base = Sketch(unit);
    for (uint64_t seed = 0; seed < 25; ++seed) {
      const SourceUnit renamed = RenameIdentifiers(unit, RandomRenaming(unit, seed));
      CHECK_FALSE(renamed.has_error());
      const SketchResult again = Sketch(renamed);
      CHECK(again.unit.text() == base.unit.text());
    }
  };
  for (const auto& text : kPythonSamples) check(Language::kPython, text);
  for (const auto& text : kJavaSamples) check(Language::kJava, text);
}

TEST_CASE("random renaming is injective and changes every user name") {
  const SourceUnit unit(Language::kPython, kPythonSamples[2]);
  const auto renaming = RandomRenaming(unit, 3);
  std::set<std::string> targets;
  for (const auto& [from, to] : renaming) {
    CHECK(from != to);
    CHECK(targets.insert(to).second);
  }
  CHECK(renaming.size() == UserIdentifiers(unit).size());
  CHECK(RandomRenaming(unit, 3) == renaming);
}

TEST_CASE("classification of definition sites") {
  const SourceUnit unit(Language::kPython,
                        "def g(p, q=1):\n    (a, b) = p, q\n    for c in p: pass\n"
                        "    if (d := 3): pass\n    return a\n");
  std::map<std::string, IdentifierClass> seen;
  for (const auto& [name, cls] : UserIdentifiers(unit)) seen[name] = cls;
  CHECK(seen.at("g") == IdentifierClass::kFunctionName);
  CHECK(seen.at("p") == IdentifierClass::kParameter);
  CHECK(seen.at("q") == IdentifierClass::kParameter);
  CHECK(seen.at("a") == IdentifierClass::kLocalVariable);
  CHECK(seen.at("b") == IdentifierClass::kLocalVariable);
  CHECK(seen.at("c") == IdentifierClass::kLocalVariable);
  CHECK(seen.at("d") == IdentifierClass::kLocalVariable);
}

}  // namespace
}  // namespace synth_eval
