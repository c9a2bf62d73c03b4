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

#include "synth_eval/mutator.h"

#include <set>
#include <string>

#include "doctest.h"
#include "synth_eval/error.h"

using namespace synth_eval;

namespace {

SourceUnit Py(std::string text) { return SourceUnit(Language::kPython, std::move(text)); }
SourceUnit Java(std::string text) { return SourceUnit(Language::kJava, std::move(text)); }

CorpusRecord Passing(int i) {
  CorpusRecord r;
  r.id = "r" + std::to_string(i);
  r.lang = Language::kPython;
  r.reference = "def f(a, b):\n    return a + b\n";
  r.prediction = r.reference;
  r.pass1 = 1;
  r.tests = std::vector<TestCase>{{"1, 2", "3", ""}};
  return r;
}

}  // namespace

TEST_CASE("sum example arithmetic mutant is reachable") {
  std::set<std::string> seen;
  for (uint64_t seed = 0; seed < 50; ++seed) {
    auto mutant = MutateUnit(Py("a = a + b"), {OperatorClass::kArithmetic}, seed);
    REQUIRE(mutant.has_value());
    seen.insert(mutant->text());
  }
  CHECK(seen.count("a = a - b") == 1);
  CHECK(seen == std::set<std::string>{"a = a - b", "a = a * b", "a = a / b",
                                      "a = a ** b", "a = a % b"});
}

TEST_CASE("no operators means no mutant") {
  CHECK_FALSE(MutateUnit(Py("return 1"), AllOperatorClasses(), 3).has_value());
  CHECK_FALSE(MutateUnit(Java("class A { void f() { g(); } }"), AllOperatorClasses(), 3)
                  .has_value());
  CHECK_THROWS_AS(MutateUnit(Py("def (:"), AllOperatorClasses(), 0), Error);
}

TEST_CASE("relational replacement set") {
  std::set<std::string> seen;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    seen.insert(MutateUnit(Py("x > y"), {OperatorClass::kRelational}, seed)->text());
  }
  CHECK(seen == std::set<std::string>{"x < y", "x >= y", "x <= y", "x == y", "x != y"});
}

TEST_CASE("inventories are filtered per language") {
  auto has = [](Language lang, OperatorClass cls, std::string_view op) {
    const auto& ops = OperatorInventory(lang, cls);
    return std::find(ops.begin(), ops.end(), op) != ops.end();
  };
  CHECK(has(Language::kPython, OperatorClass::kArithmetic, "**"));
  CHECK_FALSE(has(Language::kJava, OperatorClass::kArithmetic, "**"));
  CHECK_FALSE(has(Language::kPython, OperatorClass::kShift, ">>>"));
  CHECK(has(Language::kJava, OperatorClass::kShift, ">>>"));
  CHECK(OperatorInventory(Language::kPython, OperatorClass::kConditional).empty());
  CHECK(has(Language::kJava, OperatorClass::kConditional, "||"));
}

TEST_CASE("sites and class restriction") {
  const SourceUnit unit = Py(
      "def f(a, b):\n"
      "    c = a << 2\n"
      "    c += b & 1\n"
      "    return c > a and b\n");
  auto all = FindMutationSites(unit, AllOperatorClasses());
  std::vector<std::string_view> ops;
  for (const auto& s : all) ops.push_back(s.op);
  CHECK(ops == std::vector<std::string_view>{"=", "<<", "+=", "&", ">"});
  CHECK(FindMutationSites(unit, {OperatorClass::kShift}).size() == 1);
  // annotated, chained and unpacking assignments are not sites
  CHECK(FindMutationSites(Py("x: int = 1\na = b = 2\np, q = 1, 2\n"),
                          {OperatorClass::kAssignment})
            .empty());
  CHECK(FindMutationSites(Py("x = -y"), {OperatorClass::kArithmetic}).empty());
}

TEST_CASE("java mutants parse and stay in class") {
  const SourceUnit unit = Java(
      "static int f(int a, int b) { int s = 0; if (a > 0 && b > 0) { s += a >> 1; } "
      "return s * b; }");
  for (uint64_t seed = 0; seed < 60; ++seed) {
    auto mutant = MutateUnit(unit, AllOperatorClasses(), seed);
    REQUIRE(mutant.has_value());
    CHECK_FALSE(mutant->has_error());
    CHECK(Tokenize(*mutant) != Tokenize(unit));
    CHECK(Tokenize(*mutant).size() == Tokenize(unit).size());
    CHECK(mutant->text().find("**") == std::string::npos);
  }
}

TEST_CASE("mutate unit is deterministic") {
  const SourceUnit unit = Py("def g(x, y):\n    return x * y - x % 3\n");
  for (uint64_t seed = 0; seed < 10; ++seed) {
    CHECK(MutateUnit(unit, AllOperatorClasses(), seed)->text() ==
          MutateUnit(unit, AllOperatorClasses(), seed)->text());
  }
}

TEST_CASE("mutate corpus") {
  std::vector<CorpusRecord> corpus;
  for (int i = 0; i < 8; ++i) corpus.push_back(Passing(i));
  CorpusRecord failing = Passing(8);
  failing.pass1 = 0;
  corpus.push_back(failing);
  const TestOracle kills_all = [](const CorpusRecord&, const SourceUnit&) { return false; };
  const TestOracle kills_none = [](const CorpusRecord&, const SourceUnit&) { return true; };

  SUBCASE("ratio zero is identity") {
    CHECK(MutateCorpus(corpus, {0.0, 1}, kills_all) == corpus);
  }
  SUBCASE("quarter of eight passing records") {
    MutationStats stats;
    auto out = MutateCorpus(corpus, {0.25, 4}, kills_all, &stats);
    int changed = 0;
    for (size_t i = 0; i < out.size(); ++i) {
      if (!(out[i] == corpus[i])) {
        ++changed;
        CHECK(out[i].pass1 == 0);
        CHECK(out[i].prediction != corpus[i].prediction);
      }
    }
    CHECK(changed == 2);
    CHECK(stats.selected == 2);
    CHECK(stats.killed == 2);
  }
  SUBCASE("full ratio flips every passing label") {
    auto out = MutateCorpus(corpus, {1.0, 4}, kills_all);
    for (const auto& r : out) CHECK(r.pass1 == 0);
  }
  SUBCASE("equivalent mutants are left alone and logged") {
    MutationStats stats;
    int calls = 0;
    const TestOracle counting = [&](const CorpusRecord&, const SourceUnit&) {
      ++calls;
      return true;
    };
    auto out = MutateCorpus(corpus, {0.5, 9}, counting, &stats);
    CHECK(out == corpus);
    CHECK(stats.equivalent.size() == 4);
    CHECK(calls == 4 * 6);
    (void)kills_none;
  }
  SUBCASE("labels only flip from one to zero") {
    int n = 0;
    const TestOracle alternate = [&](const CorpusRecord&, const SourceUnit&) {
      return (n++ % 2) == 0;
    };
    auto out = MutateCorpus(corpus, {0.75, 2}, alternate);
    for (size_t i = 0; i < out.size(); ++i) {
      if (corpus[i].pass1 == 0) CHECK(out[i].pass1 == 0);
    }
  }
  SUBCASE("deterministic") {
    CHECK(MutateCorpus(corpus, {0.5, 11}, kills_all) ==
          MutateCorpus(corpus, {0.5, 11}, kills_all));
  }
  SUBCASE("missing tests") {
    corpus[0].tests.reset();
    CHECK_THROWS_AS(MutateCorpus(corpus, {1.0, 0}, kills_all), Error);
  }
  SUBCASE("bad ratio") {
    CHECK_THROWS_AS(MutateCorpus(corpus, {1.5, 0}, kills_all), Error);
  }
}
