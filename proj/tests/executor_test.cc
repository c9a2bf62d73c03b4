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

#include <chrono>
#include <functional>

#include "doctest.h"
#include "synth_eval/corpus.h"
#include "synth_eval/error.h"
#include "synth_eval/executor.h"
#include "synth_eval/metrics.h"

using namespace synth_eval;

namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInternalGrammarFailure;
}

const char* kSumA = "def sum(a, b):\n    a = a + b\n    return a\n";
const char* kSumE = "def sum(a, b):\n    a = a - b\n    return a\n";

std::vector<TestCase> Io(std::initializer_list<std::pair<const char*, const char*>> pairs) {
  std::vector<TestCase> tests;
  for (const auto& [in, out] : pairs) tests.push_back({in, out, ""});
  return tests;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

TEST_CASE("processes") {
  TempDir dir;
  const ProcessResult ok = RunProcess({"sh", "-c", "echo out; echo err >&2; exit 3"}, dir.path(), 5);
  CHECK(ok.exit_code == 3);
  CHECK(ok.out == "out\n");
  CHECK(ok.err == "err\n");
  CHECK(!ok.timed_out);

  const auto start = std::chrono::steady_clock::now();
  const ProcessResult slow = RunProcess({"sh", "-c", "sleep 30 & sleep 30"}, dir.path(), 0.3);
  CHECK(slow.timed_out);
  CHECK(slow.exit_code == -1);
  CHECK(Seconds(start) < 5.0);

  CHECK(CodeOf([&] { RunProcess({"/no/such/binary"}, dir.path(), 1); }) ==
        ErrorCode::kSandboxFailure);
}

TEST_CASE("entry points") {
  const SourceUnit unit(Language::kPython, "def helper(x):\n    return x\n\ndef add(a, b):\n    return a + b\n");
  CHECK(ResolveEntryPoint(unit, std::string("add")) == "add");
  CHECK(ResolveEntryPoint(unit, std::string("missing")) == "helper");
  CHECK(ResolveEntryPoint(unit, std::nullopt) == "helper");
  const SourceUnit java(Language::kJava, "static int f(int a) {\n    return a;\n}\n");
  CHECK(ResolveEntryPoint(java, std::string("id")) == "f");
  CHECK(ResolveEntryPoint(SourceUnit(Language::kPython, "x = 1\n"), std::nullopt).empty());
}

TEST_CASE("python tests") {
  SandboxConfig config;
  SUBCASE("identity") {
    const SourceUnit unit(Language::kPython, "def ident(x):\n    return x\n");
    const auto r = ExecuteTests(unit, Io({{"5", "5"}}), config);
    CHECK(r.passed);
    REQUIRE(r.details.size() == 1);
    CHECK(r.details[0].passed);
  }
  SUBCASE("raising on every input") {
    const SourceUnit unit(Language::kPython, "def bad(x):\n    raise ValueError('no')\n");
    const auto r = ExecuteTests(unit, Io({{"1", "1"}, {"2", "2"}}), config);
    CHECK(!r.passed);
    CHECK(r.details[0].message.find("ValueError") != std::string::npos);
  }
  SUBCASE("the subtracting sum fails the sum tests") {
    const auto tests = Io({{"2, 3", "5"}});
    CHECK(ExecuteTests(SourceUnit(Language::kPython, kSumA), tests, config).passed);
    CHECK(!ExecuteTests(SourceUnit(Language::kPython, kSumE), tests, config).passed);
  }
  SUBCASE("renamed functions still answer raw assertions") {
    const SourceUnit unit(Language::kPython, "def f(a, b):\n    return a + b\n");
    const std::vector<TestCase> tests = {{"", "", "assert add(1, 2) == 3"}};
    CHECK(ExecuteTests(unit, tests, config, std::string("add")).passed);
    CHECK(!ExecuteTests(unit, {{"", "", "assert add(1, 2) == 4"}}, config, std::string("add")).passed);
  }
  SUBCASE("timeouts") {
    config.timeout_seconds = 0.5;
    const SourceUnit unit(Language::kPython, "def spin(x):\n    while True:\n        pass\n");
    const auto start = std::chrono::steady_clock::now();
    const auto r = ExecuteTests(unit, Io({{"1", "1"}, {"2", "2"}}), config);
    CHECK(!r.passed);
    CHECK(r.details[0].timed_out);
    CHECK(r.details[1].timed_out);
    CHECK(Seconds(start) < 5.0);

    config.stop_on_failure = true;
    const auto once = ExecuteTests(unit, Io({{"1", "1"}, {"2", "2"}}), config);
    CHECK(once.details[0].timed_out);
    CHECK(!once.details[1].timed_out);
    CHECK(once.details[1].message == "not run");
  }
  SUBCASE("missing interpreter") {
    config.python = "no-such-python-interpreter";
    CHECK(CodeOf([&] { ExecuteTests(SourceUnit(Language::kPython, kSumA), Io({{"1, 1", "2"}}), config); }) ==
          ErrorCode::kRuntimeUnavailable);
  }
}

TEST_CASE("java tests") {
  SandboxConfig config;
  REQUIRE_MESSAGE(!FindJava(config).empty(), "a java runtime is required");
  config.timeout_seconds = 1.0;

  SUBCASE("identity and exceptions") {
    const auto r = ExecuteTestsBatch(
        {SourceUnit(Language::kJava, "static int ident(int x) {\n    return x;\n}\n"),
         SourceUnit(Language::kJava, "static int bad(int x) {\n    throw new RuntimeException(\"no\");\n}\n")},
        Io({{"5", "5"}}), config);
    REQUIRE(r.size() == 2);
    CHECK(r[0].passed);
    CHECK(!r[1].passed);
    CHECK(r[1].details[0].message.find("RuntimeException") != std::string::npos);
  }
  SUBCASE("numeric, boolean, string and array results") {
    const SourceUnit unit(Language::kJava,
                          "static long twice(int x) {\n    return 2L * x;\n}\n"
                          "static boolean even(int x) {\n    return x % 2 == 0;\n}\n"
                          "static String name() {\n    return \"ab\";\n}\n"
                          "static int[] pair(int x) {\n    return new int[] {x, x};\n}\n");
    const std::vector<TestCase> tests = {{"4", "8", ""},
                                         {"", "", "even(4) && !even(3)"},
                                         {"", "", "name().equals(\"ab\")"},
                                         {"", "", "java.util.Arrays.equals(pair(3), new int[] {3, 3})"}};
    CHECK(ExecuteTests(unit, tests, config).passed);
    CHECK(!ExecuteTests(unit, {{"4", "9", ""}}, config).passed);
  }
  SUBCASE("the subtracting sum fails the sum tests") {
    const auto tests = Io({{"2, 3", "5"}});
    const auto r = ExecuteTestsBatch(
        {SourceUnit(Language::kJava, "static int sum(int a, int b) {\n    a = a + b;\n    return a;\n}\n"),
         SourceUnit(Language::kJava, "static int sum(int a, int b) {\n    a = a - b;\n    return a;\n}\n")},
        tests, config);
    CHECK(r[0].passed);
    CHECK(!r[1].passed);
    CHECK(r[1].details[0].message == "wrong output");
  }
  SUBCASE("a stuck or broken unit does not take the batch down") {
    const auto r = ExecuteTestsBatch(
        {SourceUnit(Language::kJava, "static int f(int a) {\n    while (a > 0) {\n        a = 1 + a % 7;\n    }\n    return a;\n}\n"),
         SourceUnit(Language::kJava, "static int f(int a) {\n    return a - true;\n}\n"),
         SourceUnit(Language::kJava, "static int f(int a) {\n    return f(a) + 1;\n}\n"),
         SourceUnit(Language::kJava, "static int f(int a) {\n    return a + 1;\n}\n")},
        Io({{"1", "2"}, {"5", "6"}}), config, std::string("inc"));
    REQUIRE(r.size() == 4);
    CHECK(!r[0].passed);
    CHECK(r[0].details[0].timed_out);
    CHECK(r[0].details[1].message == "not run");
    CHECK(!r[1].passed);
    CHECK(r[1].details[0].message.rfind("compile error", 0) == 0);
    CHECK(!r[2].passed);
    CHECK(r[2].details[0].message.find("StackOverflowError") != std::string::npos);
    CHECK(r[3].passed);
  }
  SUBCASE("mixed languages and missing runtimes") {
    CHECK(CodeOf([&] {
            ExecuteTestsBatch({SourceUnit(Language::kJava, "static int f() {\n    return 1;\n}\n"),
                               SourceUnit(Language::kPython, kSumA)},
                              Io({{"", "1"}}), config);
          }) == ErrorCode::kInvalidArgument);
    config.java = "/no/such/java";
    CHECK(CodeOf([&] {
            ExecuteTests(SourceUnit(Language::kJava, "static int f() {\n    return 1;\n}\n"),
                         Io({{"", "1"}}), config);
          }) == ErrorCode::kRuntimeUnavailable);
  }
}

TEST_CASE("demo corpus labels agree with the oracle") {
  const auto records = ReadCorpusFile(DataDir() + "/corpus/demo.jsonl");
  REQUIRE(records.size() == 30);
  SandboxConfig config;
  config.stop_on_failure = true;
  const TestOracle oracle = MakeExecutionOracle(config);
  size_t python = 0, java = 0;
  for (const CorpusRecord& r : records) {
    (r.lang == Language::kPython ? python : java) += 1;
    CHECK_MESSAGE(oracle(r, r.ReferenceUnit()), r.id);
    const SourceUnit pred = r.PredictionUnit();
    const bool passes = !pred.has_error() && oracle(r, pred);
    CHECK_MESSAGE(passes == (*r.pass1 == 1), r.id);
  }
  CHECK(python == 15);
  CHECK(java == 15);

  CorpusRecord untested = records.front();
  untested.tests.reset();
  CHECK(CodeOf([&] { oracle(untested, untested.ReferenceUnit()); }) == ErrorCode::kMissingTests);
}
