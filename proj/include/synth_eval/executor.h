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


#ifndef SYNTH_EVAL_EXECUTOR_H_
#define SYNTH_EVAL_EXECUTOR_H_

#include <optional>
#include <string>
#include <vector>

#include "synth_eval/code_model.h"
#include "synth_eval/corpus.h"
#include "synth_eval/mutator.h"

namespace synth_eval {

struct ProcessResult {
  int exit_code = -1;  // -1 when killed by a signal or the timeout
  bool timed_out = false;
  std::string out;
  std::string err;
};

// Runs argv[0] (looked up on PATH) in its own process group inside `cwd`,
// killing the whole group after `timeout_seconds`. Output is captured through
// files in `cwd`. Throws kSandboxFailure when the process cannot be started.
ProcessResult RunProcess(const std::vector<std::string>& argv, const std::string& cwd,
                         double timeout_seconds, long memory_limit_mb = 0);

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct SandboxConfig {
  double timeout_seconds = 5.0;
  long memory_limit_mb = 1024;  // Python only; the JVM reserves more
  std::string python = "python3";
  // Empty: $SYNTH_EVAL_JAVA, then `java` on PATH, then the jdk4py runtime.
  std::string java;
  // Directory with the Janino jars. Empty: $SYNTH_EVAL_JANINO_DIR, then the
  // vendored copy.
  std::string janino_dir;
  // JVM start-up allowance added to the hard per-JVM budget.
  double jvm_startup_seconds = 20.0;
  // Skip the remaining tests of a unit after its first failure.
  bool stop_on_failure = false;
};

struct TestDetail {
  bool passed = false;
  bool timed_out = false;
  std::string message;
};

struct ExecutionResult {
  bool passed = false;
  std::vector<TestDetail> details;
};

// Name of the function the tests call: `entry_point` when the unit defines
// it, otherwise the first function. Empty when the unit defines none.
std::string ResolveEntryPoint(const SourceUnit& unit,
                              const std::optional<std::string>& entry_point);

// Python: one script per test (unit, alias, then `assert entry(input) ==
// output` or the raw assertion statement). Java: the unit becomes a class
// body compiled by Janino inside a driver JVM; each test (`entry(input)`
// against `output`, or a raw boolean expression) runs on a watchdog thread.
// Throws kRuntimeUnavailable, kSandboxFailure.
ExecutionResult ExecuteTests(const SourceUnit& unit, const std::vector<TestCase>& tests,
                             const SandboxConfig& config,
                             const std::optional<std::string>& entry_point = std::nullopt);

// Same tests against several units of one language. Java units share a JVM
// until one of them times out.
std::vector<ExecutionResult> ExecuteTestsBatch(const std::vector<SourceUnit>& units,
                                               const std::vector<TestCase>& tests,
                                               const SandboxConfig& config,
                                               const std::optional<std::string>& entry_point =
                                                   std::nullopt);

// Oracle for MutateCorpus: true when the unit passes all of the record's tests.
TestOracle MakeExecutionOracle(const SandboxConfig& config);

// Generated sources, exposed for inspection and tests.
std::string PythonTestScript(const SourceUnit& unit, const TestCase& test,
                             const std::string& entry, const std::optional<std::string>& alias);
std::string JavaClassBody(const SourceUnit& unit, const std::vector<TestCase>& tests,
                          const std::string& entry, const std::optional<std::string>& alias,
                          const SandboxConfig& config);

// Path of the java launcher per the lookup order above; empty when none.
std::string FindJava(const SandboxConfig& config);

}  // namespace synth_eval

#endif  // SYNTH_EVAL_EXECUTOR_H_
