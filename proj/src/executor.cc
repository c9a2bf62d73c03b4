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

#include "synth_eval/executor.h"

#include <fcntl.h>
#include <signal.h>
#include <stdlib.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "synth_eval/error.h"

namespace synth_eval {
namespace fs = std::filesystem;
namespace {

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::kSandboxFailure, "cannot write " + path.string());
}

bool Executable(const std::string& path) {
  return !path.empty() && ::access(path.c_str(), X_OK) == 0 && !fs::is_directory(path);
}

std::string SearchPath(const std::string& name) {
  if (name.find('/') != std::string::npos) return Executable(name) ? name : "";
  const char* path = std::getenv("PATH");
  if (path == nullptr) return "";
  std::stringstream dirs(path);
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    if (dir.empty()) continue;
    const std::string candidate = dir + "/" + name;
    if (Executable(candidate)) return candidate;
  }
  return "";
}

std::string Trim(std::string s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::string FirstFunction(const SourceUnit& unit) {
  const SyntaxTree& tree = unit.tree();
  const std::string_view kind =
      unit.language() == Language::kPython ? "function_definition" : "method_declaration";
  for (NodeId id = 0; id < tree.size(); ++id) {
    if (tree[id].kind != kind) continue;
    const NodeId name = tree.ChildByField(id, "name");
    if (name != kNoNode) return std::string(unit.TextOf(name));
  }
  return "";
}

bool DefinesFunction(const SourceUnit& unit, const std::string& name) {
  const SyntaxTree& tree = unit.tree();
  for (NodeId id = 0; id < tree.size(); ++id) {
    if (tree[id].kind != "function_definition" && tree[id].kind != "method_declaration") {
      continue;
    }
    const NodeId n = tree.ChildByField(id, "name");
    if (n != kNoNode && unit.TextOf(n) == name) return true;
  }
  return false;
}

std::string JaninoClasspath(const SandboxConfig& config) {
  std::string dir = config.janino_dir;
  if (dir.empty()) {
    const char* env = std::getenv("SYNTH_EVAL_JANINO_DIR");
    dir = env != nullptr && *env != '\0' ? env : SYNTH_EVAL_JANINO_DIR;
  }
  std::vector<std::string> jars;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.path().extension() == ".jar") jars.push_back(entry.path().string());
  }
  std::sort(jars.begin(), jars.end());
  std::string cp;
  for (const auto& jar : jars) cp += (cp.empty() ? "" : ":") + jar;
  return cp;
}

ExecutionResult RunPython(const SourceUnit& unit, const std::vector<TestCase>& tests,
                          const SandboxConfig& config, const std::string& entry,
                          const std::optional<std::string>& alias) {
  const std::string python = SearchPath(config.python);
  if (python.empty()) {
    throw Error(ErrorCode::kRuntimeUnavailable, "python interpreter not found: " + config.python);
  }
  ExecutionResult result;
  result.passed = true;
  TempDir dir;
  for (size_t k = 0; k < tests.size(); ++k) {
    const std::string file = fmt::format("test_{}.py", k);
    WriteFile(fs::path(dir.path()) / file, PythonTestScript(unit, tests[k], entry, alias));
    const ProcessResult run = RunProcess({python, "-I", "-B", file}, dir.path(),
                                         config.timeout_seconds, config.memory_limit_mb);
    TestDetail detail;
    detail.timed_out = run.timed_out;
    detail.passed = !run.timed_out && run.exit_code == 0;
    if (run.timed_out) {
      detail.message = "timeout";
    } else if (!detail.passed) {
      const std::string err = Trim(run.err);
      const auto last = err.rfind('\n');
      detail.message = last == std::string::npos ? err : err.substr(last + 1);
    }
    result.passed = result.passed && detail.passed;
    result.details.push_back(std::move(detail));
    if (!result.passed && config.stop_on_failure) {
      result.details.resize(tests.size(), TestDetail{false, false, "not run"});
      break;
    }
  }
  return result;
}

constexpr const char* kJavaDriver = R"(import org.codehaus.janino.ClassBodyEvaluator;

public class Main {
    public static void main(String[] args) throws Exception {
        for (int i = 0; i < args.length; i++) {
            String u = args[i];
            Class c;
            try {
                String src = new String(java.nio.file.Files.readAllBytes(
                    java.nio.file.Paths.get("unit_" + u + ".java")), "UTF-8");
                ClassBodyEvaluator cbe = new ClassBodyEvaluator();
                cbe.cook(src);
                c = cbe.getClazz();
            } catch (Throwable e) {
                System.out.println("__SE__ " + u + " COMPILE " + String.valueOf(e).replace('\n', ' '));
                continue;
            }
            c.getMethod("__run", new Class[] {String.class}).invoke(null, new Object[] {u});
            System.out.println("__SE__ " + u + " DONE");
            System.out.flush();
        }
    }
}
)";

struct JavaLine {
  size_t unit = 0;
  std::string tag;  // test index, "COMPILE" or "DONE"
  std::string status;
  std::string message;
};

std::vector<JavaLine> ParseJavaOutput(const std::string& out) {
  static const std::regex kLine(R"(^__SE__ (\d+) (\S+)\s?(\S*)\s?(.*)$)");
  std::vector<JavaLine> lines;
  std::istringstream in(out);
  std::string line;
  while (std::getline(in, line)) {
    std::smatch m;
    if (!std::regex_match(line, m, kLine)) continue;
    lines.push_back({std::stoul(m[1].str()), m[2].str(), m[3].str(), m[4].str()});
  }
  return lines;
}

std::vector<ExecutionResult> RunJava(const std::vector<SourceUnit>& units,
                                     const std::vector<TestCase>& tests,
                                     const SandboxConfig& config,
                                     const std::optional<std::string>& alias) {
  const std::string java = FindJava(config);
  if (java.empty()) throw Error(ErrorCode::kRuntimeUnavailable, "no java runtime found");
  const std::string cp = JaninoClasspath(config);
  if (cp.empty()) throw Error(ErrorCode::kRuntimeUnavailable, "Janino jars not found");
  TempDir dir;
  WriteFile(fs::path(dir.path()) / "Main.java", kJavaDriver);
  for (size_t u = 0; u < units.size(); ++u) {
    const std::string entry = ResolveEntryPoint(units[u], alias);
    WriteFile(fs::path(dir.path()) / fmt::format("unit_{}.java", u),
              JavaClassBody(units[u], tests, entry, alias, config));
  }

  std::vector<ExecutionResult> results(units.size());
  for (auto& r : results) r.details.assign(tests.size(), TestDetail{false, false, "not run"});
  std::vector<bool> finished(units.size(), false);
  size_t next = 0;
  while (next < units.size()) {
    std::vector<std::string> argv = {java, "-Xss8m", "-XX:+UseSerialGC",
                                     "-XX:TieredStopAtLevel=1", "-cp", cp,
                                     "org.codehaus.janino.SimpleCompiler", "Main.java", "Main"};
    for (size_t u = next; u < units.size(); ++u) argv.push_back(std::to_string(u));
    const double budget = config.jvm_startup_seconds +
                          config.timeout_seconds * static_cast<double>(tests.size()) *
                              static_cast<double>(units.size() - next);
    const ProcessResult run = RunProcess(argv, dir.path(), budget);
    for (const JavaLine& line : ParseJavaOutput(run.out)) {
      if (line.unit >= units.size()) continue;
      ExecutionResult& r = results[line.unit];
      if (line.tag == "DONE") {
        finished[line.unit] = true;
      } else if (line.tag == "COMPILE") {
        finished[line.unit] = true;
        for (auto& d : r.details) d.message = "compile error: " + line.status + " " + line.message;
      } else {
        const size_t k = std::stoul(line.tag);
        if (k >= tests.size()) continue;
        TestDetail& d = r.details[k];
        d.passed = line.status == "PASS";
        d.timed_out = line.status == "TIMEOUT";
        d.message = d.passed ? "" : d.timed_out ? "timeout" : line.message;
        if (d.timed_out) finished[line.unit] = true;
      }
    }
    const size_t before = next;
    while (next < units.size() && finished[next]) ++next;
    if (next == before) {
      // The JVM made no progress on this unit; charge it the failure.
      const std::string why = run.timed_out ? "timeout" : Trim(run.err).substr(0, 500);
      for (auto& d : results[next].details) {
        if (d.message == "not run") {
          d.message = why;
          d.timed_out = run.timed_out;
        }
      }
      finished[next] = true;
      ++next;
    }
  }
  for (auto& r : results) {
    r.passed = true;
    for (const auto& d : r.details) r.passed = r.passed && d.passed;
  }
  return results;
}

}  // namespace

TempDir::TempDir() {
  std::string pattern = (fs::temp_directory_path() / "synth-eval-XXXXXX").string();
  if (::mkdtemp(pattern.data()) == nullptr) {
    throw Error(ErrorCode::kSandboxFailure,
                std::string("cannot create a temporary directory: ") + std::strerror(errno));
  }
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

ProcessResult RunProcess(const std::vector<std::string>& argv, const std::string& cwd,
                         double timeout_seconds, long memory_limit_mb) {
  if (argv.empty()) throw Error(ErrorCode::kInvalidArgument, "empty command");
  const std::string out_path = (fs::path(cwd) / ".stdout").string();
  const std::string err_path = (fs::path(cwd) / ".stderr").string();
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  int status_pipe[2];
  if (::pipe2(status_pipe, O_CLOEXEC) != 0) {
    throw Error(ErrorCode::kSandboxFailure, std::string("pipe: ") + std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(status_pipe[0]);
    ::close(status_pipe[1]);
    throw Error(ErrorCode::kSandboxFailure, std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    int fail = 0;
    const int in = ::open("/dev/null", O_RDONLY);
    const int out = ::open(out_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
    const int err = ::open(err_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
    if (in < 0 || out < 0 || err < 0 || ::dup2(in, 0) < 0 || ::dup2(out, 1) < 0 ||
        ::dup2(err, 2) < 0 || ::chdir(cwd.c_str()) != 0) {
      fail = errno;
    }
    if (fail == 0 && memory_limit_mb > 0) {
      const rlim_t bytes = static_cast<rlim_t>(memory_limit_mb) * 1024 * 1024;
      const rlimit limit{bytes, bytes};
      ::setrlimit(RLIMIT_AS, &limit);
    }
    if (fail == 0) {
      ::execvp(args[0], args.data());
      fail = errno;
    }
    [[maybe_unused]] ssize_t n = ::write(status_pipe[1], &fail, sizeof(fail));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(status_pipe[1]);
  int child_errno = 0;
  const ssize_t got = ::read(status_pipe[0], &child_errno, sizeof(child_errno));
  ::close(status_pipe[0]);

  ProcessResult result;
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(timeout_seconds);
  auto pause = std::chrono::microseconds(200);
  int status = 0;
  for (;;) {
    const pid_t done = ::waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (done < 0 && errno != EINTR) {
      ::kill(-pid, SIGKILL);
      throw Error(ErrorCode::kSandboxFailure, std::string("waitpid: ") + std::strerror(errno));
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      result.timed_out = true;
      ::kill(-pid, SIGKILL);
      while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
      }
      break;
    }
    std::this_thread::sleep_for(pause);
    pause = std::min(pause * 2, std::chrono::microseconds(10000));
  }
  ::kill(-pid, SIGKILL);  // stray descendants
  if (got == static_cast<ssize_t>(sizeof(child_errno)) && child_errno != 0) {
    throw Error(ErrorCode::kSandboxFailure,
                fmt::format("cannot run {}: {}", argv[0], std::strerror(child_errno)));
  }
  if (!result.timed_out && WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  result.out = ReadFile(out_path);
  result.err = ReadFile(err_path);
  return result;
}

std::string ResolveEntryPoint(const SourceUnit& unit,
                              const std::optional<std::string>& entry_point) {
  if (entry_point && DefinesFunction(unit, *entry_point)) return *entry_point;
  return FirstFunction(unit);
}

std::string PythonTestScript(const SourceUnit& unit, const TestCase& test,
                             const std::string& entry, const std::optional<std::string>& alias) {
  std::string script = "import sys\nsys.setrecursionlimit(10000)\n\n";
  script += unit.text();
  if (!script.empty() && script.back() != '\n') script += '\n';
  script += "\n";
  if (alias && *alias != entry) script += *alias + " = " + entry + "\n";
  if (test.is_assertion()) {
    script += test.assertion + "\n";
  } else {
    script += fmt::format("assert {}({}) == ({})\n", entry, test.input, test.output);
  }
  return script;
}

std::string JavaClassBody(const SourceUnit& unit, const std::vector<TestCase>& tests,
                          const std::string& entry, const std::optional<std::string>& alias,
                          const SandboxConfig& config) {
  std::string body = unit.text();
  if (!body.empty() && body.back() != '\n') body += '\n';
  body += fmt::format(R"(
static volatile String __result;

static boolean __same(Object a, Object b) {{
    if (a instanceof Number && b instanceof Number) {{
        if (a instanceof Double || a instanceof Float || b instanceof Double || b instanceof Float) {{
            return ((Number) a).doubleValue() == ((Number) b).doubleValue();
        }}
        return ((Number) a).longValue() == ((Number) b).longValue();
    }}
    return java.util.Objects.deepEquals(a, b);
}}

static boolean __test(String u, int k, Runnable r) throws Exception {{
    __result = "FAIL no result";
    Thread t = new Thread(null, r, "test", 1L << 26);
    t.setDaemon(true);
    t.start();
    t.join({});
    if (t.isAlive()) {{
        System.out.println("__SE__ " + u + " " + k + " TIMEOUT");
        System.out.flush();
        Runtime.getRuntime().halt(3);
    }}
    System.out.println("__SE__ " + u + " " + k + " " + __result);
    return __result.equals("PASS");
}}

public static void __run(String u) throws Exception {{
)",
                      static_cast<long>(config.timeout_seconds * 1000.0));
  const std::regex alias_re(alias && *alias != entry ? "\\b" + *alias + "\\b" : "$^");
  for (size_t k = 0; k < tests.size(); ++k) {
    const TestCase& t = tests[k];
    std::string check;
    if (t.is_assertion()) {
      check = "(" + std::regex_replace(t.assertion, alias_re, entry) + ")";
    } else {
      check = fmt::format("__same((Object) {}({}), (Object) ({}))", entry, t.input, t.output);
    }
    body += fmt::format(
        "    if (!__test(u, {0}, new Runnable() {{\n"
        "        public void run() {{\n"
        "            try {{\n"
        "                __result = {1} ? \"PASS\" : \"FAIL wrong output\";\n"
        "            }} catch (Throwable e) {{\n"
        "                __result = \"FAIL \" + String.valueOf(e).replace('\\n', ' ');\n"
        "            }}\n"
        "        }}\n"
        "    }})){2}\n",
        k, check, config.stop_on_failure ? " return;" : " {}");
  }
  body += "}\n";
  return body;
}

std::string FindJava(const SandboxConfig& config) {
  if (!config.java.empty()) return SearchPath(config.java);
  if (const char* env = std::getenv("SYNTH_EVAL_JAVA"); env != nullptr && *env != '\0') {
    return SearchPath(env);
  }
  static std::once_flag once;
  static std::string found;
  std::call_once(once, [&] {
    found = SearchPath("java");
    if (!found.empty()) return;
    const std::string python = SearchPath(config.python);
    if (python.empty()) return;
    try {
      TempDir dir;
      const ProcessResult probe =
          RunProcess({python, "-c", "import jdk4py; print(jdk4py.JAVA)"}, dir.path(), 30.0);
      const std::string path = Trim(probe.out);
      if (probe.exit_code == 0 && Executable(path)) found = path;
    } catch (const Error&) {
    }
  });
  return found;
}

ExecutionResult ExecuteTests(const SourceUnit& unit, const std::vector<TestCase>& tests,
                             const SandboxConfig& config,
                             const std::optional<std::string>& entry_point) {
  return ExecuteTestsBatch({unit}, tests, config, entry_point).front();
}

std::vector<ExecutionResult> ExecuteTestsBatch(const std::vector<SourceUnit>& units,
                                               const std::vector<TestCase>& tests,
                                               const SandboxConfig& config,
                                               const std::optional<std::string>& entry_point) {
  if (units.empty()) return {};
  for (const auto& u : units) {
    if (u.language() != units.front().language()) {
      throw Error(ErrorCode::kInvalidArgument, "a test batch must use one language");
    }
  }
  if (units.front().language() == Language::kJava) {
    return RunJava(units, tests, config, entry_point);
  }
  std::vector<ExecutionResult> results;
  for (const auto& u : units) {
    results.push_back(RunPython(u, tests, config, ResolveEntryPoint(u, entry_point), entry_point));
  }
  return results;
}

TestOracle MakeExecutionOracle(const SandboxConfig& config) {
  return [config](const CorpusRecord& record, const SourceUnit& unit) {
    if (!record.tests) throw Error(ErrorCode::kMissingTests, "record " + record.id + " has no tests");
    return ExecuteTests(unit, *record.tests, config, record.entry_point).passed;
  };
}

}  // namespace synth_eval
