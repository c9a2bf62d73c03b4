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

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "doctest.h"
#include "synth_eval/error.h"
#include "synth_eval/harness.h"
#include "synth_eval/sketcher.h"

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

CorpusRecord Record(std::string id, std::string ref, std::string pred, int pass1) {
  CorpusRecord r;
  r.id = std::move(id);
  r.lang = Language::kPython;
  r.reference = std::move(ref);
  r.prediction = std::move(pred);
  r.pass1 = pass1;
  r.tests = std::vector<TestCase>{{"1", "1", {}}};
  return r;
}

std::vector<CorpusRecord> SmallCorpus() {
  return {
      Record("a", "def f(x):\n    return x + 1\n", "def f(y):\n    return y + 1\n", 1),
      Record("b", "def g(xs):\n    s = 0\n    for v in xs:\n        s += v\n    return s\n",
             "def g(xs):\n    s = 0\n    for v in xs:\n        s += v\n    return s\n", 1),
      Record("c", "def h(a, b):\n    if a > b:\n        return a\n    return b\n",
             "def h(a, b):\n    if a < b:\n        return a\n    return b\n", 0),
      Record("d", "def k(n):\n    i = 0\n    while i < n:\n        i = i * 2 + 1\n    return i\n",
             "def k(n):\n    i = 0\n    while i < n:\n        i = i * 2 + 1\n    return i\n", 1),
      Record("e", "def m(a):\n    return a * a - 3\n", "def m(a):\n    return (a (\n", 0),
  };
}

// Passes exactly the original passing predictions.
TestOracle FakeOracle(const std::vector<CorpusRecord>& records) {
  std::set<std::pair<std::string, std::string>> passing;
  for (const auto& r : records) {
    if (r.pass1 == 1) passing.insert({r.id, *r.prediction});
  }
  return [passing](const CorpusRecord& r, const SourceUnit& code) {
    return passing.count({r.id, code.text()}) > 0;
  };
}

}  // namespace

TEST_CASE("mae") {
  CHECK(Mae({1, 0, 1}, {1, 0, 1}) == 0.0);
  CHECK(Mae({1, 0}, {0, 0}) == doctest::Approx(0.5));
  CHECK(Mae({0.3, 0.9, 0.5}, {0, 1, 1}) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(Mae({0.2, 0.5, 0.8}, {0, 1, 1}) == Mae({0, 1, 1}, {0.2, 0.5, 0.8}));
  CHECK(CodeOf([] { Mae({1}, {1, 0}); }) == ErrorCode::kLengthMismatch);
  CHECK(CodeOf([] { Mae({}, {}); }) == ErrorCode::kEmptyInput);
}

TEST_CASE("classification") {
  std::vector<int> binary, labels;
  auto add = [&](int b, int l, int n) {
    for (int i = 0; i < n; ++i) {
      binary.push_back(b);
      labels.push_back(l);
    }
  };
  add(1, 1, 8);
  add(1, 0, 2);
  add(0, 1, 2);
  add(0, 0, 3);
  const Classification c = ClassificationMetrics(binary, labels);
  CHECK(c.tp == 8);
  CHECK(c.fp == 2);
  CHECK(c.fn == 2);
  CHECK(c.tn == 3);
  CHECK(c.precision == doctest::Approx(0.8));
  CHECK(c.recall == doctest::Approx(0.8));
  CHECK(c.f1 == doctest::Approx(0.8));
  CHECK(c.accuracy == doctest::Approx(11.0 / 15.0));

  const Classification perfect = ClassificationMetrics({1, 0, 1}, {1, 0, 1});
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.f1 == 1.0);

  const Classification none = ClassificationMetrics({0, 0}, {0, 0});
  CHECK(none.accuracy == 1.0);
  CHECK(none.precision == 0.0);
  CHECK(none.recall == 0.0);
  CHECK(none.f1 == 0.0);

  CHECK(CodeOf([] { ClassificationMetrics({2}, {1}); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([] { ClassificationMetrics({1}, {1, 0}); }) == ErrorCode::kLengthMismatch);
}

TEST_CASE("perturbation names") {
  for (const char* name : {"original", "o2s", "s2s", "syntax", "semantic-40"}) {
    CHECK(PerturbationName(ParsePerturbation(name)) == name);
  }
  CHECK(ParsePerturbation("semantic-40").ratio == doctest::Approx(0.4));
  CHECK(ParsePerturbation("syntax").seed_dependent());
  CHECK(!ParsePerturbation("o2s").seed_dependent());
  CHECK(CodeOf([] { ParsePerturbation("semantic-140"); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([] { ParsePerturbation("noise"); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("token perturbations") {
  const auto records = SmallCorpus();
  const auto o2s = PerturbCorpus(records, ParsePerturbation("o2s"), 0);
  const auto s2s = PerturbCorpus(records, ParsePerturbation("s2s"), 0);
  for (size_t i = 0; i < records.size(); ++i) {
    CHECK(o2s[i].reference == records[i].reference);
    CHECK(o2s[i].pass1 == records[i].pass1);
    CHECK(s2s[i].prediction == o2s[i].prediction);
  }
  CHECK(*o2s[0].prediction == Sketch(SourceUnit(Language::kPython, *records[0].prediction)).unit.text());
  CHECK(*o2s[4].prediction == *records[4].prediction);
  // Renamed copies sketch to the same text.
  CHECK(*s2s[0].prediction == s2s[0].reference);
  const auto twice = PerturbCorpus(s2s, ParsePerturbation("s2s"), 0);
  for (size_t i = 0; i < s2s.size(); ++i) {
    CHECK(twice[i].reference == s2s[i].reference);
    CHECK(twice[i].prediction == s2s[i].prediction);
  }
}

TEST_CASE("syntax and semantic perturbations") {
  const auto records = SmallCorpus();
  const auto syntax = PerturbCorpus(records, ParsePerturbation("syntax"), 3);
  CHECK(syntax == PerturbCorpus(records, ParsePerturbation("syntax"), 3));
  size_t changed = 0;
  for (size_t i = 0; i < records.size(); ++i) {
    CHECK(syntax[i].pass1 == records[i].pass1);
    changed += syntax[i].prediction != records[i].prediction;
  }
  CHECK(changed >= 3);

  const TestOracle oracle = FakeOracle(records);
  CHECK(PerturbCorpus(records, ParsePerturbation("semantic-0"), 1, oracle) == records);
  MutationStats stats;
  const auto mutated = PerturbCorpus(records, ParsePerturbation("semantic-100"), 1, oracle, &stats);
  CHECK(stats.selected == 3);
  CHECK(stats.killed == 3);
  for (size_t i = 0; i < records.size(); ++i) {
    CHECK(mutated[i].pass1 <= records[i].pass1);
    if (records[i].pass1 == 0) CHECK(mutated[i] == records[i]);
  }
  CHECK(CodeOf([&] { PerturbCorpus(records, ParsePerturbation("semantic-50"), 1); }) ==
        ErrorCode::kInvalidArgument);
  auto missing = records;
  missing[1].prediction.reset();
  CHECK(CodeOf([&] { PerturbCorpus(missing, ParsePerturbation("o2s"), 0); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("caching oracle") {
  int calls = 0;
  const TestOracle oracle = CachingOracle([&](const CorpusRecord&, const SourceUnit& code) {
    ++calls;
    return code.text().size() % 2 == 0;
  });
  const auto records = SmallCorpus();
  const SourceUnit unit(Language::kPython, "def f():\n    pass\n");
  const bool first = oracle(records[0], unit);
  CHECK(oracle(records[0], unit) == first);
  CHECK(calls == 1);
  oracle(records[1], unit);
  CHECK(calls == 2);
}

TEST_CASE("exact match experiment") {
  auto records = SmallCorpus();
  for (auto& r : records) r.prediction = r.reference;
  records[2].pass1 = 1;
  records[4].pass1 = 1;
  ExperimentSetup setup;
  const MetricReport report = RunExperiment(records, ParseExperimentMetrics("exact-match,bleu"),
                                            ParsePerturbation("original"), {0, 1}, setup);
  REQUIRE(report.mean.size() == 2);
  CHECK(report.mean[0].metric == "exact-match");
  CHECK(report.mean[0].mean_value == 1.0);
  CHECK(report.mean[0].mae == 0.0);
  CHECK(report.mean[0].cls.accuracy == 1.0);
  CHECK(report.runs.size() == 2);
  CHECK(report.runs[0].metrics[1].mean_value == report.runs[1].metrics[1].mean_value);
  CHECK(report.mean[1].mean_value == doctest::Approx(1.0));

  CHECK(CodeOf([&] {
          RunExperiment(records, ParseExperimentMetrics("codescore-r"), ParsePerturbation("original"),
                        {0}, setup);
        }) == ErrorCode::kInvalidArgument);
  records[0].pass1.reset();
  CHECK(CodeOf([&] {
          RunExperiment(records, ParseExperimentMetrics("bleu"), ParsePerturbation("original"), {0},
                        setup);
        }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("reports are deterministic and semantic error grows with the ratio") {
  const auto records = SmallCorpus();
  const auto backend = MakeHashBackend(256, 0);
  ExperimentSetup setup;
  setup.backend = backend.get();
  setup.oracle = FakeOracle(records);
  setup.metric_context = CorpusMetricContext(records);
  const auto metrics = ParseExperimentMetrics("bleu,ed,crystal-bleu,codescore-r");
  const std::vector<uint64_t> seeds{0, 1, 2, 3, 4};

  std::string first;
  for (int rep = 0; rep < 2; ++rep) {
    std::ostringstream json, csv;
    const auto report = RunExperiment(records, metrics, ParsePerturbation("semantic-60"), seeds, setup);
    WriteReportJson(json, report);
    WriteScoreCsv(csv, report, 2);
    if (rep == 0) {
      first = json.str() + csv.str();
      CHECK(csv.str().rfind("id,pass1,bleu,ed,crystal-bleu,codescore-r,codescore_r_sim\n", 0) == 0);
    } else {
      CHECK(json.str() + csv.str() == first);
    }
  }

  std::vector<MetricReport> reports;
  double previous = -1.0;
  for (const char* kind : {"semantic-0", "semantic-40", "semantic-100"}) {
    reports.push_back(RunExperiment(records, metrics, ParsePerturbation(kind), seeds, setup));
    const double mae = reports.back().mean[3].mae;
    CHECK(mae >= previous);
    previous = mae;
  }
  CHECK(reports.back().mean[3].mae > reports.front().mean[3].mae);

  const std::string table = RenderMaeTable(reports);
  CHECK(table.rfind("kind", 0) == 0);
  CHECK(table.find("semantic-40") != std::string::npos);
  CHECK(table.find("codescore-r") != std::string::npos);
  CHECK(std::count(table.begin(), table.end(), '\n') == 4);
}
