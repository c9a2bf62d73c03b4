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


#ifndef SYNTH_EVAL_HARNESS_H_
#define SYNTH_EVAL_HARNESS_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "synth_eval/corpus.h"
#include "synth_eval/metrics.h"
#include "synth_eval/mutator.h"
#include "synth_eval/scorer.h"

namespace synth_eval {

// Mean absolute error. Throws kLengthMismatch, kEmptyInput.
double Mae(const std::vector<double>& values, const std::vector<double>& labels);

struct Classification {
  size_t tp = 0;
  size_t fp = 0;
  size_t tn = 0;
  size_t fn = 0;
  double accuracy = 0.0;
  // Zero when the denominator is zero.
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Inputs must be 0/1. Throws kLengthMismatch, kEmptyInput, kInvalidArgument.
Classification ClassificationMetrics(const std::vector<int>& binary,
                                     const std::vector<int>& labels);

enum class PerturbationTag { kOriginal, kTokenO2S, kTokenS2S, kSyntax, kSemantic };

struct PerturbationKind {
  PerturbationTag tag = PerturbationTag::kOriginal;
  double ratio = 0.0;  // kSemantic only

  bool seed_dependent() const {
    return tag == PerturbationTag::kSyntax || tag == PerturbationTag::kSemantic;
  }
};

// "original", "o2s", "s2s", "syntax", "semantic-<percent>".
std::string PerturbationName(const PerturbationKind& kind);
PerturbationKind ParsePerturbation(std::string_view name);

// O2S sketches predictions, S2S both sides (unparsable code stays verbatim),
// Syntax replaces each prediction by a sampled variant, Semantic mutates a
// ratio of passing predictions and flips the labels of killed ones. Throws
// kInvalidArgument when a prediction is missing.
std::vector<CorpusRecord> PerturbCorpus(const std::vector<CorpusRecord>& records,
                                        const PerturbationKind& kind, uint64_t seed,
                                        const TestOracle& oracle = {},
                                        MutationStats* stats = nullptr);

// Remembers verdicts per (record id, code text).
TestOracle CachingOracle(TestOracle oracle);

// A match metric, or CodeScore-R ("codescore-r").
struct ExperimentMetric {
  bool codescore = false;
  MetricKind kind = MetricKind::kBleu;

  std::string name() const;
};

ExperimentMetric ParseExperimentMetric(std::string_view name);
std::vector<ExperimentMetric> ParseExperimentMetrics(std::string_view list);

struct ExperimentSetup {
  ScoreConfig score;
  const EncoderBackend* backend = nullptr;  // required for codescore-r
  TestOracle oracle;                        // required for semantic runs
  MetricContext metric_context;
  // Binarization cut for match metrics.
  double match_threshold = 0.5;
};

struct MetricSummary {
  std::string metric;
  double mean_value = 0.0;
  double mae = 0.0;
  Classification cls;
};

struct RecordRow {
  std::string id;
  int pass1 = 0;
  std::vector<double> values;  // per metric; codescore-r is the binary score
  double codescore_sim = 0.0;
};

struct SeedRun {
  uint64_t seed = 0;
  std::vector<MetricSummary> metrics;
  std::vector<RecordRow> rows;
  MutationStats mutation;
};

struct MetricReport {
  std::string kind;
  double ratio = 0.0;
  std::vector<uint64_t> seeds;
  std::vector<std::string> metrics;
  std::vector<SeedRun> runs;
  // Seed means; counts come from the first seed.
  std::vector<MetricSummary> mean;
  double mean_codescore_sim = 0.0;
  std::vector<std::pair<std::string, std::string>> metadata;
};

// CrystalBLEU's trivially shared n-grams from the corpus references.
MetricContext CorpusMetricContext(const std::vector<CorpusRecord>& records, size_t k = 50);

// Perturbs per seed (seed-independent kinds run once and are reused),
// scores every metric and summarizes against pass1. Throws kInvalidArgument
// for unlabeled records or a missing backend/oracle.
MetricReport RunExperiment(const std::vector<CorpusRecord>& records,
                           const std::vector<ExperimentMetric>& metrics,
                           const PerturbationKind& kind, const std::vector<uint64_t>& seeds,
                           const ExperimentSetup& setup);

void WriteReportJson(std::ostream& out, const MetricReport& report);
// "id,pass1,<metric>...,codescore_r_sim" for one seed.
void WriteScoreCsv(std::ostream& out, const MetricReport& report, size_t run = 0);
// One row per report, MAE per metric.
std::string RenderMaeTable(const std::vector<MetricReport>& reports);

}  // namespace synth_eval

#endif  // SYNTH_EVAL_HARNESS_H_
