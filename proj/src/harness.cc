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

#include "synth_eval/harness.h"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "synth_eval/error.h"
#include "synth_eval/random.h"
#include "synth_eval/sketcher.h"
#include "synth_eval/transformer.h"

namespace synth_eval {
namespace {

std::string SketchedText(Language lang, const std::string& text) {
  SourceUnit unit(lang, text);
  if (unit.has_error()) return text;
  return Sketch(unit).unit.text();
}

nlohmann::ordered_json SummaryJson(const MetricSummary& m) {
  return {{"metric", m.metric},
          {"mean_value", m.mean_value},
          {"mae", m.mae},
          {"accuracy", m.cls.accuracy},
          {"precision", m.cls.precision},
          {"recall", m.cls.recall},
          {"f1", m.cls.f1},
          {"tp", m.cls.tp},
          {"fp", m.cls.fp},
          {"tn", m.cls.tn},
          {"fn", m.cls.fn}};
}

SeedRun ScoreRun(const std::vector<CorpusRecord>& records,
                 const std::vector<ExperimentMetric>& metrics, const ExperimentSetup& setup) {
  SeedRun run;
  std::vector<std::vector<double>> columns(metrics.size());
  std::vector<double> labels;
  for (const CorpusRecord& r : records) {
    RecordRow row;
    row.id = r.id;
    row.pass1 = *r.pass1;
    labels.push_back(*r.pass1);
    const SourceUnit ref = r.ReferenceUnit();
    const SourceUnit pred = r.PredictionUnit();
    std::optional<ScoreResult> score;
    for (size_t m = 0; m < metrics.size(); ++m) {
      double value;
      if (metrics[m].codescore) {
        if (!score) score = Score(ref, pred, setup.score, *setup.backend);
        value = score->binary;
        row.codescore_sim = score->similarity;
      } else {
        value = ComputeMetric(metrics[m].kind, ref, pred, setup.metric_context);
      }
      row.values.push_back(value);
      columns[m].push_back(value);
    }
    run.rows.push_back(std::move(row));
  }
  std::vector<int> binary_labels(labels.begin(), labels.end());
  for (size_t m = 0; m < metrics.size(); ++m) {
    MetricSummary s;
    s.metric = metrics[m].name();
    double sum = 0.0;
    std::vector<int> binary;
    for (double v : columns[m]) {
      sum += v;
      binary.push_back(v > setup.match_threshold ? 1 : 0);
    }
    s.mean_value = sum / static_cast<double>(columns[m].size());
    s.mae = Mae(columns[m], labels);
    s.cls = ClassificationMetrics(binary, binary_labels);
    run.metrics.push_back(s);
  }
  return run;
}

}  // namespace

double Mae(const std::vector<double>& values, const std::vector<double>& labels) {
  if (values.size() != labels.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                fmt::format("{} values against {} labels", values.size(), labels.size()));
  }
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "mae of nothing");
  double sum = 0.0;
  for (size_t i = 0; i < values.size(); ++i) sum += std::abs(values[i] - labels[i]);
  return sum / static_cast<double>(values.size());
}

Classification ClassificationMetrics(const std::vector<int>& binary,
                                     const std::vector<int>& labels) {
  if (binary.size() != labels.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                fmt::format("{} scores against {} labels", binary.size(), labels.size()));
  }
  if (binary.empty()) throw Error(ErrorCode::kEmptyInput, "no scores");
  Classification c;
  for (size_t i = 0; i < binary.size(); ++i) {
    if ((binary[i] != 0 && binary[i] != 1) || (labels[i] != 0 && labels[i] != 1)) {
      throw Error(ErrorCode::kInvalidArgument, "classification inputs must be 0 or 1");
    }
    if (binary[i] == 1) {
      labels[i] == 1 ? ++c.tp : ++c.fp;
    } else {
      labels[i] == 1 ? ++c.fn : ++c.tn;
    }
  }
  const auto ratio = [](size_t num, size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  c.accuracy = ratio(c.tp + c.tn, binary.size());
  c.precision = ratio(c.tp, c.tp + c.fp);
  c.recall = ratio(c.tp, c.tp + c.fn);
  c.f1 = c.precision + c.recall == 0.0
             ? 0.0
             : 2.0 * c.precision * c.recall / (c.precision + c.recall);
  return c;
}

std::string PerturbationName(const PerturbationKind& kind) {
  switch (kind.tag) {
    case PerturbationTag::kOriginal:
      return "original";
    case PerturbationTag::kTokenO2S:
      return "o2s";
    case PerturbationTag::kTokenS2S:
      return "s2s";
    case PerturbationTag::kSyntax:
      return "syntax";
    case PerturbationTag::kSemantic:
      return fmt::format("semantic-{:g}", kind.ratio * 100.0);
  }
  return "";
}

PerturbationKind ParsePerturbation(std::string_view name) {
  if (name == "original") return {PerturbationTag::kOriginal};
  if (name == "o2s") return {PerturbationTag::kTokenO2S};
  if (name == "s2s") return {PerturbationTag::kTokenS2S};
  if (name == "syntax") return {PerturbationTag::kSyntax};
  constexpr std::string_view kSemantic = "semantic-";
  if (name.substr(0, kSemantic.size()) == kSemantic) {
    const std::string percent(name.substr(kSemantic.size()));
    size_t used = 0;
    double value = -1.0;
    try {
      value = std::stod(percent, &used);
    } catch (const std::exception&) {
    }
    if (used == percent.size() && value >= 0.0 && value <= 100.0) {
      return {PerturbationTag::kSemantic, value / 100.0};
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown perturbation: " + std::string(name));
}

std::vector<CorpusRecord> PerturbCorpus(const std::vector<CorpusRecord>& records,
                                        const PerturbationKind& kind, uint64_t seed,
                                        const TestOracle& oracle, MutationStats* stats) {
  for (const CorpusRecord& r : records) {
    if (!r.prediction) throw Error(ErrorCode::kInvalidArgument, "record " + r.id + " has no prediction");
  }
  if (kind.tag == PerturbationTag::kSemantic) {
    if (!oracle) throw Error(ErrorCode::kInvalidArgument, "semantic perturbation needs a test oracle");
    MutationPlan plan;
    plan.ratio = kind.ratio;
    plan.seed = seed;
    return MutateCorpus(records, plan, oracle, stats);
  }
  std::vector<CorpusRecord> out = records;
  for (size_t i = 0; i < out.size(); ++i) {
    CorpusRecord& r = out[i];
    switch (kind.tag) {
      case PerturbationTag::kOriginal:
      case PerturbationTag::kSemantic:
        break;
      case PerturbationTag::kTokenS2S:
        r.reference = SketchedText(r.lang, r.reference);
        [[fallthrough]];
      case PerturbationTag::kTokenO2S:
        r.prediction = SketchedText(r.lang, *r.prediction);
        break;
      case PerturbationTag::kSyntax:
        if (auto v = SampleVariant(r.PredictionUnit(), AllTransformRules(), MixSeed(seed, i))) {
          r.prediction = v->text();
        }
        break;
    }
  }
  return out;
}

TestOracle CachingOracle(TestOracle oracle) {
  struct Cache {
    std::mutex mu;
    std::map<std::pair<std::string, std::string>, bool> verdicts;
  };
  auto cache = std::make_shared<Cache>();
  return [oracle = std::move(oracle), cache](const CorpusRecord& record, const SourceUnit& code) {
    const auto key = std::make_pair(record.id, code.text());
    {
      std::lock_guard<std::mutex> lock(cache->mu);
      if (auto it = cache->verdicts.find(key); it != cache->verdicts.end()) return it->second;
    }
    const bool verdict = oracle(record, code);
    std::lock_guard<std::mutex> lock(cache->mu);
    cache->verdicts[key] = verdict;
    return verdict;
  };
}

std::string ExperimentMetric::name() const {
  return codescore ? "codescore-r" : std::string(MetricName(kind));
}

ExperimentMetric ParseExperimentMetric(std::string_view name) {
  if (name == "codescore-r") return {true, MetricKind::kBleu};
  return {false, ParseMetricKind(name)};
}

std::vector<ExperimentMetric> ParseExperimentMetrics(std::string_view list) {
  std::vector<ExperimentMetric> metrics;
  size_t start = 0;
  while (start <= list.size()) {
    size_t end = list.find(',', start);
    if (end == std::string_view::npos) end = list.size();
    const std::string_view item = list.substr(start, end - start);
    if (item.empty()) throw Error(ErrorCode::kInvalidArgument, "empty metric name");
    metrics.push_back(ParseExperimentMetric(item));
    start = end + 1;
  }
  return metrics;
}

MetricContext CorpusMetricContext(const std::vector<CorpusRecord>& records, size_t k) {
  std::vector<TokenList> refs;
  for (const CorpusRecord& r : records) {
    const SourceUnit unit = r.ReferenceUnit();
    if (!unit.has_error()) refs.push_back(Tokenize(unit));
  }
  MetricContext context;
  context.trivially_shared = TriviallySharedNgrams(refs, k);
  return context;
}

MetricReport RunExperiment(const std::vector<CorpusRecord>& records,
                           const std::vector<ExperimentMetric>& metrics,
                           const PerturbationKind& kind, const std::vector<uint64_t>& seeds,
                           const ExperimentSetup& setup) {
  if (seeds.empty()) throw Error(ErrorCode::kInvalidArgument, "no seeds");
  if (metrics.empty()) throw Error(ErrorCode::kInvalidArgument, "no metrics");
  for (const CorpusRecord& r : records) {
    if (!r.pass1) throw Error(ErrorCode::kInvalidArgument, "record " + r.id + " has no pass1");
  }
  for (const auto& m : metrics) {
    if (m.codescore && setup.backend == nullptr) {
      throw Error(ErrorCode::kInvalidArgument, "codescore-r needs an encoder backend");
    }
  }
  MetricReport report;
  report.kind = PerturbationName(kind);
  report.ratio = kind.ratio;
  report.seeds = seeds;
  for (const auto& m : metrics) report.metrics.push_back(m.name());

  std::optional<SeedRun> shared;
  for (uint64_t seed : seeds) {
    SeedRun run;
    if (!kind.seed_dependent() && shared) {
      run = *shared;
    } else {
      MutationStats stats;
      const auto perturbed = PerturbCorpus(records, kind, seed, setup.oracle, &stats);
      run = ScoreRun(perturbed, metrics, setup);
      run.mutation = std::move(stats);
      if (!kind.seed_dependent()) shared = run;
    }
    run.seed = seed;
    report.runs.push_back(std::move(run));
  }

  const double n = static_cast<double>(report.runs.size());
  for (size_t m = 0; m < metrics.size(); ++m) {
    MetricSummary mean = report.runs.front().metrics[m];
    mean.mean_value = mean.mae = 0.0;
    mean.cls.accuracy = mean.cls.precision = mean.cls.recall = mean.cls.f1 = 0.0;
    for (const SeedRun& run : report.runs) {
      const MetricSummary& s = run.metrics[m];
      mean.mean_value += s.mean_value / n;
      mean.mae += s.mae / n;
      mean.cls.accuracy += s.cls.accuracy / n;
      mean.cls.precision += s.cls.precision / n;
      mean.cls.recall += s.cls.recall / n;
      mean.cls.f1 += s.cls.f1 / n;
    }
    report.mean.push_back(mean);
  }
  for (const SeedRun& run : report.runs) {
    double sum = 0.0;
    for (const RecordRow& row : run.rows) sum += row.codescore_sim;
    report.mean_codescore_sim += sum / static_cast<double>(run.rows.size()) / n;
  }
  return report;
}

void WriteReportJson(std::ostream& out, const MetricReport& report) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [key, value] : report.metadata) meta[key] = value;
  j["metadata"] = meta;
  j["kind"] = report.kind;
  j["ratio"] = report.ratio;
  j["seeds"] = report.seeds;
  j["metrics"] = report.metrics;
  nlohmann::ordered_json mean = nlohmann::ordered_json::array();
  for (const auto& m : report.mean) mean.push_back(SummaryJson(m));
  j["mean"] = mean;
  j["mean_codescore_sim"] = report.mean_codescore_sim;
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  for (const SeedRun& run : report.runs) {
    nlohmann::ordered_json r;
    r["seed"] = run.seed;
    nlohmann::ordered_json ms = nlohmann::ordered_json::array();
    for (const auto& m : run.metrics) ms.push_back(SummaryJson(m));
    r["metrics"] = ms;
    r["mutation"] = {{"selected", run.mutation.selected},
                     {"killed", run.mutation.killed},
                     {"equivalent", run.mutation.equivalent},
                     {"unmutable", run.mutation.unmutable}};
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const RecordRow& row : run.rows) {
      rows.push_back({{"id", row.id},
                      {"pass1", row.pass1},
                      {"values", row.values},
                      {"codescore_r_sim", row.codescore_sim}});
    }
    r["rows"] = rows;
    runs.push_back(r);
  }
  j["runs"] = runs;
  out << j.dump(2) << '\n';
}

void WriteScoreCsv(std::ostream& out, const MetricReport& report, size_t run) {
  const SeedRun& r = report.runs.at(run);
  out << "id,pass1";
  for (const auto& m : report.metrics) out << ',' << m;
  out << ",codescore_r_sim\n";
  for (const RecordRow& row : r.rows) {
    out << row.id << ',' << row.pass1;
    for (double v : row.values) out << fmt::format(",{:.6f}", v);
    out << fmt::format(",{:.6f}\n", row.codescore_sim);
  }
}

std::string RenderMaeTable(const std::vector<MetricReport>& reports) {
  if (reports.empty()) return "";
  size_t kind_width = 4;
  for (const auto& r : reports) kind_width = std::max(kind_width, r.kind.size());
  std::vector<size_t> widths;
  std::string out = fmt::format("{:<{}}", "kind", kind_width);
  for (const auto& m : reports.front().metrics) {
    widths.push_back(std::max<size_t>(m.size(), 8));
    out += fmt::format("  {:>{}}", m, widths.back());
  }
  out += '\n';
  for (const auto& r : reports) {
    out += fmt::format("{:<{}}", r.kind, kind_width);
    for (size_t m = 0; m < r.mean.size() && m < widths.size(); ++m) {
      out += fmt::format("  {:>{}.4f}", r.mean[m].mae, widths[m]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace synth_eval
