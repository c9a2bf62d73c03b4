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

// Prints one PASS/FAIL line per acceptance criterion; exits nonzero on any
// failure. Surviving mutants and other details go to stderr.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "oracles.h"
#include "synth_eval/corpus.h"
#include "synth_eval/encoder.h"
#include "synth_eval/error.h"
#include "synth_eval/executor.h"
#include "synth_eval/harness.h"
#include "synth_eval/metrics.h"
#include "synth_eval/mutator.h"
#include "synth_eval/random.h"
#include "synth_eval/scorer.h"
#include "synth_eval/sketcher.h"
#include "synth_eval/synthetic.h"
#include "synth_eval/trainer.h"
#include "synth_eval/transformer.h"

using namespace synth_eval;

namespace {

constexpr size_t kMinRenamings = 200;
constexpr double kA1Seconds = 60.0;
constexpr size_t kMinFunctions = 30;
constexpr double kA2Seconds = 180.0;
constexpr double kMinKillRate = 0.90;
constexpr int kMutationSeeds = 5;
constexpr double kA3Seconds = 180.0;
constexpr size_t kSyntheticUnits = 200;
constexpr double kMinGap = 0.2;
constexpr double kMinOrdering = 0.90;
constexpr double kA4Seconds = 300.0;
constexpr size_t kGradInstances = 20;
constexpr double kMaxGradError = 1e-4;
constexpr double kA5Seconds = 30.0;
constexpr double kIdentityTolerance = 1e-9;
constexpr int kOraclePairs = 50;
constexpr double kExampleTolerance = 0.01;
constexpr int kMaskPlans = 10000;
constexpr double kSplitTolerance = 0.02;

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void Report(const char* id, bool pass, const std::string& detail) {
  std::printf("%s %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

std::vector<CorpusRecord> Demo() {
  return ReadCorpusFile(DataDir() + "/corpus/demo.jsonl");
}

SandboxConfig Sandbox(bool stop_on_failure) {
  SandboxConfig config;
  config.stop_on_failure = stop_on_failure;
  return config;
}

std::vector<bool> Verdicts(const ExecutionResult& r) {
  std::vector<bool> out;
  for (const auto& d : r.details) out.push_back(d.passed);
  return out;
}

void A1() {
  const auto start = Clock::now();
  const auto records = Demo();
  std::vector<TrainingRecord> train;
  for (const auto& r : records) train.push_back({r.id, r.lang, r.nl.value_or(""), r.reference});
  TrainerConfig config;
  config.pooling = Pooling::kLastAvg;
  config.mlm_weight = 0.0;
  config.epochs = 20;
  const EncoderModel model = Train(train, config).model;
  const auto hash = MakeHashBackend(1024, 0);
  const auto trained = MakeModelBackend(model, Pooling::kLastAvg);

  size_t checked[2] = {0, 0}, exact[2] = {0, 0};
  const EncoderBackend* backends[2] = {hash.get(), trained.get()};
  for (int b = 0; b < 2; ++b) {
    uint64_t seed = 0;
    while (checked[b] < kMinRenamings + 24) {
      for (const auto& r : records) {
        const SourceUnit pred = r.PredictionUnit();
        if (pred.has_error()) continue;
        const ScoreResult base = Score(r.ReferenceUnit(), pred, ScoreConfig{}, *backends[b]);
        const SourceUnit renamed = RenameIdentifiers(pred, RandomRenaming(pred, MixSeed(seed, checked[b])));
        const ScoreResult again = Score(r.ReferenceUnit(), renamed, ScoreConfig{}, *backends[b]);
        ++checked[b];
        exact[b] += again == base && renamed.text() != pred.text();
      }
      ++seed;
    }
  }
  const double secs = Seconds(start);
  const bool pass = exact[0] == checked[0] && exact[1] == checked[1] && checked[0] >= kMinRenamings &&
                    secs < kA1Seconds;
  Report("A1", pass,
         fmt::format("renamed predictions scoring bit-exactly: hash {}/{}, trained model {}/{} ({:.1f} s, limit {:.0f} s)",
                     exact[0], checked[0], exact[1], checked[1], secs, kA1Seconds));
}

void A2() {
  const auto start = Clock::now();
  const auto records = Demo();
  std::set<Language> langs;
  size_t variants = 0, agree = 0;
  for (const auto& r : records) {
    langs.insert(r.lang);
    for (const SourceUnit& original : {r.ReferenceUnit(), r.PredictionUnit()}) {
      if (original.has_error()) continue;
      std::vector<SourceUnit> units = {original};
      for (const auto& site : FindSites(original, AllTransformRules())) {
        units.push_back(ApplyTransform(original, site));
      }
      for (uint64_t seed = 0; seed < 3; ++seed) {
        if (auto v = SampleVariant(original, AllTransformRules(), seed)) units.push_back(*v);
      }
      const auto results = ExecuteTestsBatch(units, *r.tests, Sandbox(false), r.entry_point);
      const auto expected = Verdicts(results.front());
      for (size_t k = 1; k < results.size(); ++k) {
        ++variants;
        if (Verdicts(results[k]) == expected) {
          ++agree;
        } else {
          std::cerr << "A2 variant of " << r.id << " changed test verdicts:\n" << units[k].text() << '\n';
        }
      }
    }
  }
  const double secs = Seconds(start);
  const bool pass = records.size() >= kMinFunctions && langs.size() == 2 && variants > 0 &&
                    agree == variants && secs < kA2Seconds;
  Report("A2", pass,
         fmt::format("{} functions, {} variants of references and predictions, {} with identical test verdicts ({:.1f} s, limit {:.0f} s)",
                     records.size(), variants, agree, secs, kA2Seconds));
}

void A3() {
  const auto start = Clock::now();
  const auto records = Demo();
  size_t draws = 0, killed = 0;
  for (const auto& r : records) {
    const SourceUnit ref = r.ReferenceUnit();
    std::vector<SourceUnit> mutants;
    for (int seed = 0; seed < kMutationSeeds; ++seed) {
      if (auto m = MutateUnit(ref, AllOperatorClasses(), seed)) mutants.push_back(*m);
    }
    const auto results = ExecuteTestsBatch(mutants, *r.tests, Sandbox(true), r.entry_point);
    for (size_t k = 0; k < results.size(); ++k) {
      ++draws;
      if (!results[k].passed) {
        ++killed;
      } else {
        std::cerr << "A3 surviving mutant (equivalent candidate) of " << r.id << ", seed " << k << ":\n"
                  << mutants[k].text() << '\n';
      }
    }
  }
  const double secs = Seconds(start);
  const double rate = draws ? static_cast<double>(killed) / draws : 0.0;
  Report("A3", rate >= kMinKillRate && secs < kA3Seconds,
         fmt::format("kill rate {}/{} = {:.3f} over {} seeds, need >= {:.2f} ({:.1f} s, limit {:.0f} s)", killed,
                     draws, rate, kMutationSeeds, kMinKillRate, secs, kA3Seconds));
}

void A4() {
  const auto start = Clock::now();
  TrainerConfig config;
  config.pooling = Pooling::kLastAvg;
  config.mlm_weight = 0.0;
  config.epochs = 100;
  config.learning_rate = 0.05;
  const auto train = GenerateSyntheticCorpus(kSyntheticUnits, 1);
  const auto held_out = GenerateSyntheticCorpus(100, 999);
  const EncoderModel model = Train(train, config).model;

  double sum_variant = 0.0, sum_mutant = 0.0;
  size_t pairs = 0, ordered = 0;
  for (size_t i = 0; i < held_out.size(); ++i) {
    const SourceUnit unit(held_out[i].lang, held_out[i].code);
    const auto variant = SampleVariant(unit, AllTransformRules(), i);
    const auto mutant = MutateUnit(unit, AllOperatorClasses(), i);
    if (!variant || !mutant) continue;
    auto embed = [&](const SourceUnit& u) { return Encode(model, Tokenize(Sketch(u).unit), config.pooling); };
    const EmbeddingVector ref = embed(unit);
    const double cv = Cosine(ref, embed(*variant));
    const double cm = Cosine(ref, embed(*mutant));
    sum_variant += cv;
    sum_mutant += cm;
    ordered += cv > cm;
    ++pairs;
  }
  const double secs = Seconds(start);
  const double gap = pairs ? (sum_variant - sum_mutant) / pairs : 0.0;
  const double accuracy = pairs ? static_cast<double>(ordered) / pairs : 0.0;
  Report("A4", gap >= kMinGap && accuracy >= kMinOrdering && secs < kA4Seconds,
         fmt::format("{} training units, {} held-out pairs: gap {:.4f} (need >= {:.1f}), ordering accuracy {:.3f} "
                     "(need >= {:.2f}) ({:.1f} s, limit {:.0f} s)",
                     train.size(), pairs, gap, kMinGap, accuracy, kMinOrdering, secs, kA4Seconds));
}

void A5() {
  const auto start = Clock::now();
  const GradCheckSummary g = RunGradCheckSuite(kGradInstances, 2024);
  const double secs = Seconds(start);
  const bool pass = g.max_mlm_error < kMaxGradError && g.max_contrastive_error < kMaxGradError &&
                    std::abs(g.planted_fault_error - 1.0) < 0.01 && secs < kA5Seconds;
  Report("A5", pass,
         fmt::format("{} instances: max rel. error mlm {:.2e}, contrastive {:.2e} (need < {:.0e}); doubled gradient "
                     "flagged at {:.4f} ({:.1f} s, limit {:.0f} s)",
                     g.instances, g.max_mlm_error, g.max_contrastive_error, kMaxGradError, g.planted_fault_error,
                     secs, kA5Seconds));
}

void A6() {
  Vocabulary vocab;
  for (int i = 0; i < 25; ++i) vocab.Add("w" + std::to_string(i));
  EncoderModel model = EncoderModel::Init(vocab, 8, 6, true);

  Triple t;
  t.anchor.ids = {Vocabulary::kSummary, 5, 6, 7};
  t.positive.ids = {Vocabulary::kSummary, 8, 9};
  t.negative.ids = t.positive.ids;
  const double ln2 = ContrastiveLoss(model, {t}, 0.05, Pooling::kLastAvg).loss;

  const TrainingPair pair{{"w1", "w2"}, {"w3", "w4", "w5", "w6", "w7", "w8", "w9"}};
  const double zero = MlmLoss(model, pair, MaskPlan{}).loss;
  model.W.setZero();
  model.b.setZero();
  const MaskPlan one{{2}, {MaskAction::kReplaceWithMask}, {Vocabulary::kMask}};
  const double uniform = MlmLoss(model, pair, one).loss;
  const double ln_v = std::log(static_cast<double>(model.vocab.size()));
  const bool pass = std::abs(ln2 - std::log(2.0)) < kIdentityTolerance && zero == 0.0 &&
                    std::abs(uniform - ln_v) < kIdentityTolerance;
  Report("A6", pass,
         fmt::format("tied batch-of-one contrastive loss - ln 2 = {:.1e}; empty-mask loss = {}; uniform single-mask "
                     "loss - ln {} = {:.1e} (tolerance {:.0e})",
                     ln2 - std::log(2.0), zero, model.vocab.size(), uniform - ln_v, kIdentityTolerance));
}

void A7() {
  using namespace synth_eval::oracle;
  std::mt19937 gen(7);
  int bleu = 0, rouge = 0, chrf = 0, ed = 0, crystal = 0;
  for (int trial = 0; trial < kOraclePairs; ++trial) {
    const TokenList ref = RandomTokens(gen);
    const TokenList hyp = RandomTokens(gen);
    bleu += Bleu(ref, hyp) == OracleBleu(ref, hyp, 4, 0.1, nullptr, {});
    rouge += RougeL(ref, hyp) == OracleRouge(ref, hyp);
    const std::vector<TokenList> corpus = {ref, hyp, RandomTokens(gen)};
    const NgramSet shared = TriviallySharedNgrams(corpus, 3);
    crystal += shared == OracleTopK(corpus, 3) &&
               CrystalBleu(ref, hyp, shared) == OracleBleu(ref, hyp, 4, 0.1, nullptr, shared);
    const std::string rt = RandomText(gen);
    const std::string ht = RandomText(gen);
    chrf += ChrF(rt, ht) == OracleChrF(NormalizeWhitespace(rt), NormalizeWhitespace(ht));
    ed += EditSimilarity(rt, ht) == 1.0 - static_cast<double>(OracleLevenshtein(rt, ht)) /
                                              static_cast<double>(std::max(rt.size(), ht.size()));
  }
  const int n = kOraclePairs;
  Report("A7", bleu == n && rouge == n && chrf == n && ed == n && crystal == n,
         fmt::format("exact oracle agreement on {} random pairs: bleu {}, rouge-l {}, chrf {}, ed {}, crystal-bleu {}",
                     n, bleu, rouge, chrf, ed, crystal));
}

void A8() {
  auto tokens = [](const char* code) { return Tokenize(SourceUnit(Language::kPython, code)); };
  const double bleu = Bleu(tokens("def sum(a, b):\n    a = a + b\n    return a"),
                           tokens("def f(num_0, num_1):\n    num_0 = num_0 + num_1\n    return num_0"));
  const double chrf = ChrF("def sum (a , b) : a = a + b return a", "def sum (a , b) : a += b return a");
  Report("A8", std::abs(bleu - 0.040) <= kExampleTolerance && std::abs(chrf - 0.807) <= kExampleTolerance,
         fmt::format("BLEU(a, c) = {:.4f} (expect 0.040), ChrF(a, d) = {:.4f} (expect 0.807), tolerance {:.2f}",
                     bleu, chrf, kExampleTolerance));
}

void A9() {
  const auto start = Clock::now();
  const bool mae = std::abs(Mae({0.3, 0.9, 0.5}, {0, 1, 1}) - 0.3) < 1e-15 && Mae({1, 0}, {0, 0}) == 0.5 &&
                   Mae({1, 0, 1}, {1, 0, 1}) == 0.0;
  std::vector<int> binary, labels;
  for (auto [b, l, n] : {std::tuple{1, 1, 8}, {1, 0, 2}, {0, 1, 2}, {0, 0, 3}}) {
    binary.insert(binary.end(), n, b);
    labels.insert(labels.end(), n, l);
  }
  const Classification c = ClassificationMetrics(binary, labels);
  const bool cls = c.tp == 8 && c.fp == 2 && c.fn == 2 && c.tn == 3 && std::abs(c.precision - 0.8) < 1e-15 &&
                   std::abs(c.recall - 0.8) < 1e-15 && std::abs(c.f1 - 0.8) < 1e-15 &&
                   std::abs(c.accuracy - 11.0 / 15.0) < 1e-15;

  const auto records = Demo();
  const auto backend = MakeHashBackend(1024, 0);
  ExperimentSetup setup;
  setup.backend = backend.get();
  setup.oracle = MakeExecutionOracle(Sandbox(true));
  setup.metric_context = CorpusMetricContext(records);
  const auto metrics = ParseExperimentMetrics("bleu,ed,crystal-bleu,codescore-r");
  const std::vector<uint64_t> seeds{0, 1, 2, 3, 4};
  std::string outputs[2];
  for (auto& text : outputs) {
    std::ostringstream out;
    for (const char* kind : {"syntax", "semantic-50"}) {
      const MetricReport report = RunExperiment(records, metrics, ParsePerturbation(kind), seeds, setup);
      WriteReportJson(out, report);
      for (size_t run = 0; run < report.runs.size(); ++run) WriteScoreCsv(out, report, run);
    }
    text = out.str();
  }
  const bool deterministic = outputs[0] == outputs[1];
  Report("A9", mae && cls && deterministic,
         fmt::format("mae hand values {}, classification hand values {}, syntax and semantic-50 reports over 5 seeds "
                     "byte-identical across runs {} ({} bytes, {:.1f} s)",
                     mae ? "match" : "differ", cls ? "match" : "differ", deterministic ? "yes" : "no",
                     outputs[0].size(), Seconds(start)));
}

void A10() {
  Vocabulary vocab;
  for (int i = 0; i < 40; ++i) vocab.Add("w" + std::to_string(i));
  size_t counts[3] = {0, 0, 0};
  int exact = 0;
  for (int p = 0; p < kMaskPlans; ++p) {
    const size_t length = 20 * (1 + p % 10);
    const MaskPlan plan = SampleMaskPlan(length, vocab, MixSeed(77, p));
    const std::set<size_t> distinct(plan.positions.begin(), plan.positions.end());
    exact += distinct.size() * 100 == length * 15 && plan.positions.size() == distinct.size() &&
             *distinct.rbegin() < length;
    for (MaskAction a : plan.actions) ++counts[static_cast<int>(a)];
  }
  const double total = static_cast<double>(counts[0] + counts[1] + counts[2]);
  const double mask = counts[0] / total, random = counts[1] / total, keep = counts[2] / total;
  const bool pass = exact == kMaskPlans && std::abs(mask - 0.8) <= kSplitTolerance &&
                    std::abs(random - 0.1) <= kSplitTolerance && std::abs(keep - 0.1) <= kSplitTolerance;
  Report("A10", pass,
         fmt::format("{}/{} plans mask exactly 15% of the code; split {:.4f}/{:.4f}/{:.4f} (tolerance {:.2f})", exact,
                     kMaskPlans, mask, random, keep, kSplitTolerance));
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void()>>> criteria = {
      {"A1", A1}, {"A2", A2}, {"A3", A3}, {"A4", A4}, {"A5", A5},
      {"A6", A6}, {"A7", A7}, {"A8", A8}, {"A9", A9}, {"A10", A10},
  };
  for (const auto& [id, run] : criteria) {
    try {
      run();
    } catch (const std::exception& e) {
      Report(id, false, std::string("error: ") + e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
