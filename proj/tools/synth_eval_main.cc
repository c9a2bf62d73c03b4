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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "synth_eval/corpus.h"
#include "synth_eval/error.h"
#include "synth_eval/executor.h"
#include "synth_eval/harness.h"
#include "synth_eval/metrics.h"
#include "synth_eval/mutator.h"
#include "synth_eval/scorer.h"
#include "synth_eval/sketcher.h"
#include "synth_eval/synthetic.h"
#include "synth_eval/trainer.h"
#include "synth_eval/transformer.h"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace synth_eval;

namespace {

struct Settings {
  uint64_t seed = 0;
  std::optional<Language> lang;
  int jobs = 1;
  std::string out;
  ScoreConfig score;
  TrainerConfig trainer;
  SandboxConfig sandbox;
  double match_threshold = 0.5;
  size_t crystal_k = 50;
};

// Throws kInvalidArgument on keys outside `allowed`.
void CheckKeys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
               const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, where + " must be an object");
  for (const auto& item : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&](const char* k) { return item.key() == k; })) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("unknown config key {}{}", where.empty() ? "" : where + ".", item.key()));
    }
  }
}

template <typename T>
void Take(const nlohmann::json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

void ApplyConfigFile(const std::string& path, Settings& s) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    CheckKeys(j, {"seed", "lang", "jobs", "out", "score", "trainer", "sandbox", "metrics"}, "");
    Take(j, "seed", s.seed);
    if (j.contains("lang")) s.lang = ParseLanguage(j["lang"].get<std::string>());
    Take(j, "jobs", s.jobs);
    Take(j, "out", s.out);
    if (j.contains("score")) {
      const auto& c = j["score"];
      CheckKeys(c, {"threshold", "gate", "pooling", "backend", "checkpoint", "hash_dim",
                    "hash_seed", "compile", "remote"}, "score");
      Take(c, "threshold", s.score.threshold);
      if (c.contains("gate")) s.score.gate = ParseGate(c["gate"].get<std::string>());
      if (c.contains("pooling")) s.score.pooling = ParsePooling(c["pooling"].get<std::string>());
      if (c.contains("backend")) s.score.backend = ParseBackend(c["backend"].get<std::string>());
      Take(c, "checkpoint", s.score.checkpoint);
      Take(c, "hash_dim", s.score.hash_dim);
      Take(c, "hash_seed", s.score.hash_seed);
      if (c.contains("compile")) {
        const auto& g = c["compile"];
        CheckKeys(g, {"python", "java", "timeout"}, "score.compile");
        for (const char* lang : {"python", "java"}) {
          if (g.contains(lang)) s.score.compile.commands[ParseLanguage(lang)] = g[lang].get<std::string>();
        }
        Take(g, "timeout", s.score.compile.timeout_seconds);
      }
      if (c.contains("remote")) {
        const auto& r = c["remote"];
        CheckKeys(r, {"host", "port", "model", "timeout"}, "score.remote");
        Take(r, "host", s.score.remote.host);
        Take(r, "port", s.score.remote.port);
        Take(r, "model", s.score.remote.model);
        Take(r, "timeout", s.score.remote.timeout_seconds);
      }
    }
    if (j.contains("trainer")) {
      const auto& t = j["trainer"];
      CheckKeys(t, {"dim", "temperature", "batch_size", "learning_rate", "epochs", "dropout",
                    "pooling", "mlm_weight"}, "trainer");
      Take(t, "dim", s.trainer.dim);
      Take(t, "temperature", s.trainer.temperature);
      Take(t, "batch_size", s.trainer.batch_size);
      Take(t, "learning_rate", s.trainer.learning_rate);
      Take(t, "epochs", s.trainer.epochs);
      Take(t, "dropout", s.trainer.dropout);
      if (t.contains("pooling")) s.trainer.pooling = ParsePooling(t["pooling"].get<std::string>());
      Take(t, "mlm_weight", s.trainer.mlm_weight);
    }
    if (j.contains("sandbox")) {
      const auto& b = j["sandbox"];
      CheckKeys(b, {"timeout", "memory_limit_mb", "python", "java"}, "sandbox");
      Take(b, "timeout", s.sandbox.timeout_seconds);
      Take(b, "memory_limit_mb", s.sandbox.memory_limit_mb);
      Take(b, "python", s.sandbox.python);
      Take(b, "java", s.sandbox.java);
    }
    if (j.contains("metrics")) {
      const auto& m = j["metrics"];
      CheckKeys(m, {"match_threshold", "crystal_k"}, "metrics");
      Take(m, "match_threshold", s.match_threshold);
      Take(m, "crystal_k", s.crystal_k);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("config {}: {}", path, e.what()));
  }
}

ordered_json ResolvedConfig(const std::string& command, const Settings& s) {
  ordered_json compile = ordered_json::object();
  for (const auto& [lang, cmd] : s.score.compile.commands) compile[std::string(LanguageName(lang))] = cmd;
  compile["timeout"] = s.score.compile.timeout_seconds;
  return {
      {"command", command},
      {"seed", s.seed},
      {"lang", s.lang ? std::string(LanguageName(*s.lang)) : "auto"},
      {"jobs", s.jobs},
      {"score",
       {{"threshold", s.score.threshold},
        {"gate", GateName(s.score.gate)},
        {"pooling", PoolingName(s.score.pooling)},
        {"backend", BackendName(s.score.backend)},
        {"checkpoint", s.score.checkpoint},
        {"hash_dim", s.score.hash_dim},
        {"hash_seed", s.score.hash_seed},
        {"compile", compile},
        {"remote",
         {{"host", s.score.remote.host},
          {"port", s.score.remote.port},
          {"model", s.score.remote.model},
          {"timeout", s.score.remote.timeout_seconds}}}}},
      {"trainer",
       {{"dim", s.trainer.dim},
        {"temperature", s.trainer.temperature},
        {"batch_size", s.trainer.batch_size},
        {"learning_rate", s.trainer.learning_rate},
        {"epochs", s.trainer.epochs},
        {"dropout", s.trainer.dropout},
        {"pooling", PoolingName(s.trainer.pooling)},
        {"mlm_weight", s.trainer.mlm_weight}}},
      {"sandbox",
       {{"timeout", s.sandbox.timeout_seconds},
        {"memory_limit_mb", s.sandbox.memory_limit_mb},
        {"python", s.sandbox.python},
        {"java", s.sandbox.java}}},
      {"metrics", {{"match_threshold", s.match_threshold}, {"crystal_k", s.crystal_k}}},
  };
}

std::string CsvHeader(const std::string& command, const Settings& s) {
  return "# synth-eval " + ResolvedConfig(command, s).dump() + "\n";
}

std::string ReadText(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), {});
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void WriteText(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << text;
}

Language LanguageFor(const std::string& path, const Settings& s) {
  if (s.lang) return *s.lang;
  return fs::path(path).extension() == ".java" ? Language::kJava : Language::kPython;
}

SourceUnit ReadUnit(const std::string& path, const Settings& s) {
  return SourceUnit(LanguageFor(path, s), ReadText(path));
}

std::vector<uint64_t> ParseSeeds(const std::string& list) {
  std::vector<uint64_t> seeds;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      seeds.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, "bad seed: " + item);
    }
  }
  if (seeds.empty()) throw Error(ErrorCode::kInvalidArgument, "no seeds given");
  return seeds;
}

std::vector<std::string> SplitList(const std::string& list) {
  std::vector<std::string> items;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw Error(ErrorCode::kInvalidArgument, "empty item in " + list);
    items.push_back(item);
  }
  return items;
}

TestOracle Oracle(const Settings& s) {
  SandboxConfig sandbox = s.sandbox;
  sandbox.stop_on_failure = true;
  return CachingOracle(MakeExecutionOracle(sandbox));
}

void LogMutation(const MutationStats& stats) {
  spdlog::info("mutated {} of the passing predictions; {} killed", stats.selected, stats.killed);
  for (const auto& id : stats.equivalent) spdlog::info("survivor: {}", id);
  for (const auto& id : stats.unmutable) spdlog::info("no mutable operator: {}", id);
}

std::string Fixed(double v) { return fmt::format("{:.6f}", v); }

// Subcommands.

int RunSketch(const Settings& s, const std::string& input, const std::string& map_path, bool json) {
  const SourceUnit unit = ReadUnit(input, s);
  const SketchResult result = Sketch(unit);
  ordered_json map = ordered_json::array();
  for (const auto& [original, placeholder] : result.map.entries()) {
    map.push_back({{"original", original}, {"placeholder", placeholder}});
  }
  if (json) {
    std::cout << ordered_json{{"config", ResolvedConfig("sketch", s)},
                              {"code", result.unit.text()},
                              {"map", map}}.dump(2)
              << '\n';
  } else {
    std::cout << result.unit.text();
  }
  std::string sidecar = map_path;
  if (sidecar.empty() && !s.out.empty()) sidecar = (fs::path(s.out) / "sketch_map.json").string();
  if (!sidecar.empty()) {
    WriteText(sidecar, ordered_json{{"config", ResolvedConfig("sketch", s)}, {"map", map}}.dump(2) + "\n");
  }
  return 0;
}

int RunTransform(const Settings& s, const std::string& input, const std::string& rules) {
  const SourceUnit unit = ReadUnit(input, s);
  const auto variant = SampleVariant(unit, ParseRuleSet(rules), s.seed);
  if (!variant) spdlog::warn("no transform site applies; the unit is unchanged");
  std::cout << (variant ? variant->text() : unit.text());
  return 0;
}

int RunMutateUnit(const Settings& s, const std::string& input, const std::string& classes) {
  const SourceUnit unit = ReadUnit(input, s);
  const auto mutant = MutateUnit(unit, ParseClassSet(classes), s.seed);
  if (!mutant) throw Error(ErrorCode::kNoMutableSite, "no mutable operator in " + input);
  std::cout << mutant->text();
  return 0;
}

int RunMutateCorpus(const Settings& s, const std::string& corpus, const std::string& classes,
                    double ratio) {
  const auto records = ReadCorpusFile(corpus);
  MutationPlan plan;
  plan.ratio = ratio;
  plan.seed = s.seed;
  plan.classes = ParseClassSet(classes);
  MutationStats stats;
  const auto mutated = MutateCorpus(records, plan, Oracle(s), &stats);
  LogMutation(stats);
  WriteCorpus(std::cout, mutated);
  return 0;
}

int RunMetrics(const Settings& s, const std::string& kinds_arg, const std::string& ref,
               const std::string& pred, const std::string& corpus) {
  std::vector<MetricKind> kinds;
  if (kinds_arg == "all") {
    kinds = AllMetricKinds();
  } else {
    for (const auto& k : SplitList(kinds_arg)) kinds.push_back(ParseMetricKind(k));
  }
  if (!corpus.empty()) {
    const auto records = ReadCorpusFile(corpus);
    const MetricContext context = CorpusMetricContext(records, s.crystal_k);
    std::cout << CsvHeader("metrics", s) << "id";
    for (MetricKind k : kinds) std::cout << ',' << MetricName(k);
    std::cout << '\n';
    for (const auto& r : records) {
      std::cout << r.id;
      for (MetricKind k : kinds) {
        std::cout << ',' << Fixed(ComputeMetric(k, r.ReferenceUnit(), r.PredictionUnit(), context));
      }
      std::cout << '\n';
    }
    return 0;
  }
  if (ref.empty() || pred.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "metrics needs --corpus or both --ref and --pred");
  }
  const SourceUnit r = ReadUnit(ref, s);
  const SourceUnit p(r.language(), ReadText(pred));
  MetricContext context;
  if (std::find(kinds.begin(), kinds.end(), MetricKind::kCrystalBleu) != kinds.end()) {
    spdlog::warn("crystal-bleu on a single pair has no corpus n-grams; it equals bleu");
  }
  for (MetricKind k : kinds) std::cout << MetricName(k) << ' ' << Fixed(ComputeMetric(k, r, p, context)) << '\n';
  return 0;
}

int RunTrain(const Settings& s, const std::string& corpus, size_t synthetic,
             const std::string& checkpoint, const std::string& log_path) {
  std::vector<TrainingRecord> records;
  if (!corpus.empty()) {
    records = ReadTrainingCorpusFile(corpus);
  } else if (synthetic > 0) {
    records = GenerateSyntheticCorpus(synthetic, s.seed, s.lang);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "train needs --corpus or --synthetic");
  }
  std::string ckpt = checkpoint;
  std::string log = log_path;
  if (ckpt.empty()) ckpt = (fs::path(s.out.empty() ? "." : s.out) / "model.ckpt").string();
  if (log.empty()) log = (fs::path(s.out.empty() ? "." : s.out) / "train_log.csv").string();
  TrainerConfig config = s.trainer;
  config.seed = s.seed;
  config.checkpoint_path = ckpt;
  spdlog::info("training on {} records", records.size());
  const TrainResult result = Train(records, config);
  for (const auto& id : result.excluded) spdlog::info("excluded: {}", id);
  for (const EpochLog& e : result.log) {
    spdlog::info("epoch {} mlm {:.6f} contrastive {:.6f}", e.epoch, e.mlm, e.contrastive);
  }
  if (fs::path(ckpt).has_parent_path()) fs::create_directories(fs::path(ckpt).parent_path());
  SaveCheckpointFile(result.model, ckpt);
  std::ostringstream csv;
  csv << CsvHeader("train", s);
  WriteTrainingLog(csv, result.log);
  WriteText(log, csv.str());
  std::cout << ckpt << '\n';
  return 0;
}

int RunScore(const Settings& s, const std::string& ref, const std::string& pred,
             const std::string& corpus) {
  const auto backend = MakeBackend(s.score);
  if (!corpus.empty()) {
    const auto records = ReadCorpusFile(corpus);
    const auto scores = ScoreCorpus(records, s.score, *backend);
    std::cout << CsvHeader("score", s) << "id,pass1,codescore_r,codescore_r_sim\n";
    for (size_t i = 0; i < records.size(); ++i) {
      std::cout << records[i].id << ','
                << (records[i].pass1 ? std::to_string(*records[i].pass1) : "") << ','
                << scores[i].binary << ',' << Fixed(scores[i].similarity) << '\n';
    }
    return 0;
  }
  if (ref.empty() || pred.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "score needs --corpus or both --ref and --pred");
  }
  const SourceUnit r = ReadUnit(ref, s);
  const SourceUnit p(r.language(), ReadText(pred));
  const ScoreResult result = Score(r, p, s.score, *backend);
  std::cout << ordered_json{{"gate_passed", result.gate_passed},
                            {"similarity", result.similarity},
                            {"binary", result.binary},
                            {"config", ResolvedConfig("score", s)}}.dump()
            << '\n';
  return 0;
}

int RunPerturb(const Settings& s, const std::string& corpus, const std::string& kind_name,
               const std::string& seeds_arg) {
  const auto records = ReadCorpusFile(corpus);
  const PerturbationKind kind = ParsePerturbation(kind_name);
  const auto seeds = seeds_arg.empty() ? std::vector<uint64_t>{s.seed} : ParseSeeds(seeds_arg);
  if (seeds.size() > 1 && s.out.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "several seeds need --out");
  }
  const TestOracle oracle = kind.tag == PerturbationTag::kSemantic ? Oracle(s) : TestOracle{};
  for (uint64_t seed : seeds) {
    MutationStats stats;
    const auto perturbed = PerturbCorpus(records, kind, seed, oracle, &stats);
    if (kind.tag == PerturbationTag::kSemantic) LogMutation(stats);
    std::ostringstream text;
    WriteCorpus(text, perturbed);
    if (s.out.empty()) {
      std::cout << text.str();
    } else {
      const std::string path =
          (fs::path(s.out) / fmt::format("{}-seed{}.jsonl", PerturbationName(kind), seed)).string();
      WriteText(path, text.str());
      std::cout << path << '\n';
    }
  }
  if (!s.out.empty()) {
    WriteText((fs::path(s.out) / "perturb_config.json").string(),
              ResolvedConfig("perturb", s).dump(2) + "\n");
  }
  return 0;
}

int RunReport(const Settings& s, const std::string& corpus, const std::string& kinds_arg,
              const std::string& metrics_arg, const std::string& seeds_arg) {
  const auto records = ReadCorpusFile(corpus);
  std::vector<PerturbationKind> kinds;
  for (const auto& k : SplitList(kinds_arg)) kinds.push_back(ParsePerturbation(k));
  const auto metrics = ParseExperimentMetrics(metrics_arg);
  const auto seeds = ParseSeeds(seeds_arg);
  const bool needs_backend = std::any_of(metrics.begin(), metrics.end(),
                                         [](const ExperimentMetric& m) { return m.codescore; });
  const bool needs_oracle = std::any_of(kinds.begin(), kinds.end(), [](const PerturbationKind& k) {
    return k.tag == PerturbationTag::kSemantic;
  });
  const auto backend = needs_backend ? MakeBackend(s.score) : nullptr;
  ExperimentSetup setup;
  setup.score = s.score;
  setup.backend = backend.get();
  if (needs_oracle) setup.oracle = Oracle(s);
  setup.metric_context = CorpusMetricContext(records, s.crystal_k);
  setup.match_threshold = s.match_threshold;

  const std::string config = ResolvedConfig("report", s).dump();
  std::vector<MetricReport> reports(kinds.size());
  const size_t jobs = static_cast<size_t>(std::max(1, s.jobs));
  for (size_t start = 0; start < kinds.size(); start += jobs) {
    std::vector<std::future<MetricReport>> pending;
    for (size_t k = start; k < std::min(kinds.size(), start + jobs); ++k) {
      pending.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, [&, k] {
        spdlog::info("running {}", PerturbationName(kinds[k]));
        return RunExperiment(records, metrics, kinds[k], seeds, setup);
      }));
    }
    for (size_t k = start; k < std::min(kinds.size(), start + jobs); ++k) {
      reports[k] = pending[k - start].get();
      reports[k].metadata.emplace_back("config", config);
      reports[k].metadata.emplace_back("corpus", fs::path(corpus).filename().string());
      for (const SeedRun& run : reports[k].runs) {
        if (kinds[k].tag == PerturbationTag::kSemantic) LogMutation(run.mutation);
      }
    }
  }
  const std::string table = RenderMaeTable(reports);
  std::cout << table;
  if (!s.out.empty()) {
    fs::create_directories(s.out);
    WriteText((fs::path(s.out) / "mae_table.txt").string(), table);
    for (const MetricReport& r : reports) {
      std::ostringstream json, csv;
      WriteReportJson(json, r);
      csv << CsvHeader("report", s);
      WriteScoreCsv(csv, r);
      WriteText((fs::path(s.out) / ("report_" + r.kind + ".json")).string(), json.str());
      WriteText((fs::path(s.out) / ("scores_" + r.kind + ".csv")).string(), csv.str());
    }
  }
  return 0;
}

int RunGradCheck(const Settings& s, size_t instances, double epsilon, double tolerance) {
  const GradCheckSummary g = RunGradCheckSuite(instances, s.seed, epsilon);
  std::cout << fmt::format("instances {}\nmlm_max_rel_error {:.3e}\ncontrastive_max_rel_error {:.3e}\n"
                           "planted_fault_rel_error {:.3e}\n",
                           g.instances, g.max_mlm_error, g.max_contrastive_error,
                           g.planted_fault_error);
  const bool ok = g.max_mlm_error < tolerance && g.max_contrastive_error < tolerance &&
                  g.planted_fault_error > 0.5;
  std::cout << (ok ? "ok" : "FAILED") << '\n';
  return ok ? 0 : 2;
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kIo:
    case ErrorCode::kParseErrorInput:
    case ErrorCode::kNoMutableSite:
    case ErrorCode::kMissingTests:
    case ErrorCode::kEmptyInput:
    case ErrorCode::kLengthMismatch:
    case ErrorCode::kInvalidReference:
      return 1;
    default:
      return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("synth-eval");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Syntax-robust, execution-aware code similarity scoring"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, lang, out, log_level = "info";
  uint64_t seed = 0;
  int jobs = 1;
  auto* o_seed = app.add_option("--seed", seed, "Random seed")->capture_default_str();
  auto* o_lang = app.add_option("--lang", lang, "python or java (default: from file extension)");
  auto* o_jobs = app.add_option("--jobs", jobs, "Parallel experiments in report")->check(CLI::PositiveNumber);
  auto* o_out = app.add_option("--out", out, "Output directory");
  app.add_option("--config", config_path, "JSON config file; flags override it");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error, off")->capture_default_str();

  // Score options shared by score and report.
  std::string backend, gate, pooling, checkpoint;
  double threshold = 0.5;
  auto add_score_options = [&](CLI::App* cmd) {
    cmd->add_option("--backend", backend, "hash, model or remote");
    cmd->add_option("--gate", gate, "parse or compile");
    cmd->add_option("--threshold", threshold, "Binarization threshold in (0, 1)");
    cmd->add_option("--pooling", pooling, "last-avg, first-last-avg, cls, cls-relu");
    cmd->add_option("--checkpoint", checkpoint, "Model checkpoint for the model backend");
  };

  std::string input = "-", map_path, rules = "all", classes = "all", kinds = "all", ref, pred, corpus,
              kind, seeds, metrics = "bleu,ed,codescore-r", report_kinds = "original,o2s,s2s";
  bool json = false;
  double ratio = 1.0, epsilon = 1e-5, tolerance = 1e-4;
  size_t synthetic = 0, instances = 20;
  std::string train_ckpt, train_log;
  int epochs = 0, dim = 0;
  double lr = 0.0, mlm_weight = -1.0;
  std::string train_pooling;

  auto* sketch = app.add_subcommand("sketch", "Replace user identifiers with placeholders");
  sketch->add_option("input", input, "Source file, or - for stdin")->capture_default_str();
  sketch->add_option("--map", map_path, "Write the identifier map as JSON");
  sketch->add_flag("--json", json, "Print code and map as one JSON object");

  auto* transform = app.add_subcommand("transform", "Sample a behavior-preserving variant");
  transform->add_option("input", input, "Source file, or - for stdin")->capture_default_str();
  transform->add_option("--rules", rules, "loop,expression,permute,condition or all")->capture_default_str();

  auto* mutate = app.add_subcommand("mutate", "Mutate one operator of a unit, or a corpus");
  mutate->add_option("input", input, "Source file, or - for stdin")->capture_default_str();
  mutate->add_option("--classes", classes, "Operator classes or all")->capture_default_str();
  mutate->add_option("--corpus", corpus, "Corpus file; mutated records go to stdout");
  mutate->add_option("--ratio", ratio, "Share of passing predictions to mutate")->capture_default_str();

  auto* metrics_cmd = app.add_subcommand("metrics", "Match-based metrics");
  metrics_cmd->add_option("--kind", kinds, "Comma-separated metric names or all")->capture_default_str();
  metrics_cmd->add_option("--ref", ref, "Reference file");
  metrics_cmd->add_option("--pred", pred, "Prediction file");
  metrics_cmd->add_option("--corpus", corpus, "Corpus file; prints CSV");

  auto* train = app.add_subcommand("train", "Train the encoder");
  train->add_option("--corpus", corpus, "Training corpus (id, lang, nl, code per line)");
  train->add_option("--synthetic", synthetic, "Train on this many generated units instead");
  train->add_option("--checkpoint", train_ckpt, "Checkpoint path (default: <out>/model.ckpt)");
  train->add_option("--log", train_log, "Loss log CSV (default: <out>/train_log.csv)");
  auto* o_epochs = train->add_option("--epochs", epochs);
  auto* o_dim = train->add_option("--dim", dim);
  auto* o_lr = train->add_option("--lr", lr);
  auto* o_mlm = train->add_option("--mlm-weight", mlm_weight);
  auto* o_tpool = train->add_option("--pooling", train_pooling);

  auto* score = app.add_subcommand("score", "Score a prediction against a reference");
  score->add_option("--ref", ref, "Reference file");
  score->add_option("--pred", pred, "Prediction file");
  score->add_option("--corpus", corpus, "Corpus file; prints CSV");
  add_score_options(score);

  auto* perturb = app.add_subcommand("perturb", "Perturb a corpus");
  perturb->add_option("--corpus", corpus, "Corpus file")->required();
  perturb->add_option("--kind", kind, "original, o2s, s2s, syntax, semantic-<percent>")->required();
  perturb->add_option("--seeds", seeds, "Comma-separated seeds (default: --seed)");

  auto* report = app.add_subcommand("report", "Run perturbation experiments");
  report->add_option("--corpus", corpus, "Corpus file")->required();
  report->add_option("--kinds", report_kinds, "Comma-separated perturbation kinds")->capture_default_str();
  report->add_option("--metrics", metrics, "Comma-separated metrics, codescore-r included")->capture_default_str();
  std::string report_seeds = "0,1,2,3,4";
  report->add_option("--seeds", report_seeds, "Comma-separated seeds")->capture_default_str();
  add_score_options(report);

  auto* grad = app.add_subcommand("grad-check", "Check encoder gradients on tiny models");
  grad->add_option("--instances", instances)->capture_default_str();
  grad->add_option("--epsilon", epsilon)->capture_default_str();
  grad->add_option("--tolerance", tolerance)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    spdlog::set_level(spdlog::level::from_str(log_level));
    Settings s;
    if (!config_path.empty()) ApplyConfigFile(config_path, s);
    if (o_seed->count()) s.seed = seed;
    if (o_lang->count()) s.lang = ParseLanguage(lang);
    if (o_jobs->count()) s.jobs = jobs;
    if (o_out->count()) s.out = out;
    for (CLI::App* cmd : {score, report}) {
      if (cmd->count("--backend")) s.score.backend = ParseBackend(backend);
      if (cmd->count("--gate")) s.score.gate = ParseGate(gate);
      if (cmd->count("--threshold")) s.score.threshold = threshold;
      if (cmd->count("--pooling")) s.score.pooling = ParsePooling(pooling);
      if (cmd->count("--checkpoint")) s.score.checkpoint = checkpoint;
    }
    if (o_epochs->count()) s.trainer.epochs = epochs;
    if (o_dim->count()) s.trainer.dim = dim;
    if (o_lr->count()) s.trainer.learning_rate = lr;
    if (o_mlm->count()) s.trainer.mlm_weight = mlm_weight;
    if (o_tpool->count()) s.trainer.pooling = ParsePooling(train_pooling);
    if (s.jobs < 1) throw Error(ErrorCode::kInvalidArgument, "jobs must be positive");

    if (*sketch) return RunSketch(s, input, map_path, json);
    if (*transform) return RunTransform(s, input, rules);
    if (*mutate) return corpus.empty() ? RunMutateUnit(s, input, classes)
                                       : RunMutateCorpus(s, corpus, classes, ratio);
    if (*metrics_cmd) return RunMetrics(s, kinds, ref, pred, corpus);
    if (*train) return RunTrain(s, corpus, synthetic, train_ckpt, train_log);
    if (*score) return RunScore(s, ref, pred, corpus);
    if (*perturb) return RunPerturb(s, corpus, kind, seeds);
    if (*report) return RunReport(s, corpus, report_kinds, metrics, report_seeds);
    if (*grad) return RunGradCheck(s, instances, epsilon, tolerance);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    spdlog::error("internal error: {}", e.what());
    return 2;
  }
  return 2;
}
