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

#include "synth_eval/scorer.h"

#include <filesystem>
#include <fstream>

#include <spdlog/spdlog.h>

#include "synth_eval/error.h"
#include "synth_eval/executor.h"
#include "synth_eval/sketcher.h"

namespace synth_eval {
namespace {

class HashBackend : public EncoderBackend {
 public:
  HashBackend(int d, uint64_t seed) : d_(d), seed_(seed) {
    if (d < 8) throw Error(ErrorCode::kInvalidArgument, "hash dimension must be at least 8");
  }
  EmbeddingVector Embed(const SourceUnit& sketched) const override {
    return HashEmbed(Tokenize(sketched), d_, seed_);
  }

 private:
  int d_;
  uint64_t seed_;
};

class ModelBackend : public EncoderBackend {
 public:
  ModelBackend(EncoderModel model, Pooling pooling)
      : model_(std::move(model)), pooling_(pooling) {}
  EmbeddingVector Embed(const SourceUnit& sketched) const override {
    return Encode(model_, Tokenize(sketched), pooling_);
  }

 private:
  EncoderModel model_;
  Pooling pooling_;
};

class RemoteBackend : public EncoderBackend {
 public:
  explicit RemoteBackend(RemoteConfig config) : config_(std::move(config)) {}
  EmbeddingVector Embed(const SourceUnit& sketched) const override {
    auto vectors = RemoteEmbed(config_, {{sketched.language(), sketched.text()}});
    return std::move(vectors.front());
  }

 private:
  RemoteConfig config_;
};

std::string ShellQuote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

}  // namespace

std::string_view GateName(GateKind gate) {
  return gate == GateKind::kParseOnly ? "parse" : "compile";
}

GateKind ParseGate(std::string_view name) {
  if (name == "parse") return GateKind::kParseOnly;
  if (name == "compile") return GateKind::kCompile;
  throw Error(ErrorCode::kInvalidArgument, "unknown gate: " + std::string(name));
}

std::string_view BackendName(BackendKind backend) {
  switch (backend) {
    case BackendKind::kModel:
      return "model";
    case BackendKind::kHash:
      return "hash";
    case BackendKind::kRemote:
      return "remote";
  }
  return "";
}

BackendKind ParseBackend(std::string_view name) {
  for (BackendKind b : {BackendKind::kModel, BackendKind::kHash, BackendKind::kRemote}) {
    if (BackendName(b) == name) return b;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown backend: " + std::string(name));
}

std::unique_ptr<EncoderBackend> MakeHashBackend(int d, uint64_t seed) {
  return std::make_unique<HashBackend>(d, seed);
}

std::unique_ptr<EncoderBackend> MakeModelBackend(EncoderModel model, Pooling pooling) {
  return std::make_unique<ModelBackend>(std::move(model), pooling);
}

std::unique_ptr<EncoderBackend> MakeRemoteBackend(RemoteConfig config) {
  return std::make_unique<RemoteBackend>(std::move(config));
}

std::unique_ptr<EncoderBackend> MakeBackend(const ScoreConfig& config) {
  switch (config.backend) {
    case BackendKind::kModel:
      if (config.checkpoint.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "the model backend needs a checkpoint");
      }
      return MakeModelBackend(LoadCheckpointFile(config.checkpoint), config.pooling);
    case BackendKind::kHash:
      return MakeHashBackend(config.hash_dim, config.hash_seed);
    case BackendKind::kRemote: {
      RemoteConfig remote = config.remote;
      remote.pooling = std::string(PoolingName(config.pooling));
      return MakeRemoteBackend(std::move(remote));
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown backend");
}

bool CompileGatePasses(const SourceUnit& unit, const CompileGate& gate) {
  const auto it = gate.commands.find(unit.language());
  if (it == gate.commands.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("no compile command for {}", LanguageName(unit.language())));
  }
  TempDir dir;
  std::string text = unit.text();
  std::string name = "unit.py";
  if (unit.language() == Language::kJava) {
    name = "Main.java";
    text = "public class Main {\n" + text + "\n}\n";
  }
  const std::string file = (std::filesystem::path(dir.path()) / name).string();
  {
    std::ofstream out(file, std::ios::binary);
    out << text;
  }
  std::string command = it->second;
  for (size_t pos = command.find("{file}"); pos != std::string::npos;
       pos = command.find("{file}", pos)) {
    const std::string quoted = ShellQuote(file);
    command.replace(pos, 6, quoted);
    pos += quoted.size();
  }
  const ProcessResult run = RunProcess({"/bin/sh", "-c", command}, dir.path(),
                                       gate.timeout_seconds);
  if (run.timed_out) {
    spdlog::warn("compile gate timed out after {} s", gate.timeout_seconds);
    return false;
  }
  return run.exit_code == 0;
}

ScoreResult Score(const SourceUnit& reference, const SourceUnit& prediction,
                  const ScoreConfig& config, const EncoderBackend& backend) {
  if (!(config.threshold > 0.0 && config.threshold < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold must lie in (0, 1)");
  }
  if (reference.has_error()) {
    throw Error(ErrorCode::kInvalidReference, "reference does not parse");
  }
  ScoreResult result;
  result.gate_passed = config.gate == GateKind::kParseOnly
                           ? !prediction.has_error()
                           : CompileGatePasses(prediction, config.compile);
  if (result.gate_passed && prediction.has_error()) {
    spdlog::warn("prediction compiles but does not parse; treated as a gate failure");
    result.gate_passed = false;
  }
  if (!result.gate_passed) return result;

  const SourceUnit ref_sketch = Sketch(reference).unit;
  const SourceUnit pred_sketch = Sketch(prediction).unit;
  EmbeddingVector ref_vec, pred_vec;
  try {
    ref_vec = backend.Embed(ref_sketch);
    pred_vec = backend.Embed(pred_sketch);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument) throw;
    throw Error(ErrorCode::kBackendFailure, e.what());
  }
  result.similarity = Cosine(ref_vec, pred_vec);
  result.binary = result.similarity > config.threshold ? 1 : 0;
  return result;
}

std::vector<ScoreResult> ScoreCorpus(const std::vector<CorpusRecord>& records,
                                     const ScoreConfig& config, const EncoderBackend& backend) {
  std::vector<ScoreResult> results;
  results.reserve(records.size());
  for (const CorpusRecord& r : records) {
    try {
      results.push_back(Score(r.ReferenceUnit(), r.PredictionUnit(), config, backend));
    } catch (const Error& e) {
      throw Error(e.code(), "record " + r.id + ": " + e.what());
    }
  }
  return results;
}

}  // namespace synth_eval
