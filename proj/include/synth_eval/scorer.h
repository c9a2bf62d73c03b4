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


#ifndef SYNTH_EVAL_SCORER_H_
#define SYNTH_EVAL_SCORER_H_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "synth_eval/code_model.h"
#include "synth_eval/corpus.h"
#include "synth_eval/encoder.h"

namespace synth_eval {

enum class GateKind { kParseOnly, kCompile };

std::string_view GateName(GateKind gate);
GateKind ParseGate(std::string_view name);

// Shell command templates with a {file} placeholder, keyed by language. The
// unit is written to unit.py, or Main.java wrapped in `public class Main`.
struct CompileGate {
  std::map<Language, std::string> commands;
  double timeout_seconds = 30.0;
};

enum class BackendKind { kModel, kHash, kRemote };

std::string_view BackendName(BackendKind backend);
BackendKind ParseBackend(std::string_view name);

struct ScoreConfig {
  double threshold = 0.5;
  GateKind gate = GateKind::kParseOnly;
  CompileGate compile;
  Pooling pooling = Pooling::kSummaryRelu;
  BackendKind backend = BackendKind::kHash;
  std::string checkpoint;  // kModel
  RemoteConfig remote;     // kRemote; its pooling follows `pooling`
  int hash_dim = 1024;
  uint64_t hash_seed = 0;
};

struct ScoreResult {
  bool gate_passed = false;
  double similarity = 0.0;
  int binary = 0;

  bool operator==(const ScoreResult&) const = default;
};

// Maps a sketched unit to its embedding.
class EncoderBackend {
 public:
  virtual ~EncoderBackend() = default;
  virtual EmbeddingVector Embed(const SourceUnit& sketched) const = 0;
};

std::unique_ptr<EncoderBackend> MakeHashBackend(int d, uint64_t seed);
std::unique_ptr<EncoderBackend> MakeModelBackend(EncoderModel model, Pooling pooling);
std::unique_ptr<EncoderBackend> MakeRemoteBackend(RemoteConfig config);
// Backend selected by `config` (loads the checkpoint for kModel).
std::unique_ptr<EncoderBackend> MakeBackend(const ScoreConfig& config);

// Runs the compile gate command. Timeouts count as failures.
bool CompileGatePasses(const SourceUnit& unit, const CompileGate& gate);

// Gate, sketch, embed, cosine, binarize (strictly above the threshold).
// Throws kInvalidReference, kBackendFailure, kInvalidArgument.
ScoreResult Score(const SourceUnit& reference, const SourceUnit& prediction,
                  const ScoreConfig& config, const EncoderBackend& backend);

// Scores every record's prediction (the reference when absent), in order.
std::vector<ScoreResult> ScoreCorpus(const std::vector<CorpusRecord>& records,
                                     const ScoreConfig& config, const EncoderBackend& backend);

}  // namespace synth_eval

#endif  // SYNTH_EVAL_SCORER_H_
