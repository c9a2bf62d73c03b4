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


#ifndef SYNTH_EVAL_TRAINER_H_
#define SYNTH_EVAL_TRAINER_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "synth_eval/code_model.h"
#include "synth_eval/encoder.h"

namespace synth_eval {

enum class MaskAction { kReplaceWithMask, kReplaceWithRandom, kKeep };

// Positions refer to the code tokens only.
struct MaskPlan {
  std::vector<size_t> positions;
  std::vector<MaskAction> actions;
  std::vector<int> random_ids;  // used by kReplaceWithRandom entries
};

// round(0.15 * code_length) distinct positions; actions 80/10/10.
MaskPlan SampleMaskPlan(size_t code_length, const Vocabulary& vocab, uint64_t seed);

struct TrainingPair {
  TokenList nl;
  TokenList code;
};

struct LossResult {
  double loss = 0.0;
  Gradients grads;
};

// Sum over masked positions of -log softmax(E h1_i)[original id].
LossResult MlmLoss(const EncoderModel& model, const TrainingPair& pair, const MaskPlan& plan);

struct EncoderInput {
  std::vector<int> ids;
  std::optional<DropoutMask> dropout;
};

struct Triple {
  EncoderInput anchor;
  EncoderInput positive;
  EncoderInput negative;
};

// Mean over anchors of the InfoNCE loss with every positive and negative of
// the batch in the denominator. Throws kZeroEmbedding, kInvalidArgument.
LossResult ContrastiveLoss(const EncoderModel& model, const std::vector<Triple>& batch,
                           double temperature, Pooling pooling);

struct PositiveSample {
  TokenList anchor;
  TokenList positive;
  // Anchor and positive are the same tokens, told apart by dropout.
  bool dropout_branch = false;
};

// Sketched anchor tokens paired with either themselves (dropout branch) or a
// sketched syntactic variant. Throws kParseErrorInput.
PositiveSample BuildPositive(const SourceUnit& unit, uint64_t seed);

// Sketched tokens of a single-operator mutant. Throws kNoMutableSite,
// kParseErrorInput.
TokenList BuildNegative(const SourceUnit& unit, uint64_t seed);

struct TrainerConfig {
  int dim = 64;
  double temperature = 0.05;
  size_t batch_size = 16;
  double learning_rate = 0.05;
  int epochs = 5;
  double dropout = 0.1;
  uint64_t seed = 0;
  Pooling pooling = Pooling::kSummaryRelu;
  double mlm_weight = 1.0;
  // Written with the last finite parameters when training diverges.
  std::string checkpoint_path;
};

struct TrainingRecord {
  std::string id;
  Language lang = Language::kPython;
  std::string nl;
  std::string code;
};

// Lines of {id, lang, nl, code}.
std::vector<TrainingRecord> ReadTrainingCorpus(std::istream& in);
std::vector<TrainingRecord> ReadTrainingCorpusFile(const std::string& path);
void WriteTrainingCorpus(std::ostream& out, const std::vector<TrainingRecord>& records);

struct EpochLog {
  int epoch = 0;
  double mlm = 0.0;
  double contrastive = 0.0;
  double total = 0.0;
};

struct TrainResult {
  EncoderModel model;
  std::vector<EpochLog> log;
  // Records dropped because they do not parse or have no mutable operator.
  std::vector<std::string> excluded;
};

// "epoch,mlm,contrastive,total" rows.
void WriteTrainingLog(std::ostream& out, const std::vector<EpochLog>& log);

// Seeded mini-batch gradient descent on mlm_weight * MLM + contrastive loss.
// The vocabulary comes from the sketched code and NL tokens unless `init`
// supplies a model. Throws kDivergence, kEmptyInput.
TrainResult Train(const std::vector<TrainingRecord>& corpus, const TrainerConfig& config,
                  const std::optional<EncoderModel>& init = std::nullopt);

using LossFunction = std::function<LossResult(const EncoderModel&)>;

// Max over all parameters of |analytic - numeric| / max(|numeric|, 1e-6),
// with central differences of step `epsilon` in [1e-6, 1e-3]. The analytic
// gradient is multiplied by `fault_scale` (1 for a real check).
double GradCheck(const EncoderModel& model, const LossFunction& loss, double epsilon,
                 double fault_scale = 1.0);

struct GradCheckSummary {
  size_t instances = 0;
  double max_mlm_error = 0.0;
  double max_contrastive_error = 0.0;
  // Error of a contrastive check with the analytic gradient doubled.
  double planted_fault_error = 0.0;
};

// Checks MLM and contrastive gradients on `instances` seeded tiny models
// (d = 6, 20 words, every pooling in turn).
GradCheckSummary RunGradCheckSuite(size_t instances, uint64_t seed, double epsilon = 1e-5);

}  // namespace synth_eval

#endif  // SYNTH_EVAL_TRAINER_H_
