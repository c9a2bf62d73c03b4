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


#ifndef SYNTH_EVAL_ENCODER_H_
#define SYNTH_EVAL_ENCODER_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "synth_eval/code_model.h"

namespace synth_eval {

using TokenList = std::vector<std::string>;
using EmbeddingVector = Eigen::VectorXd;

class Vocabulary {
 public:
  static constexpr int kSummary = 0;
  static constexpr int kSep = 1;
  static constexpr int kMask = 2;
  static constexpr int kUnk = 3;
  static constexpr int kPad = 4;
  static constexpr int kNumSpecial = 5;

  // Only the special tokens.
  Vocabulary();

  // Every token occurring at least `min_count` times, in order of first
  // appearance.
  static Vocabulary Build(const std::vector<TokenList>& sequences, int min_count = 1);

  // Returns the id of `token`, adding it when new. Special spellings map to
  // kUnk.
  int Add(const std::string& token);
  int Id(const std::string& token) const;
  const std::string& Token(int id) const { return tokens_.at(id); }
  size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::vector<int> Ids(const TokenList& tokens) const;

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

enum class Pooling { kLastAvg, kFirstLastAvg, kSummary, kSummaryRelu };

const std::vector<Pooling>& AllPoolings();
// "last-avg", "first-last-avg", "cls", "cls-relu".
std::string_view PoolingName(Pooling pooling);
Pooling ParsePooling(std::string_view name);

struct EncoderModel {
  Vocabulary vocab;
  int d = 0;
  uint64_t seed = 0;
  Eigen::MatrixXd E;  // |V| x d
  Eigen::MatrixXd W;  // d x d
  Eigen::VectorXd b;  // d

  // Seeded init: E and W entries N(0, 1/d), b = 0. Throws kInvalidArgument
  // when d < 8 unless `allow_small` is set.
  static EncoderModel Init(Vocabulary vocab, int d, uint64_t seed, bool allow_small = false);

  size_t ParameterCount() const { return E.size() + W.size() + b.size(); }
  bool operator==(const EncoderModel& other) const;
};

// Elementwise keep/drop multipliers on layer-0 states, rescaled by 1/(1-p).
struct DropoutMask {
  double p = 0.1;
  uint64_t seed = 0;
};

struct Gradients {
  Eigen::MatrixXd dE;
  Eigen::MatrixXd dW;
  Eigen::VectorXd db;

  static Gradients Zero(const EncoderModel& model);
  Gradients& operator+=(const Gradients& other);
  Gradients& operator*=(double scale);
};

// Intermediate states of one forward pass.
struct ForwardState {
  std::vector<int> ids;     // model input, SUMMARY first
  Eigen::MatrixXd scale;    // N x d dropout multipliers (empty without dropout)
  Eigen::MatrixXd h0;       // N x d
  Eigen::MatrixXd u;        // N x d, h0 + mean(h0)
  Eigen::MatrixXd h1;       // N x d
};

// [SUMMARY] ++ ids(tokens).
std::vector<int> CodeInput(const Vocabulary& vocab, const TokenList& tokens);
// [SUMMARY] ++ ids(nl) ++ [SEP] ++ ids(code).
std::vector<int> PairInput(const Vocabulary& vocab, const TokenList& nl, const TokenList& code);

ForwardState Forward(const EncoderModel& model, const std::vector<int>& ids,
                     const std::optional<DropoutMask>& dropout = std::nullopt);
EmbeddingVector Pool(const ForwardState& state, Pooling pooling);

// Accumulates into `grads` the gradient flowing from dL/dh1 (N x d) and a
// direct dL/dh0 term (N x d, may be empty).
void Backward(const EncoderModel& model, const ForwardState& state,
              const Eigen::MatrixXd& d_h1, const Eigen::MatrixXd& d_h0, Gradients& grads);
// Backward from the gradient of a pooled vector.
void BackwardPooled(const EncoderModel& model, const ForwardState& state, Pooling pooling,
                    const EmbeddingVector& d_pooled, Gradients& grads);

// Throws kEmptyInput for an empty token list.
EmbeddingVector Encode(const EncoderModel& model, const TokenList& tokens, Pooling pooling,
                       const std::optional<DropoutMask>& dropout = std::nullopt);

// Zero vectors give 0. Throws kDimensionMismatch.
double Cosine(const EmbeddingVector& u, const EmbeddingVector& v);

// Feature-hashed bag of tokens, clamped at 0. Throws kInvalidArgument for d < 8.
EmbeddingVector HashEmbed(const TokenList& tokens, int d, uint64_t seed);

// Binary little-endian container:
//   "SECKPT01" | u32 version | u32 d | u64 seed | u32 |V|
//   | |V| x (u32 length, bytes) | E row-major | W row-major | b   (f64 each)
void SaveCheckpoint(const EncoderModel& model, std::ostream& out);
void SaveCheckpointFile(const EncoderModel& model, const std::string& path);
EncoderModel LoadCheckpoint(std::istream& in);
EncoderModel LoadCheckpointFile(const std::string& path);

struct RemoteConfig {
  std::string host = "127.0.0.1";
  int port = 8000;
  std::string model = "default";
  std::string pooling = "cls-relu";
  double timeout_seconds = 30.0;
};

struct RemoteHealth {
  std::string status;
  std::string model;
  int dim = 0;
};

// GET /v1/health. Throws kTransport or kProtocolMismatch.
RemoteHealth RemoteHealthCheck(const RemoteConfig& config);

// POST /v1/embed; vectors in request order. Throws kTransport,
// kProtocolMismatch, or kDimensionMismatch (a vector whose length differs from
// the advertised dim).
std::vector<EmbeddingVector> RemoteEmbed(
    const RemoteConfig& config, const std::vector<std::pair<Language, std::string>>& snippets);

}  // namespace synth_eval

#endif  // SYNTH_EVAL_ENCODER_H_
