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

#include "synth_eval/encoder.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "synth_eval/error.h"
#include "synth_eval/random.h"

namespace synth_eval {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint IO assumes a little-endian host");

constexpr char kMagic[8] = {'S', 'E', 'C', 'K', 'P', 'T', '0', '1'};
constexpr uint32_t kCheckpointVersion = 1;

const char* const kSpecialTokens[Vocabulary::kNumSpecial] = {"<s>", "</s>", "<mask>",
                                                             "<unk>", "<pad>"};

template <typename T>
void WritePod(std::ostream& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.write(buf, sizeof(T));
}

template <typename T>
T ReadPod(std::istream& in) {
  char buf[sizeof(T)];
  if (!in.read(buf, sizeof(T))) {
    throw Error(ErrorCode::kIo, "checkpoint truncated");
  }
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

void WriteMatrix(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) WritePod<double>(out, m(r, c));
  }
}

void ReadMatrix(std::istream& in, Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = ReadPod<double>(in);
  }
}

uint64_t Fnv1a(std::string_view text) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

nlohmann::json ParseBody(const httplib::Result& res, std::string_view endpoint) {
  if (!res) {
    throw Error(ErrorCode::kTransport, std::string(endpoint) + ": " +
                                           httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kProtocolMismatch,
                std::string(endpoint) + ": HTTP " + std::to_string(res->status) + " " +
                    res->body.substr(0, 200));
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kProtocolMismatch,
                std::string(endpoint) + ": malformed body: " + e.what());
  }
}

httplib::Client MakeClient(const RemoteConfig& config) {
  httplib::Client client(config.host, config.port);
  const auto seconds = static_cast<time_t>(config.timeout_seconds);
  const auto micros =
      static_cast<time_t>((config.timeout_seconds - static_cast<double>(seconds)) * 1e6);
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);
  return client;
}

}  // namespace

Vocabulary::Vocabulary() {
  for (const char* special : kSpecialTokens) {
    ids_.emplace(special, static_cast<int>(tokens_.size()));
    tokens_.emplace_back(special);
  }
}

Vocabulary Vocabulary::Build(const std::vector<TokenList>& sequences, int min_count) {
  std::unordered_map<std::string, int> counts;
  std::vector<std::string> order;
  for (const TokenList& seq : sequences) {
    for (const std::string& token : seq) {
      if (counts[token]++ == 0) order.push_back(token);
    }
  }
  Vocabulary vocab;
  for (const std::string& token : order) {
    if (counts[token] >= min_count) vocab.Add(token);
  }
  return vocab;
}

int Vocabulary::Add(const std::string& token) {
  auto it = ids_.find(token);
  if (it != ids_.end()) return it->second < kNumSpecial ? kUnk : it->second;
  const int id = static_cast<int>(tokens_.size());
  ids_.emplace(token, id);
  tokens_.push_back(token);
  return id;
}

int Vocabulary::Id(const std::string& token) const {
  auto it = ids_.find(token);
  if (it == ids_.end() || it->second < kNumSpecial) return kUnk;
  return it->second;
}

std::vector<int> Vocabulary::Ids(const TokenList& tokens) const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const auto& token : tokens) out.push_back(Id(token));
  return out;
}

const std::vector<Pooling>& AllPoolings() {
  static const std::vector<Pooling> all = {Pooling::kLastAvg, Pooling::kFirstLastAvg,
                                           Pooling::kSummary, Pooling::kSummaryRelu};
  return all;
}

std::string_view PoolingName(Pooling pooling) {
  switch (pooling) {
    case Pooling::kLastAvg: return "last-avg";
    case Pooling::kFirstLastAvg: return "first-last-avg";
    case Pooling::kSummary: return "cls";
    case Pooling::kSummaryRelu: return "cls-relu";
  }
  return "?";
}

Pooling ParsePooling(std::string_view name) {
  for (Pooling pooling : AllPoolings()) {
    if (PoolingName(pooling) == name) return pooling;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown pooling '" + std::string(name) + "'");
}

EncoderModel EncoderModel::Init(Vocabulary vocab, int d, uint64_t seed, bool allow_small) {
  if (d < 1 || (d < 8 && !allow_small)) {
    throw Error(ErrorCode::kInvalidArgument, "encoder dimension must be at least 8");
  }
  EncoderModel model;
  model.vocab = std::move(vocab);
  model.d = d;
  model.seed = seed;
  const double stddev = 1.0 / std::sqrt(static_cast<double>(d));
  Rng rng(MixSeed(seed, 0x656e63));
  model.E.resize(static_cast<Eigen::Index>(model.vocab.size()), d);
  for (Eigen::Index r = 0; r < model.E.rows(); ++r) {
    for (Eigen::Index c = 0; c < d; ++c) model.E(r, c) = stddev * rng.Normal();
  }
  model.W.resize(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) model.W(r, c) = stddev * rng.Normal();
  }
  model.b = Eigen::VectorXd::Zero(d);
  return model;
}

bool EncoderModel::operator==(const EncoderModel& other) const {
  return vocab == other.vocab && d == other.d && seed == other.seed && E == other.E &&
         W == other.W && b == other.b;
}

Gradients Gradients::Zero(const EncoderModel& model) {
  return {Eigen::MatrixXd::Zero(model.E.rows(), model.E.cols()),
          Eigen::MatrixXd::Zero(model.W.rows(), model.W.cols()),
          Eigen::VectorXd::Zero(model.b.size())};
}

Gradients& Gradients::operator+=(const Gradients& other) {
  dE += other.dE;
  dW += other.dW;
  db += other.db;
  return *this;
}

Gradients& Gradients::operator*=(double scale) {
  dE *= scale;
  dW *= scale;
  db *= scale;
  return *this;
}

std::vector<int> CodeInput(const Vocabulary& vocab, const TokenList& tokens) {
  std::vector<int> ids = {Vocabulary::kSummary};
  for (const auto& token : tokens) ids.push_back(vocab.Id(token));
  return ids;
}

std::vector<int> PairInput(const Vocabulary& vocab, const TokenList& nl,
                           const TokenList& code) {
  std::vector<int> ids = {Vocabulary::kSummary};
  for (const auto& token : nl) ids.push_back(vocab.Id(token));
  ids.push_back(Vocabulary::kSep);
  for (const auto& token : code) ids.push_back(vocab.Id(token));
  return ids;
}

ForwardState Forward(const EncoderModel& model, const std::vector<int>& ids,
                     const std::optional<DropoutMask>& dropout) {
  const Eigen::Index n = static_cast<Eigen::Index>(ids.size());
  if (n == 0) throw Error(ErrorCode::kEmptyInput, "empty encoder input");
  ForwardState state;
  state.ids = ids;
  state.h0.resize(n, model.d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int id = ids[static_cast<size_t>(i)];
    if (id < 0 || id >= model.E.rows()) {
      throw Error(ErrorCode::kInvalidArgument, "token id out of range");
    }
    state.h0.row(i) = model.E.row(id);
  }
  if (dropout && dropout->p > 0.0) {
    if (dropout->p >= 1.0) throw Error(ErrorCode::kInvalidArgument, "dropout p must be < 1");
    Rng rng(MixSeed(dropout->seed, 0x64726f70));
    const double keep_scale = 1.0 / (1.0 - dropout->p);
    state.scale.resize(n, model.d);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index c = 0; c < model.d; ++c) {
        state.scale(i, c) = rng.Uniform() < dropout->p ? 0.0 : keep_scale;
      }
    }
    state.h0 = state.h0.cwiseProduct(state.scale);
  }
  const Eigen::RowVectorXd mean = state.h0.colwise().mean();
  state.u = state.h0.rowwise() + mean;
  state.h1 = state.u * model.W.transpose();
  state.h1.rowwise() += model.b.transpose();
  return state;
}

EmbeddingVector Pool(const ForwardState& state, Pooling pooling) {
  switch (pooling) {
    case Pooling::kLastAvg: return state.h1.colwise().mean().transpose();
    case Pooling::kFirstLastAvg:
      return 0.5 * (state.h0.colwise().mean() + state.h1.colwise().mean()).transpose();
    case Pooling::kSummary: return state.h1.row(0).transpose();
    case Pooling::kSummaryRelu: return state.h1.row(0).transpose().cwiseMax(0.0);
  }
  return {};
}

void Backward(const EncoderModel& model, const ForwardState& state,
              const Eigen::MatrixXd& d_h1, const Eigen::MatrixXd& d_h0, Gradients& grads) {
  grads.dW += d_h1.transpose() * state.u;
  grads.db += d_h1.colwise().sum().transpose();
  const Eigen::MatrixXd d_u = d_h1 * model.W;
  Eigen::MatrixXd d_e = d_u.rowwise() + d_u.colwise().mean();
  if (d_h0.size() != 0) d_e += d_h0;
  if (state.scale.size() != 0) d_e = d_e.cwiseProduct(state.scale);
  for (Eigen::Index i = 0; i < d_e.rows(); ++i) {
    grads.dE.row(state.ids[static_cast<size_t>(i)]) += d_e.row(i);
  }
}

void BackwardPooled(const EncoderModel& model, const ForwardState& state, Pooling pooling,
                    const EmbeddingVector& d_pooled, Gradients& grads) {
  const Eigen::Index n = state.h1.rows();
  Eigen::MatrixXd d_h1 = Eigen::MatrixXd::Zero(n, model.d);
  Eigen::MatrixXd d_h0;
  switch (pooling) {
    case Pooling::kLastAvg:
      d_h1.rowwise() = d_pooled.transpose() / static_cast<double>(n);
      break;
    case Pooling::kFirstLastAvg:
      d_h1.rowwise() = d_pooled.transpose() / (2.0 * static_cast<double>(n));
      d_h0 = d_h1;
      break;
    case Pooling::kSummary:
      d_h1.row(0) = d_pooled.transpose();
      break;
    case Pooling::kSummaryRelu:
      for (Eigen::Index c = 0; c < model.d; ++c) {
        d_h1(0, c) = state.h1(0, c) > 0.0 ? d_pooled(c) : 0.0;
      }
      break;
  }
  Backward(model, state, d_h1, d_h0, grads);
}

EmbeddingVector Encode(const EncoderModel& model, const TokenList& tokens, Pooling pooling,
                       const std::optional<DropoutMask>& dropout) {
  if (tokens.empty()) throw Error(ErrorCode::kEmptyInput, "cannot encode an empty token list");
  return Pool(Forward(model, CodeInput(model.vocab, tokens), dropout), pooling);
}

double Cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "cosine of vectors with different dimension");
  }
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return u.dot(v) / (nu * nv);
}

EmbeddingVector HashEmbed(const TokenList& tokens, int d, uint64_t seed) {
  if (d < 8) throw Error(ErrorCode::kInvalidArgument, "hash dimension must be at least 8");
  EmbeddingVector v = EmbeddingVector::Zero(d);
  for (const auto& token : tokens) {
    v(static_cast<Eigen::Index>(MixSeed(Fnv1a(token), seed) % static_cast<uint64_t>(d))) +=
        1.0;
  }
  return v.cwiseMax(0.0);
}

void SaveCheckpoint(const EncoderModel& model, std::ostream& out) {
  out.write(kMagic, sizeof(kMagic));
  WritePod<uint32_t>(out, kCheckpointVersion);
  WritePod<uint32_t>(out, static_cast<uint32_t>(model.d));
  WritePod<uint64_t>(out, model.seed);
  WritePod<uint32_t>(out, static_cast<uint32_t>(model.vocab.size()));
  for (const auto& token : model.vocab.tokens()) {
    WritePod<uint32_t>(out, static_cast<uint32_t>(token.size()));
    out.write(token.data(), static_cast<std::streamsize>(token.size()));
  }
  WriteMatrix(out, model.E);
  WriteMatrix(out, model.W);
  for (Eigen::Index i = 0; i < model.b.size(); ++i) WritePod<double>(out, model.b(i));
  if (!out) throw Error(ErrorCode::kIo, "checkpoint write failed");
}

void SaveCheckpointFile(const EncoderModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write checkpoint " + path);
  SaveCheckpoint(model, out);
}

EncoderModel LoadCheckpoint(std::istream& in) {
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::kIo, "not a checkpoint file");
  }
  const auto version = ReadPod<uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::kIo, "unsupported checkpoint version " + std::to_string(version));
  }
  EncoderModel model;
  model.d = static_cast<int>(ReadPod<uint32_t>(in));
  model.seed = ReadPod<uint64_t>(in);
  const auto vocab_size = ReadPod<uint32_t>(in);
  if (vocab_size < Vocabulary::kNumSpecial || model.d < 1) {
    throw Error(ErrorCode::kIo, "corrupt checkpoint header");
  }
  std::vector<std::string> tokens;
  for (uint32_t i = 0; i < vocab_size; ++i) {
    const auto len = ReadPod<uint32_t>(in);
    std::string token(len, '\0');
    if (!in.read(token.data(), len)) throw Error(ErrorCode::kIo, "checkpoint truncated");
    tokens.push_back(std::move(token));
  }
  for (int i = 0; i < Vocabulary::kNumSpecial; ++i) {
    if (tokens[static_cast<size_t>(i)] != kSpecialTokens[i]) {
      throw Error(ErrorCode::kIo, "checkpoint special tokens do not match");
    }
  }
  for (size_t i = Vocabulary::kNumSpecial; i < tokens.size(); ++i) {
    if (model.vocab.Add(tokens[i]) != static_cast<int>(i)) {
      throw Error(ErrorCode::kIo, "checkpoint vocabulary has duplicates");
    }
  }
  model.E.resize(vocab_size, model.d);
  model.W.resize(model.d, model.d);
  model.b.resize(model.d);
  ReadMatrix(in, model.E);
  ReadMatrix(in, model.W);
  for (Eigen::Index i = 0; i < model.b.size(); ++i) model.b(i) = ReadPod<double>(in);
  return model;
}

EncoderModel LoadCheckpointFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open checkpoint " + path);
  return LoadCheckpoint(in);
}

RemoteHealth RemoteHealthCheck(const RemoteConfig& config) {
  httplib::Client client = MakeClient(config);
  const nlohmann::json body = ParseBody(client.Get("/v1/health"), "/v1/health");
  try {
    return {body.at("status").get<std::string>(), body.at("model").get<std::string>(),
            body.at("dim").get<int>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kProtocolMismatch, std::string("/v1/health: ") + e.what());
  }
}

std::vector<EmbeddingVector> RemoteEmbed(
    const RemoteConfig& config, const std::vector<std::pair<Language, std::string>>& snippets) {
  if (snippets.empty()) return {};
  nlohmann::json request = {{"model", config.model}, {"pooling", config.pooling}};
  nlohmann::json items = nlohmann::json::array();
  for (const auto& [lang, code] : snippets) {
    items.push_back({{"lang", LanguageName(lang)}, {"code", code}});
  }
  request["snippets"] = std::move(items);
  httplib::Client client = MakeClient(config);
  const nlohmann::json body = ParseBody(
      client.Post("/v1/embed", request.dump(), "application/json"), "/v1/embed");
  std::vector<EmbeddingVector> vectors;
  try {
    const int dim = body.at("dim").get<int>();
    const auto& rows = body.at("vectors");
    if (!rows.is_array() || rows.size() != snippets.size()) {
      throw Error(ErrorCode::kProtocolMismatch,
                  "/v1/embed: expected " + std::to_string(snippets.size()) + " vectors");
    }
    for (const auto& row : rows) {
      if (!row.is_array() || static_cast<int>(row.size()) != dim) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "/v1/embed: vector length differs from dim " + std::to_string(dim));
      }
      EmbeddingVector v(dim);
      for (int i = 0; i < dim; ++i) v(i) = row[static_cast<size_t>(i)].get<double>();
      vectors.push_back(std::move(v));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kProtocolMismatch, std::string("/v1/embed: ") + e.what());
  }
  return vectors;
}

}  // namespace synth_eval
