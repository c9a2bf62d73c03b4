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

#include <atomic>
#include <random>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "doctest.h"
#include "synth_eval/error.h"
#include "synth_eval/random.h"

using namespace synth_eval;

namespace {

EncoderModel RandomModel(int d, uint64_t seed, const TokenList& words) {
  Vocabulary vocab;
  for (const auto& w : words) vocab.Add(w);
  EncoderModel model = EncoderModel::Init(vocab, d, seed, true);
  Rng rng(seed + 99);
  for (Eigen::Index i = 0; i < model.b.size(); ++i) model.b(i) = 0.3 * rng.Normal();
  return model;
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInternalGrammarFailure;
}

// Minimal embedding service used to exercise the client.
class StubService {
 public:
  explicit StubService(int dim) : dim_(dim) {
    server_.Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
      nlohmann::json body = {{"status", "ok"}, {"model", "stub"}, {"dim", dim_}};
      res.set_content(body.dump(), "application/json");
    });
    server_.Post("/v1/embed", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = nlohmann::json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.contains("snippets") || body["snippets"].empty()) {
        res.status = 400;
        return;
      }
      if (mode_ == "garbage") {
        res.set_content("{not json", "application/json");
        return;
      }
      if (mode_ == "unavailable") {
        res.status = 503;
        return;
      }
      nlohmann::json vectors = nlohmann::json::array();
      for (const auto& snippet : body["snippets"]) {
        TokenList tokens;
        std::istringstream words(snippet["code"].get<std::string>());
        for (std::string w; words >> w;) tokens.push_back(w);
        EmbeddingVector v = HashEmbed(tokens, dim_, 3);
        const int emitted = mode_ == "short" ? dim_ - 1 : dim_;
        nlohmann::json row = nlohmann::json::array();
        for (int i = 0; i < emitted; ++i) row.push_back(v(i) / 3.0);
        vectors.push_back(row);
      }
      res.set_content(nlohmann::json({{"dim", dim_}, {"vectors", vectors}}).dump(),
                      "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubService() {
    server_.stop();
    thread_.join();
  }
  RemoteConfig Config() const {
    RemoteConfig config;
    config.port = port_;
    config.timeout_seconds = 5.0;
    return config;
  }
  void set_mode(std::string mode) { mode_ = std::move(mode); }

 private:
  int dim_;
  std::string mode_ = "ok";
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_CASE("vocabulary") {
  Vocabulary vocab = Vocabulary::Build({{"a", "b", "a"}, {"c", "<mask>"}});
  CHECK(vocab.size() == Vocabulary::kNumSpecial + 3);
  CHECK(vocab.Id("a") == Vocabulary::kNumSpecial);
  CHECK(vocab.Id("zzz") == Vocabulary::kUnk);
  CHECK(vocab.Id("<mask>") == Vocabulary::kUnk);
  CHECK(vocab.Token(Vocabulary::kMask) == "<mask>");
  CHECK(Vocabulary::Build({{"a", "b", "a"}}, 2).size() == Vocabulary::kNumSpecial + 1);
  CHECK(PairInput(vocab, {"b"}, {"a", "q"}) ==
        std::vector<int>{Vocabulary::kSummary, 6, Vocabulary::kSep, 5, Vocabulary::kUnk});
}

TEST_CASE("hand computed d=2 encoding") {
  Vocabulary vocab;
  vocab.Add("x");
  EncoderModel model = EncoderModel::Init(vocab, 2, 0, true);
  model.E.setZero();
  model.E.row(Vocabulary::kSummary) << 1.0, 0.0;
  model.E.row(5) << 0.0, 2.0;
  model.W << 1.0, 2.0, -1.0, 0.5;
  model.b << 0.5, -0.25;
  // h0 = [(1,0), (0,2)], mean m = (0.5, 1)
  // u0 = (1.5, 1) -> W u0 + b = (1.5 + 2 + 0.5, -1.5 + 0.5 - 0.25) = (4, -1.25)
  // u1 = (0.5, 3) -> W u1 + b = (0.5 + 6 + 0.5, -0.5 + 1.5 - 0.25) = (7, 0.75)
  const EmbeddingVector summary = Encode(model, {"x"}, Pooling::kSummary);
  CHECK(summary(0) == 4.0);
  CHECK(summary(1) == -1.25);
  const EmbeddingVector relu = Encode(model, {"x"}, Pooling::kSummaryRelu);
  CHECK(relu(0) == 4.0);
  CHECK(relu(1) == 0.0);
  const EmbeddingVector last = Encode(model, {"x"}, Pooling::kLastAvg);
  CHECK(last(0) == doctest::Approx(5.5));
  CHECK(last(1) == doctest::Approx(-0.25));
  // first-last: ((0.5, 1) + (5.5, -0.25)) / 2
  const EmbeddingVector first_last = Encode(model, {"x"}, Pooling::kFirstLastAvg);
  CHECK(first_last(0) == doctest::Approx(3.0));
  CHECK(first_last(1) == doctest::Approx(0.375));
}

TEST_CASE("encode properties") {
  const EncoderModel model = RandomModel(16, 3, {"a", "b", "c", "+", "="});
  const TokenList tokens = {"a", "=", "a", "+", "b"};
  for (int seed = 0; seed < 20; ++seed) {
    const EncoderModel m = RandomModel(16, seed, {"a", "b", "c", "+", "="});
    CHECK((Encode(m, tokens, Pooling::kSummaryRelu).array() >= 0.0).all());
  }
  CHECK(Encode(model, tokens, Pooling::kSummary) == Encode(model, tokens, Pooling::kSummary));
  CHECK(Encode(model, tokens, Pooling::kSummary, DropoutMask{0.1, 4}) ==
        Encode(model, tokens, Pooling::kSummary, DropoutMask{0.1, 4}));
  CHECK(Encode(model, tokens, Pooling::kSummary, DropoutMask{0.1, 4}) !=
        Encode(model, tokens, Pooling::kSummary, DropoutMask{0.1, 5}));
  CHECK(CodeOf([&] { Encode(model, {}, Pooling::kSummary); }) == ErrorCode::kEmptyInput);

  // linear in E when b = 0 and no ReLU
  EncoderModel zero_bias = model;
  zero_bias.b.setZero();
  EncoderModel doubled = zero_bias;
  doubled.E *= 2.0;
  const EmbeddingVector base = Encode(zero_bias, tokens, Pooling::kSummary);
  CHECK((Encode(doubled, tokens, Pooling::kSummary) - 2.0 * base).norm() < 1e-12);

  // pooling strategies do not alias
  for (size_t i = 0; i < AllPoolings().size(); ++i) {
    for (size_t j = i + 1; j < AllPoolings().size(); ++j) {
      CHECK(Encode(model, tokens, AllPoolings()[i]) != Encode(model, tokens, AllPoolings()[j]));
    }
  }
  for (Pooling p : AllPoolings()) CHECK(ParsePooling(PoolingName(p)) == p);
}

TEST_CASE("cosine") {
  EmbeddingVector v(3);
  v << 1, 2, 2;
  EmbeddingVector w(3);
  w << 2, 1, 2;
  CHECK(Cosine(v, v) == doctest::Approx(1.0));
  CHECK(Cosine(v, w) == doctest::Approx(8.0 / 9.0));
  EmbeddingVector x(2), y(2);
  x << 1, 0;
  y << 0, 1;
  CHECK(Cosine(x, y) == 0.0);
  CHECK(Cosine(x, EmbeddingVector::Zero(2)) == 0.0);
  CHECK(CodeOf([&] { Cosine(v, x); }) == ErrorCode::kDimensionMismatch);
  std::mt19937 gen(1);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    EmbeddingVector a(8), b(8);
    for (int k = 0; k < 8; ++k) {
      a(k) = std::max(0.0, dist(gen) - 0.3);
      b(k) = std::max(0.0, dist(gen) - 0.3);
    }
    const double c = Cosine(a, b);
    CHECK(c >= 0.0);
    CHECK(c <= 1.0 + 1e-12);
  }
}

TEST_CASE("hash embedding") {
  const TokenList a = {"def", "f", "(", "arg_0", ")", ":", "return", "arg_0"};
  TokenList permuted = a;
  std::reverse(permuted.begin(), permuted.end());
  CHECK(HashEmbed(a, 64, 1) == HashEmbed(a, 64, 1));
  CHECK(HashEmbed(a, 64, 1) == HashEmbed(permuted, 64, 1));
  const TokenList disjoint = {"while", "x", "<", "10", "+=", "print", "y", "z"};
  const double c = Cosine(HashEmbed(a, 1024, 1), HashEmbed(disjoint, 1024, 1));
  CHECK(c < 0.2);
  CHECK(c == 0.0);  // pinned for seed 1
  CHECK_THROWS(HashEmbed(a, 4, 1));
}

TEST_CASE("backward matches finite differences") {
  const TokenList words = {"a", "b", "c"};
  for (Pooling pooling : AllPoolings()) {
    EncoderModel model = RandomModel(4, 11, words);
    const std::vector<int> ids = {Vocabulary::kSummary, 5, 6, 5, 7};
    EmbeddingVector probe(4);
    probe << 0.3, -1.1, 0.7, 0.2;
    auto loss = [&](const EncoderModel& m) {
      return Pool(Forward(m, ids, DropoutMask{0.25, 8}), pooling).dot(probe);
    };
    Gradients grads = Gradients::Zero(model);
    BackwardPooled(model, Forward(model, ids, DropoutMask{0.25, 8}), pooling, probe, grads);
    const double eps = 1e-6;
    double worst = 0.0;
    auto check = [&](double& param, double analytic) {
      const double saved = param;
      param = saved + eps;
      const double up = loss(model);
      param = saved - eps;
      const double down = loss(model);
      param = saved;
      const double numeric = (up - down) / (2 * eps);
      worst = std::max(worst, std::abs(analytic - numeric) / std::max(std::abs(numeric), 1e-6));
    };
    for (Eigen::Index r = 0; r < model.E.rows(); ++r) {
      for (Eigen::Index c = 0; c < model.d; ++c) check(model.E(r, c), grads.dE(r, c));
    }
    for (Eigen::Index r = 0; r < model.d; ++r) {
      for (Eigen::Index c = 0; c < model.d; ++c) check(model.W(r, c), grads.dW(r, c));
      check(model.b(r), grads.db(r));
    }
    CHECK_MESSAGE(worst < 1e-4, PoolingName(pooling));
  }
}

TEST_CASE("checkpoint round trip") {
  const EncoderModel model = RandomModel(8, 21, {"def", "f", "(", "arg_0", ")", "é"});
  std::stringstream first;
  SaveCheckpoint(model, first);
  const std::string bytes = first.str();
  CHECK(bytes.substr(0, 8) == "SECKPT01");
  std::stringstream in(bytes);
  const EncoderModel loaded = LoadCheckpoint(in);
  CHECK(loaded == model);
  std::stringstream second;
  SaveCheckpoint(loaded, second);
  CHECK(second.str() == bytes);

  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  CHECK(CodeOf([&] { LoadCheckpoint(truncated); }) == ErrorCode::kIo);
  std::stringstream bad("NOTACKPT");
  CHECK(CodeOf([&] { LoadCheckpoint(bad); }) == ErrorCode::kIo);
  CHECK(CodeOf([] { EncoderModel::Init(Vocabulary(), 4, 0); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("remote embedding client") {
  StubService service(16);
  const RemoteConfig config = service.Config();
  const RemoteHealth health = RemoteHealthCheck(config);
  CHECK(health.status == "ok");
  CHECK(health.dim == 16);

  const auto one = RemoteEmbed(config, {{Language::kPython, "def f ( ) : pass"}});
  REQUIRE(one.size() == 1);
  CHECK(one[0].size() == health.dim);
  CHECK(RemoteEmbed(config, {}).empty());

  const auto many = RemoteEmbed(config, {{Language::kPython, "a = 1"},
                                         {Language::kJava, "int x = 2 ;"},
                                         {Language::kPython, "a = 1"}});
  REQUIRE(many.size() == 3);
  CHECK(many[0] == many[2]);
  CHECK(many[0] != many[1]);
  // order preserved and values survive the wire within 1e-6
  const EmbeddingVector expected = HashEmbed({"int", "x", "=", "2", ";"}, 16, 3) / 3.0;
  CHECK((many[1] - expected).cwiseAbs().maxCoeff() < 1e-6);

  service.set_mode("short");
  CHECK(CodeOf([&] { RemoteEmbed(config, {{Language::kPython, "a"}}); }) ==
        ErrorCode::kDimensionMismatch);
  service.set_mode("garbage");
  CHECK(CodeOf([&] { RemoteEmbed(config, {{Language::kPython, "a"}}); }) ==
        ErrorCode::kProtocolMismatch);
  service.set_mode("unavailable");
  CHECK(CodeOf([&] { RemoteEmbed(config, {{Language::kPython, "a"}}); }) ==
        ErrorCode::kProtocolMismatch);
}

TEST_CASE("remote client without a server") {
  RemoteConfig config;
  {
    httplib::Server probe;
    config.port = probe.bind_to_any_port("127.0.0.1");
  }
  config.timeout_seconds = 1.0;
  CHECK(CodeOf([&] { RemoteHealthCheck(config); }) == ErrorCode::kTransport);
  CHECK(CodeOf([&] { RemoteEmbed(config, {{Language::kPython, "a"}}); }) ==
        ErrorCode::kTransport);
}
