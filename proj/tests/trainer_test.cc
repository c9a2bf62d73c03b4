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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>

#include "doctest.h"
#include "synth_eval/error.h"
#include "synth_eval/random.h"
#include "synth_eval/sketcher.h"
#include "synth_eval/synthetic.h"
#include "synth_eval/trainer.h"

using namespace synth_eval;

namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInternalGrammarFailure;
}

TokenList Words(int count) {
  TokenList words;
  for (int i = 0; i < count; ++i) words.push_back("w" + std::to_string(i));
  return words;
}

EncoderModel TinyModel(int d, uint64_t seed, int words = 20) {
  Vocabulary vocab;
  for (const auto& w : Words(words)) vocab.Add(w);
  EncoderModel model = EncoderModel::Init(vocab, d, seed, true);
  Rng rng(seed + 7);
  for (Eigen::Index i = 0; i < model.b.size(); ++i) model.b(i) = 0.2 * rng.Normal();
  return model;
}

std::vector<int> RandomIds(Rng& rng, const EncoderModel& model, size_t n) {
  std::vector<int> ids = {Vocabulary::kSummary};
  for (size_t i = 0; i < n; ++i) {
    ids.push_back(Vocabulary::kNumSpecial +
                  static_cast<int>(rng.Index(model.vocab.size() - Vocabulary::kNumSpecial)));
  }
  return ids;
}

TokenList RandomTokens(Rng& rng, size_t n, int words) {
  TokenList out;
  for (size_t i = 0; i < n; ++i) out.push_back("w" + std::to_string(rng.Index(words)));
  return out;
}

TokenList SketchedTokens(Language lang, const std::string& text) {
  return Tokenize(Sketch(SourceUnit(lang, text)).unit);
}

}  // namespace

TEST_CASE("mask plans cover exactly 15% of the code with 80/10/10 actions") {
  Vocabulary vocab;
  for (const auto& w : Words(50)) vocab.Add(w);
  size_t mask = 0, random = 0, keep = 0;
  bool exact = true;
  for (uint64_t seed = 0; seed < 10000; ++seed) {
    const MaskPlan plan = SampleMaskPlan(100, vocab, seed);
    exact = exact && plan.positions.size() == 15 && plan.actions.size() == 15;
    std::set<size_t> distinct(plan.positions.begin(), plan.positions.end());
    exact = exact && distinct.size() == 15 && *distinct.rbegin() < 100;
    for (size_t k = 0; k < plan.actions.size(); ++k) {
      switch (plan.actions[k]) {
        case MaskAction::kReplaceWithMask:
          ++mask;
          exact = exact && plan.random_ids[k] == Vocabulary::kMask;
          break;
        case MaskAction::kReplaceWithRandom:
          ++random;
          exact = exact && plan.random_ids[k] >= Vocabulary::kNumSpecial;
          break;
        case MaskAction::kKeep:
          ++keep;
          break;
      }
    }
  }
  CHECK(exact);
  const double total = static_cast<double>(mask + random + keep);
  CHECK(std::abs(mask / total - 0.8) < 0.02);
  CHECK(std::abs(random / total - 0.1) < 0.02);
  CHECK(std::abs(keep / total - 0.1) < 0.02);

  CHECK(SampleMaskPlan(7, vocab, 1).positions.size() == 1);
  CHECK(SampleMaskPlan(3, vocab, 1).positions.empty());
  CHECK(SampleMaskPlan(40, vocab, 9).positions == SampleMaskPlan(40, vocab, 9).positions);
}

TEST_CASE("masked-token loss identities") {
  EncoderModel model = TinyModel(8, 3);
  const TrainingPair pair{{"w1", "w2"}, {"w3", "w4", "w5", "w6", "w7", "w8", "w9"}};

  SUBCASE("an empty plan costs nothing") {
    const LossResult r = MlmLoss(model, pair, MaskPlan{});
    CHECK(r.loss == 0.0);
    CHECK(r.grads.dE.isZero(0.0));
    CHECK(r.grads.dW.isZero(0.0));
    CHECK(r.grads.db.isZero(0.0));
  }
  SUBCASE("uniform logits give ln |V|") {
    model.W.setZero();
    model.b.setZero();
    const MaskPlan plan{{2}, {MaskAction::kReplaceWithMask}, {Vocabulary::kMask}};
    const double expected = std::log(static_cast<double>(model.vocab.size()));
    CHECK(std::abs(MlmLoss(model, pair, plan).loss - expected) < 1e-9);
  }
  SUBCASE("each masked position adds a positive term") {
    const MaskPlan one{{0}, {MaskAction::kReplaceWithMask}, {Vocabulary::kMask}};
    const MaskPlan two{{0, 4},
                       {MaskAction::kReplaceWithMask, MaskAction::kKeep},
                       {Vocabulary::kMask, -1}};
    const double a = MlmLoss(model, pair, one).loss;
    CHECK(a > 0.0);
    CHECK(MlmLoss(model, pair, two).loss > a);
  }
  SUBCASE("positions beyond the code are rejected") {
    const MaskPlan bad{{7}, {MaskAction::kKeep}, {-1}};
    CHECK(CodeOf([&] { MlmLoss(model, pair, bad); }) == ErrorCode::kInvalidArgument);
  }
}

TEST_CASE("contrastive loss identities") {
  EncoderModel model = TinyModel(8, 5);
  Rng rng(11);

  SUBCASE("a tied positive and negative give ln 2") {
    for (Pooling pooling : AllPoolings()) {
      for (double tau : {0.05, 1.0, 7.0}) {
        Triple t;
        t.anchor.ids = RandomIds(rng, model, 6);
        t.positive.ids = RandomIds(rng, model, 5);
        t.negative.ids = t.positive.ids;
        if (pooling == Pooling::kSummaryRelu) model.b.setConstant(5.0);
        CHECK(std::abs(ContrastiveLoss(model, {t}, tau, pooling).loss - std::log(2.0)) < 1e-9);
      }
    }
  }

  // Orthogonal anchor and negative, identical positive.
  EncoderModel hand = TinyModel(8, 5, 3);
  hand.E.setZero();
  hand.E(Vocabulary::kNumSpecial, 0) = 1.0;
  hand.E(Vocabulary::kNumSpecial + 1, 1) = 1.0;
  hand.W.setIdentity();
  hand.b.setZero();
  Triple t;
  t.anchor.ids = {Vocabulary::kSummary, Vocabulary::kNumSpecial};
  t.positive.ids = t.anchor.ids;
  t.negative.ids = {Vocabulary::kSummary, Vocabulary::kNumSpecial + 1};

  SUBCASE("the loss vanishes as the temperature goes to zero") {
    CHECK(ContrastiveLoss(hand, {t}, 0.05, Pooling::kSummary).loss < 1e-8);
    CHECK(ContrastiveLoss(hand, {t}, 0.01, Pooling::kSummary).loss < 1e-40);
    const double expected = std::log1p(std::exp(-1.0));
    CHECK(std::abs(ContrastiveLoss(hand, {t}, 1.0, Pooling::kSummary).loss - expected) < 1e-12);
  }
  SUBCASE("the loss does not grow as the temperature drops") {
    double previous = 1e300;
    for (double tau : {10.0, 3.0, 1.0, 0.5, 0.2, 0.1, 0.05, 0.02}) {
      const double loss = ContrastiveLoss(hand, {t}, tau, Pooling::kLastAvg).loss;
      CHECK(loss <= previous);
      previous = loss;
    }
  }
  SUBCASE("zero embeddings and bad arguments are rejected") {
    EncoderModel dead = hand;
    dead.W.setZero();
    CHECK(CodeOf([&] { ContrastiveLoss(dead, {t}, 0.05, Pooling::kSummary); }) ==
          ErrorCode::kZeroEmbedding);
    CHECK(CodeOf([&] { ContrastiveLoss(hand, {}, 0.05, Pooling::kSummary); }) ==
          ErrorCode::kInvalidArgument);
    CHECK(CodeOf([&] { ContrastiveLoss(hand, {t}, 0.0, Pooling::kSummary); }) ==
          ErrorCode::kInvalidArgument);
  }
}

TEST_CASE("analytic gradients agree with finite differences") {
  for (uint64_t seed = 0; seed < 4; ++seed) {
    const EncoderModel model = TinyModel(6, seed, 18);
    Rng rng(seed);
    const TrainingPair pair{RandomTokens(rng, 3, 18), RandomTokens(rng, 14, 18)};
    const MaskPlan plan = SampleMaskPlan(pair.code.size(), model.vocab, seed);
    REQUIRE(plan.positions.size() == 2);
    const LossFunction mlm = [&](const EncoderModel& m) { return MlmLoss(m, pair, plan); };
    CHECK(GradCheck(model, mlm, 1e-5) < 1e-4);

    std::vector<Triple> batch(3);
    for (size_t k = 0; k < batch.size(); ++k) {
      batch[k].anchor.ids = RandomIds(rng, model, 4 + k);
      batch[k].positive.ids = RandomIds(rng, model, 5);
      batch[k].negative.ids = RandomIds(rng, model, 3 + k);
    }
    batch[1].anchor.dropout = DropoutMask{0.2, seed + 1};
    batch[1].positive.dropout = DropoutMask{0.2, seed + 2};
    for (Pooling pooling : {Pooling::kLastAvg, Pooling::kFirstLastAvg, Pooling::kSummary}) {
      const LossFunction cl = [&](const EncoderModel& m) {
        return ContrastiveLoss(m, batch, 0.5, pooling);
      };
      CHECK(GradCheck(model, cl, 1e-5) < 1e-4);
    }
  }
}

TEST_CASE("gradient checking catches a planted fault") {
  const EncoderModel model = TinyModel(6, 21, 12);
  Rng rng(21);
  std::vector<Triple> batch(2);
  for (auto& t : batch) {
    t.anchor.ids = RandomIds(rng, model, 4);
    t.positive.ids = RandomIds(rng, model, 4);
    t.negative.ids = RandomIds(rng, model, 4);
  }
  const LossFunction cl = [&](const EncoderModel& m) {
    return ContrastiveLoss(m, batch, 0.3, Pooling::kLastAvg);
  };
  CHECK(GradCheck(model, cl, 1e-5, 2.0) == doctest::Approx(1.0).epsilon(1e-4));

  EncoderModel zero = model;
  zero.E.setZero();
  zero.W.setZero();
  zero.b.setZero();
  const TrainingPair pair{{"w1"}, {"w2", "w3", "w4", "w5", "w6", "w7", "w8"}};
  const MaskPlan plan{{3}, {MaskAction::kReplaceWithMask}, {Vocabulary::kMask}};
  const double err =
      GradCheck(zero, [&](const EncoderModel& m) { return MlmLoss(m, pair, plan); }, 1e-5);
  CHECK(std::isfinite(err));
  CHECK(err < 1e-4);

  CHECK(CodeOf([&] { GradCheck(model, cl, 1e-2); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("positive samples") {
  const SourceUnit compound(Language::kPython, "a += b\n");
  const TokenList expected = SketchedTokens(Language::kPython, "a = a + b\n");
  bool saw_variant = false, saw_dropout = false;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const PositiveSample s = BuildPositive(compound, seed);
    CHECK(s.anchor == SketchedTokens(Language::kPython, "a += b\n"));
    if (s.dropout_branch) {
      saw_dropout = true;
      CHECK(s.positive == s.anchor);
    } else {
      saw_variant = true;
      CHECK(s.positive == expected);
    }
    const PositiveSample again = BuildPositive(compound, seed);
    CHECK(again.dropout_branch == s.dropout_branch);
    CHECK(again.positive == s.positive);
  }
  CHECK(saw_variant);
  CHECK(saw_dropout);

  const SourceUnit plain(Language::kPython, "x = 1\n");
  for (uint64_t seed = 0; seed < 10; ++seed) CHECK(BuildPositive(plain, seed).dropout_branch);

  CHECK(CodeOf([] { BuildPositive(SourceUnit(Language::kPython, "def f(:\n"), 0); }) ==
        ErrorCode::kParseErrorInput);
}

TEST_CASE("negative samples") {
  const SourceUnit unit(Language::kPython, "a = a + b\n");
  const TokenList minus = SketchedTokens(Language::kPython, "a = a - b\n");
  bool saw_minus = false;
  for (uint64_t seed = 0; seed < 40; ++seed) {
    const TokenList neg = BuildNegative(unit, seed);
    CHECK(neg != SketchedTokens(Language::kPython, "a = a + b\n"));
    CHECK(neg.size() == minus.size());
    CHECK(BuildNegative(unit, seed) == neg);
    saw_minus = saw_minus || neg == minus;
  }
  CHECK(saw_minus);
  CHECK(CodeOf([] { BuildNegative(SourceUnit(Language::kPython, "return 1\n"), 0); }) ==
        ErrorCode::kNoMutableSite);
}

TEST_CASE("synthetic corpus") {
  const auto corpus = GenerateSyntheticCorpus(40, 3);
  REQUIRE(corpus.size() == 40);
  std::set<std::string> distinct;
  for (size_t i = 0; i < corpus.size(); ++i) {
    const SourceUnit unit(corpus[i].lang, corpus[i].code);
    CHECK_MESSAGE(!unit.has_error(), corpus[i].code);
    CHECK(!BuildNegative(unit, i).empty());
    CHECK(!corpus[i].nl.empty());
    CHECK(corpus[i].lang == (i % 2 == 0 ? Language::kPython : Language::kJava));
    distinct.insert(corpus[i].code);
  }
  CHECK(distinct.size() > 35);
  CHECK(GenerateSyntheticCorpus(40, 3)[17].code == corpus[17].code);
  CHECK(GenerateSyntheticCorpus(40, 4)[17].code != corpus[17].code);
  for (const auto& r : GenerateSyntheticCorpus(6, 1, Language::kJava)) {
    CHECK(r.lang == Language::kJava);
  }

  std::stringstream io;
  WriteTrainingCorpus(io, corpus);
  const auto back = ReadTrainingCorpus(io);
  REQUIRE(back.size() == corpus.size());
  CHECK(back[5].code == corpus[5].code);
  CHECK(back[5].nl == corpus[5].nl);
  CHECK(back[5].lang == corpus[5].lang);
}

TEST_CASE("training") {
  auto corpus = GenerateSyntheticCorpus(24, 8);
  corpus.push_back({"broken", Language::kPython, "", "def f(:\n"});
  corpus.push_back({"constant", Language::kPython, "", "def f():\n    return 1\n"});
  TrainerConfig config;
  config.dim = 16;
  config.batch_size = 8;
  config.epochs = 2;
  config.seed = 4;

  SUBCASE("zero learning rate leaves the parameters alone") {
    config.learning_rate = 0.0;
    const TrainResult r = Train(corpus, config);
    CHECK(r.model == EncoderModel::Init(r.model.vocab, config.dim, config.seed));
    CHECK(r.excluded == std::vector<std::string>{"broken", "constant"});
    CHECK(r.log.size() == 2);
  }
  SUBCASE("training is reproducible") {
    const TrainResult a = Train(corpus, config);
    const TrainResult b = Train(corpus, config);
    CHECK(a.model == b.model);
    std::stringstream la, lb;
    WriteTrainingLog(la, a.log);
    WriteTrainingLog(lb, b.log);
    CHECK(la.str() == lb.str());
    CHECK(la.str().rfind("epoch,mlm,contrastive,total\n1,", 0) == 0);
    config.seed = 5;
    CHECK(!(Train(corpus, config).model == a.model));
  }
  SUBCASE("an initial model is continued") {
    const TrainResult first = Train(corpus, config);
    config.learning_rate = 0.0;
    CHECK(Train(corpus, config, first.model).model == first.model);
  }
  SUBCASE("invalid settings") {
    config.batch_size = 1;
    CHECK(CodeOf([&] { Train(corpus, config); }) == ErrorCode::kInvalidArgument);
    config.batch_size = 4;
    CHECK(CodeOf([&] { Train({corpus.end() - 2, corpus.end()}, config); }) ==
          ErrorCode::kEmptyInput);
  }
  SUBCASE("a runaway learning rate reports divergence and keeps a checkpoint") {
    config.learning_rate = 1e200;
    config.mlm_weight = 1.0;
    config.checkpoint_path = (std::filesystem::temp_directory_path() / "trainer_test_diverged.ckpt").string();
    std::remove(config.checkpoint_path.c_str());
    const ErrorCode code = CodeOf([&] { Train(corpus, config); });
    CHECK((code == ErrorCode::kDivergence || code == ErrorCode::kZeroEmbedding));
    if (code == ErrorCode::kDivergence) {
      CHECK(LoadCheckpointFile(config.checkpoint_path).vocab.size() > 10);
    }
  }
}

TEST_CASE("contrastive loss falls over the first epochs on the synthetic corpus") {
  TrainerConfig config;
  config.epochs = 5;
  config.seed = 0;
  config.pooling = Pooling::kLastAvg;
  config.mlm_weight = 0.0;
  const TrainResult r = Train(GenerateSyntheticCorpus(200, 1), config);
  REQUIRE(r.log.size() == 5);
  for (size_t e = 1; e < r.log.size(); ++e) {
    CHECK(r.log[e].contrastive < r.log[e - 1].contrastive);
  }
}

TEST_CASE("grad-check suite") {
  const GradCheckSummary summary = RunGradCheckSuite(20, 0);
  CHECK(summary.instances == 20);
  CHECK(summary.max_mlm_error < 1e-4);
  CHECK(summary.max_contrastive_error < 1e-4);
  CHECK(summary.planted_fault_error == doctest::Approx(1.0).epsilon(1e-4));
}
