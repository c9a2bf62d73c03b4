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

#include "synth_eval/trainer.h"

#include <cctype>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "synth_eval/error.h"
#include "synth_eval/metrics.h"
#include "synth_eval/mutator.h"
#include "synth_eval/random.h"
#include "synth_eval/sketcher.h"
#include "synth_eval/transformer.h"

namespace synth_eval {
namespace {

TokenList SketchedTokens(const SourceUnit& unit) { return Tokenize(Sketch(unit).unit); }

TokenList NlTokens(std::string_view text) {
  TokenList out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c == '_') {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool AllFinite(const Gradients& g) {
  return g.dE.allFinite() && g.dW.allFinite() && g.db.allFinite();
}

void Apply(EncoderModel& model, const Gradients& grads, double lr) {
  model.E -= lr * grads.dE;
  model.W -= lr * grads.dW;
  model.b -= lr * grads.db;
}

struct PreparedUnit {
  std::string id;
  SourceUnit unit;
  TokenList nl;
  TokenList code;
};

struct EpochSample {
  PositiveSample positive;
  TokenList negative;
};

}  // namespace

MaskPlan SampleMaskPlan(size_t code_length, const Vocabulary& vocab, uint64_t seed) {
  Rng rng(MixSeed(seed, 0x6d61736b));
  MaskPlan plan;
  const auto count = static_cast<size_t>(std::lround(0.15 * static_cast<double>(code_length)));
  plan.positions = rng.Sample(code_length, count);
  const size_t regular = vocab.size() - Vocabulary::kNumSpecial;
  for (size_t k = 0; k < plan.positions.size(); ++k) {
    const double u = rng.Uniform();
    if (u < 0.8) {
      plan.actions.push_back(MaskAction::kReplaceWithMask);
      plan.random_ids.push_back(Vocabulary::kMask);
    } else if (u < 0.9) {
      plan.actions.push_back(MaskAction::kReplaceWithRandom);
      plan.random_ids.push_back(regular == 0 ? Vocabulary::kUnk
                                             : Vocabulary::kNumSpecial +
                                                   static_cast<int>(rng.Index(regular)));
    } else {
      plan.actions.push_back(MaskAction::kKeep);
      plan.random_ids.push_back(-1);
    }
  }
  return plan;
}

LossResult MlmLoss(const EncoderModel& model, const TrainingPair& pair, const MaskPlan& plan) {
  LossResult result{0.0, Gradients::Zero(model)};
  if (plan.positions.empty()) return result;
  const std::vector<int> original = PairInput(model.vocab, pair.nl, pair.code);
  const size_t offset = pair.nl.size() + 2;
  std::vector<int> input = original;
  for (size_t k = 0; k < plan.positions.size(); ++k) {
    const size_t pos = offset + plan.positions[k];
    if (plan.positions[k] >= pair.code.size()) {
      throw Error(ErrorCode::kInvalidArgument, "mask position outside the code tokens");
    }
    if (plan.actions[k] != MaskAction::kKeep) input[pos] = plan.random_ids[k];
  }
  const ForwardState state = Forward(model, input);
  Eigen::MatrixXd d_h1 = Eigen::MatrixXd::Zero(state.h1.rows(), model.d);
  for (size_t pos_k : plan.positions) {
    const auto row = static_cast<Eigen::Index>(offset + pos_k);
    const Eigen::VectorXd h = state.h1.row(row).transpose();
    const Eigen::VectorXd logits = model.E * h;
    const double top = logits.maxCoeff();
    Eigen::VectorXd p = (logits.array() - top).exp();
    const double z = p.sum();
    p /= z;
    const int target = original[static_cast<size_t>(row)];
    result.loss += -(logits(target) - top - std::log(z));
    p(target) -= 1.0;
    result.grads.dE += p * h.transpose();
    d_h1.row(row) = (model.E.transpose() * p).transpose();
  }
  Backward(model, state, d_h1, Eigen::MatrixXd(), result.grads);
  return result;
}

LossResult ContrastiveLoss(const EncoderModel& model, const std::vector<Triple>& batch,
                           double temperature, Pooling pooling) {
  if (batch.empty()) throw Error(ErrorCode::kInvalidArgument, "empty contrastive batch");
  if (!(temperature > 0.0)) throw Error(ErrorCode::kInvalidArgument, "temperature must be > 0");
  const size_t n = batch.size();
  std::vector<ForwardState> states;
  std::vector<EmbeddingVector> vecs;
  states.reserve(3 * n);
  for (const Triple& t : batch) {
    for (const EncoderInput* in : {&t.anchor, &t.positive, &t.negative}) {
      states.push_back(Forward(model, in->ids, in->dropout));
      vecs.push_back(Pool(states.back(), pooling));
      if (vecs.back().norm() == 0.0) {
        throw Error(ErrorCode::kZeroEmbedding, "contrastive loss on a zero embedding");
      }
    }
  }
  auto anchor = [](size_t i) { return 3 * i; };
  auto positive = [](size_t j) { return 3 * j + 1; };
  auto negative = [](size_t j) { return 3 * j + 2; };

  std::vector<EmbeddingVector> d_vecs(vecs.size(), EmbeddingVector::Zero(model.d));
  // d cos(u, v) / du
  auto cos_grad = [](const EmbeddingVector& u, const EmbeddingVector& v, double c) {
    return EmbeddingVector(v / (u.norm() * v.norm()) - c * u / u.squaredNorm());
  };
  LossResult result{0.0, Gradients::Zero(model)};
  for (size_t i = 0; i < n; ++i) {
    std::vector<size_t> others;
    std::vector<double> cosines;
    for (size_t j = 0; j < n; ++j) {
      for (size_t k : {positive(j), negative(j)}) {
        others.push_back(k);
        cosines.push_back(Cosine(vecs[anchor(i)], vecs[k]));
      }
    }
    double top = -1e300;
    for (double c : cosines) top = std::max(top, c / temperature);
    double z = 0.0;
    for (double c : cosines) z += std::exp(c / temperature - top);
    const size_t own = 2 * i;
    result.loss += -(cosines[own] / temperature - top - std::log(z)) / static_cast<double>(n);
    for (size_t m = 0; m < others.size(); ++m) {
      double weight = std::exp(cosines[m] / temperature - top) / z;
      if (m == own) weight -= 1.0;
      const double g = weight / (temperature * static_cast<double>(n));
      const EmbeddingVector& u = vecs[anchor(i)];
      const EmbeddingVector& v = vecs[others[m]];
      d_vecs[anchor(i)] += g * cos_grad(u, v, cosines[m]);
      d_vecs[others[m]] += g * cos_grad(v, u, cosines[m]);
    }
  }
  for (size_t s = 0; s < states.size(); ++s) {
    BackwardPooled(model, states[s], pooling, d_vecs[s], result.grads);
  }
  return result;
}

PositiveSample BuildPositive(const SourceUnit& unit, uint64_t seed) {
  if (unit.has_error()) throw Error(ErrorCode::kParseErrorInput, "positive of unparsable code");
  PositiveSample sample;
  sample.anchor = SketchedTokens(unit);
  Rng rng(MixSeed(seed, 0x706f73));
  if (!rng.Bernoulli(0.5)) {
    if (auto variant = SampleVariant(unit, AllTransformRules(), MixSeed(seed, 2))) {
      sample.positive = SketchedTokens(*variant);
      return sample;
    }
  }
  sample.positive = sample.anchor;
  sample.dropout_branch = true;
  return sample;
}

TokenList BuildNegative(const SourceUnit& unit, uint64_t seed) {
  auto mutant = MutateUnit(unit, AllOperatorClasses(), MixSeed(seed, 0x6e6567));
  if (!mutant) throw Error(ErrorCode::kNoMutableSite, "no mutable operator");
  return SketchedTokens(*mutant);
}

std::vector<TrainingRecord> ReadTrainingCorpus(std::istream& in) {
  std::vector<TrainingRecord> records;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TrainingRecord r;
      r.id = j.at("id").get<std::string>();
      r.lang = ParseLanguage(j.at("lang").get<std::string>());
      r.nl = j.value("nl", "");
      r.code = j.at("code").get<std::string>();
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kIo, "training corpus line " + std::to_string(line_no) + ": " +
                                      e.what());
    }
  }
  return records;
}

std::vector<TrainingRecord> ReadTrainingCorpusFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open training corpus " + path);
  return ReadTrainingCorpus(in);
}

void WriteTrainingCorpus(std::ostream& out, const std::vector<TrainingRecord>& records) {
  for (const auto& r : records) {
    nlohmann::json j = {{"id", r.id}, {"lang", LanguageName(r.lang)}, {"nl", r.nl},
                        {"code", r.code}};
    out << j.dump() << '\n';
  }
}

void WriteTrainingLog(std::ostream& out, const std::vector<EpochLog>& log) {
  out << "epoch,mlm,contrastive,total\n";
  for (const auto& e : log) {
    out << fmt::format("{},{:.9g},{:.9g},{:.9g}\n", e.epoch, e.mlm, e.contrastive, e.total);
  }
}

TrainResult Train(const std::vector<TrainingRecord>& corpus, const TrainerConfig& config,
                  const std::optional<EncoderModel>& init) {
  if (config.batch_size < 2 || !(config.temperature > 0.0) || config.epochs < 0 ||
      config.learning_rate < 0.0 || config.dropout < 0.0 || config.dropout >= 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid trainer configuration");
  }
  TrainResult result;
  std::vector<PreparedUnit> units;
  for (const TrainingRecord& record : corpus) {
    SourceUnit unit(record.lang, record.code);
    if (unit.has_error() || FindMutationSites(unit, AllOperatorClasses()).empty()) {
      result.excluded.push_back(record.id);
      continue;
    }
    units.push_back({record.id, unit, NlTokens(record.nl), SketchedTokens(unit)});
  }
  if (units.empty()) throw Error(ErrorCode::kEmptyInput, "no trainable units");

  // Positives and negatives for every epoch, drawn up front so the
  // vocabulary covers them.
  std::vector<std::vector<EpochSample>> samples(static_cast<size_t>(config.epochs));
  for (int e = 0; e < config.epochs; ++e) {
    for (size_t k = 0; k < units.size(); ++k) {
      const uint64_t s = MixSeed(config.seed, MixSeed(static_cast<uint64_t>(e), k));
      samples[static_cast<size_t>(e)].push_back(
          {BuildPositive(units[k].unit, s), BuildNegative(units[k].unit, s)});
    }
  }

  EncoderModel model;
  if (init) {
    model = *init;
  } else {
    Vocabulary vocab;
    for (const auto& u : units) {
      for (const auto& t : u.code) vocab.Add(t);
      for (const auto& t : u.nl) vocab.Add(t);
    }
    for (const auto& epoch : samples) {
      for (const auto& s : epoch) {
        for (const auto& t : s.positive.positive) vocab.Add(t);
        for (const auto& t : s.negative) vocab.Add(t);
      }
    }
    for (Language lang : {Language::kPython, Language::kJava}) {
      for (OperatorClass cls : AllOperatorClasses()) {
        for (std::string_view op : OperatorInventory(lang, cls)) vocab.Add(std::string(op));
      }
    }
    model = EncoderModel::Init(std::move(vocab), config.dim, config.seed);
  }

  for (int e = 0; e < config.epochs; ++e) {
    Rng rng(MixSeed(config.seed, 0x65706f6368ULL + static_cast<uint64_t>(e)));
    std::vector<size_t> order(units.size());
    for (size_t k = 0; k < order.size(); ++k) order[k] = k;
    rng.Shuffle(order);

    EpochLog entry;
    entry.epoch = e + 1;
    size_t batches = 0;
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      const size_t end = std::min(order.size(), start + config.batch_size);
      std::vector<Triple> triples;
      Gradients mlm_grads = Gradients::Zero(model);
      double mlm = 0.0;
      for (size_t pos = start; pos < end; ++pos) {
        const size_t k = order[pos];
        const EpochSample& s = samples[static_cast<size_t>(e)][k];
        const uint64_t seed = MixSeed(config.seed, MixSeed(1000 + static_cast<uint64_t>(e), k));
        Triple t;
        t.anchor.ids = CodeInput(model.vocab, s.positive.anchor);
        t.positive.ids = CodeInput(model.vocab, s.positive.positive);
        t.negative.ids = CodeInput(model.vocab, s.negative);
        if (s.positive.dropout_branch && config.dropout > 0.0) {
          t.anchor.dropout = DropoutMask{config.dropout, MixSeed(seed, 1)};
          t.positive.dropout = DropoutMask{config.dropout, MixSeed(seed, 2)};
        }
        triples.push_back(std::move(t));
        if (config.mlm_weight != 0.0) {
          const PreparedUnit& u = units[k];
          LossResult r = MlmLoss(model, {u.nl, u.code},
                                 SampleMaskPlan(u.code.size(), model.vocab, MixSeed(seed, 3)));
          mlm += r.loss;
          mlm_grads += r.grads;
        }
      }
      const double scale = 1.0 / static_cast<double>(end - start);
      mlm *= scale;
      mlm_grads *= scale * config.mlm_weight;
      LossResult cl = ContrastiveLoss(model, triples, config.temperature, config.pooling);
      cl.grads += mlm_grads;
      const double total = config.mlm_weight * mlm + cl.loss;
      if (!std::isfinite(total) || !AllFinite(cl.grads)) {
        if (!config.checkpoint_path.empty()) SaveCheckpointFile(model, config.checkpoint_path);
        throw Error(ErrorCode::kDivergence,
                    fmt::format("loss became non-finite in epoch {}", e + 1));
      }
      Apply(model, cl.grads, config.learning_rate);
      entry.mlm += mlm;
      entry.contrastive += cl.loss;
      entry.total += total;
      ++batches;
    }
    entry.mlm /= static_cast<double>(batches);
    entry.contrastive /= static_cast<double>(batches);
    entry.total /= static_cast<double>(batches);
    result.log.push_back(entry);
  }
  result.model = std::move(model);
  return result;
}

double GradCheck(const EncoderModel& model, const LossFunction& loss, double epsilon,
                 double fault_scale) {
  if (!(epsilon >= 1e-6 && epsilon <= 1e-3)) {
    throw Error(ErrorCode::kInvalidArgument, "grad-check epsilon must lie in [1e-6, 1e-3]");
  }
  EncoderModel probe = model;
  Gradients analytic = loss(probe).grads;
  analytic *= fault_scale;
  double worst = 0.0;
  auto check = [&](double& param, double grad) {
    const double saved = param;
    param = saved + epsilon;
    const double up = loss(probe).loss;
    param = saved - epsilon;
    const double down = loss(probe).loss;
    param = saved;
    const double numeric = (up - down) / (2.0 * epsilon);
    worst = std::max(worst, std::abs(grad - numeric) / std::max(std::abs(numeric), 1e-6));
  };
  for (Eigen::Index r = 0; r < probe.E.rows(); ++r) {
    for (Eigen::Index c = 0; c < probe.E.cols(); ++c) check(probe.E(r, c), analytic.dE(r, c));
  }
  for (Eigen::Index r = 0; r < probe.W.rows(); ++r) {
    for (Eigen::Index c = 0; c < probe.W.cols(); ++c) check(probe.W(r, c), analytic.dW(r, c));
  }
  for (Eigen::Index i = 0; i < probe.b.size(); ++i) check(probe.b(i), analytic.db(i));
  return worst;
}

GradCheckSummary RunGradCheckSuite(size_t instances, uint64_t seed, double epsilon) {
  constexpr int kWords = 20;
  auto tiny = [](uint64_t s) {
    Vocabulary vocab;
    for (int i = 0; i < kWords; ++i) vocab.Add("w" + std::to_string(i));
    EncoderModel model = EncoderModel::Init(vocab, 6, s, true);
    Rng rng(s ^ 0x5eedULL);
    for (Eigen::Index i = 0; i < model.b.size(); ++i) model.b(i) = 0.2 * rng.Normal();
    return model;
  };
  auto ids = [](Rng& rng, const EncoderModel& model, size_t n) {
    std::vector<int> out = {Vocabulary::kSummary};
    for (size_t i = 0; i < n; ++i) {
      out.push_back(Vocabulary::kNumSpecial +
                    static_cast<int>(rng.Index(model.vocab.size() - Vocabulary::kNumSpecial)));
    }
    return out;
  };
  const Pooling poolings[] = {Pooling::kLastAvg, Pooling::kFirstLastAvg, Pooling::kSummary,
                              Pooling::kSummaryRelu};

  GradCheckSummary summary;
  summary.instances = instances;
  for (size_t k = 0; k < instances; ++k) {
    const uint64_t s = MixSeed(seed, k);
    const EncoderModel model = tiny(s);
    Rng rng(s);
    TrainingPair pair;
    for (int i = 0; i < 3; ++i) pair.nl.push_back("w" + std::to_string(rng.Index(kWords)));
    for (int i = 0; i < 14; ++i) pair.code.push_back("w" + std::to_string(rng.Index(kWords)));
    const MaskPlan plan = SampleMaskPlan(pair.code.size(), model.vocab, s);
    summary.max_mlm_error = std::max(
        summary.max_mlm_error,
        GradCheck(model, [&](const EncoderModel& m) { return MlmLoss(m, pair, plan); }, epsilon));

    std::vector<Triple> batch(3);
    for (size_t t = 0; t < batch.size(); ++t) {
      batch[t].anchor.ids = ids(rng, model, 4 + t);
      batch[t].positive.ids = ids(rng, model, 5);
      batch[t].negative.ids = ids(rng, model, 3 + t);
    }
    batch[1].anchor.dropout = DropoutMask{0.2, s + 1};
    batch[1].positive.dropout = DropoutMask{0.2, s + 2};
    const Pooling pooling = poolings[k % std::size(poolings)];
    const LossFunction cl = [&](const EncoderModel& m) {
      return ContrastiveLoss(m, batch, 0.5, pooling);
    };
    summary.max_contrastive_error = std::max(summary.max_contrastive_error,
                                             GradCheck(model, cl, epsilon));
    if (k == 0) summary.planted_fault_error = GradCheck(model, cl, epsilon, 2.0);
  }
  return summary;
}

}  // namespace synth_eval
