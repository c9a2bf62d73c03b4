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

#include <functional>

#include "doctest.h"
#include "synth_eval/error.h"
#include "synth_eval/metrics.h"
#include "synth_eval/scorer.h"
#include "synth_eval/sketcher.h"

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

const char* kRef = "def total(xs):\n    s = 0\n    for x in xs:\n        if x > 0:\n            s += x\n    return s\n";
const char* kPred = "def add_up(values):\n    acc = 0\n    for v in values:\n        if v >= 0:\n            acc = acc + v\n    return acc\n";

// (3, 4) for units mentioning "x", (5, 0) otherwise.
class FixedBackend : public EncoderBackend {
 public:
  EmbeddingVector Embed(const SourceUnit& sketched) const override {
    EmbeddingVector v(2);
    if (sketched.text().find("return 1") != std::string::npos) {
      v << 3.0, 4.0;
    } else {
      v << 5.0, 0.0;
    }
    return v;
  }
};

EncoderModel SmallModel() {
  Vocabulary vocab;
  for (const char* text : {kRef, kPred}) {
    for (const auto& t : Tokenize(Sketch(SourceUnit(Language::kPython, text)).unit)) vocab.Add(t);
  }
  return EncoderModel::Init(vocab, 16, 3);
}

}  // namespace

TEST_CASE("verbatim predictions score 1") {
  const SourceUnit ref(Language::kPython, kRef);
  ScoreConfig config;
  const auto hash = MakeHashBackend(1024, 0);
  const ScoreResult r = Score(ref, ref, config, *hash);
  CHECK(r.gate_passed);
  CHECK(r.similarity == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.binary == 1);

  const auto model = MakeModelBackend(SmallModel(), Pooling::kSummaryRelu);
  CHECK(Score(ref, ref, config, *model).binary == 1);
}

TEST_CASE("unparsable predictions fail the gate") {
  const SourceUnit ref(Language::kPython, kRef);
  const SourceUnit broken(Language::kPython, "def total(xs):\n    return (xs\n");
  const auto hash = MakeHashBackend(64, 0);
  CHECK(Score(ref, broken, ScoreConfig{}, *hash) == ScoreResult{false, 0.0, 0});
}

TEST_CASE("renaming identifiers never changes the score") {
  const SourceUnit ref(Language::kPython, kRef);
  const SourceUnit pred(Language::kPython, kPred);
  const auto hash = MakeHashBackend(256, 9);
  const auto model = MakeModelBackend(SmallModel(), Pooling::kSummaryRelu);
  for (const EncoderBackend* backend : {hash.get(), model.get()}) {
    const ScoreResult base = Score(ref, pred, ScoreConfig{}, *backend);
    CHECK(base.gate_passed);
    CHECK(base.similarity >= 0.0);
    CHECK(base.similarity <= 1.0);
    for (uint64_t seed = 0; seed < 10; ++seed) {
      const SourceUnit renamed = RenameIdentifiers(pred, RandomRenaming(pred, seed));
      CHECK(renamed.text() != pred.text());
      const ScoreResult again = Score(ref, renamed, ScoreConfig{}, *backend);
      CHECK(again.similarity == base.similarity);
      CHECK(again == base);
    }
  }
}

TEST_CASE("the threshold is strict") {
  const SourceUnit ref(Language::kPython, "def f():\n    return 1\n");
  const SourceUnit pred(Language::kPython, "def f():\n    return 2\n");
  FixedBackend backend;
  ScoreConfig config;
  config.threshold = 0.6;
  const ScoreResult tie = Score(ref, pred, config, backend);
  CHECK(tie.similarity == 0.6);
  CHECK(tie.binary == 0);
  config.threshold = 0.59;
  CHECK(Score(ref, pred, config, backend).binary == 1);
}

TEST_CASE("scoring errors") {
  const SourceUnit ref(Language::kPython, kRef);
  const auto hash = MakeHashBackend(64, 0);
  CHECK(CodeOf([&] { Score(SourceUnit(Language::kPython, "def (:\n"), ref, ScoreConfig{}, *hash); }) ==
        ErrorCode::kInvalidReference);
  ScoreConfig bad;
  bad.threshold = 1.0;
  CHECK(CodeOf([&] { Score(ref, ref, bad, *hash); }) == ErrorCode::kInvalidArgument);

  ScoreConfig remote;
  remote.backend = BackendKind::kRemote;
  remote.remote.port = 1;
  remote.remote.timeout_seconds = 1.0;
  const auto backend = MakeBackend(remote);
  CHECK(CodeOf([&] { Score(ref, ref, remote, *backend); }) == ErrorCode::kBackendFailure);

  ScoreConfig model;
  model.backend = BackendKind::kModel;
  CHECK(CodeOf([&] { MakeBackend(model); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([] { MakeHashBackend(4, 0); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("compile gate") {
  const SourceUnit ref(Language::kPython, kRef);
  ScoreConfig config;
  config.gate = GateKind::kCompile;
  config.compile.commands[Language::kPython] = "python3 -m py_compile {file}";
  const auto hash = MakeHashBackend(64, 0);
  CHECK(Score(ref, SourceUnit(Language::kPython, kPred), config, *hash).gate_passed);
  // Parses, but the compiler rejects a top-level return.
  const SourceUnit stray(Language::kPython, "def f():\n    return 1\nreturn 2\n");
  CHECK(!stray.has_error());
  CHECK(Score(ref, stray, config, *hash) == ScoreResult{false, 0.0, 0});

  config.compile.commands[Language::kPython] = "sleep 5";
  config.compile.timeout_seconds = 0.2;
  CHECK(!Score(ref, ref, config, *hash).gate_passed);
  CHECK(CodeOf([&] { Score(SourceUnit(Language::kJava, "static int f() {\n    return 1;\n}\n"),
                           SourceUnit(Language::kJava, "static int f() {\n    return 1;\n}\n"),
                           config, *hash); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("corpus scoring keeps record order") {
  std::vector<CorpusRecord> records(3);
  records[0] = {"a", Language::kPython, {}, kRef, std::string(kRef), 1, {}, {}};
  records[1] = {"b", Language::kPython, {}, kRef, std::string("def f(:\n"), 0, {}, {}};
  records[2] = {"c", Language::kPython, {}, kRef, std::nullopt, 1, {}, {}};
  const auto hash = MakeHashBackend(64, 0);
  const auto scores = ScoreCorpus(records, ScoreConfig{}, *hash);
  REQUIRE(scores.size() == 3);
  CHECK(scores[0].binary == 1);
  CHECK(!scores[1].gate_passed);
  CHECK(scores[2].binary == 1);

  records[1].reference = "def f(:\n";
  try {
    ScoreCorpus(records, ScoreConfig{}, *hash);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidReference);
    CHECK(std::string(e.what()).find("record b") != std::string::npos);
  }
}

TEST_CASE("names") {
  CHECK(ParseGate("parse") == GateKind::kParseOnly);
  CHECK(ParseGate(GateName(GateKind::kCompile)) == GateKind::kCompile);
  CHECK(ParseBackend("remote") == BackendKind::kRemote);
  CHECK(BackendName(BackendKind::kModel) == "model");
  CHECK(CodeOf([] { ParseBackend("gpu"); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("a compiling prediction that does not parse fails the gate") {
  const SourceUnit ref(Language::kPython, kRef);
  ScoreConfig config;
  config.gate = GateKind::kCompile;
  config.compile.commands[Language::kPython] = "true";
  const auto hash = MakeHashBackend(64, 0);
  CHECK(Score(ref, SourceUnit(Language::kPython, "def f(:\n"), config, *hash) ==
        ScoreResult{false, 0.0, 0});
}
