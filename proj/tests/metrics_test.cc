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

#include "synth_eval/metrics.h"

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>

#include "doctest.h"
#include "oracles.h"
#include "synth_eval/sketcher.h"

using namespace synth_eval;
using namespace synth_eval::oracle;

namespace {

const char* kSumA = "def sum (a , b) : a = a + b return a";
const char* kSumD = "def sum (a , b) : a += b return a";

}  // namespace

TEST_CASE("bleu basics") {
  const TokenList x = {"a", "b", "c", "d", "e"};
  CHECK(Bleu(x, x) == doctest::Approx(1.0));
  CHECK(Bleu(x, {"p", "q", "r"}, {4, Smoothing::kNone}) == 0.0);
  CHECK(Bleu(x, {}) == 0.0);
  CHECK_THROWS(Bleu(x, x, {0}));
}

TEST_CASE("sum example bleu and chrf") {
  auto tokens = [](const char* code) {
    return Tokenize(SourceUnit(Language::kPython, code));
  };
  const TokenList a = tokens("def sum(a, b):\n    a = a + b\n    return a");
  REQUIRE(a.size() == 15);
  const TokenList c = tokens("def f(num_0, num_1):\n    num_0 = num_0 + num_1\n    return num_0");
  const TokenList d = tokens("def sum(a, b):\n    a += b\n    return a");
  const TokenList e = tokens("def sum(a, b):\n    a = a - b\n    return a");
  CHECK(std::abs(Bleu(a, c) - 0.040) <= 0.01);
  CHECK(Bleu(a, d) == doctest::Approx(0.653).epsilon(0.002));
  CHECK(Bleu(a, e) == doctest::Approx(0.800).epsilon(0.002));
  CHECK(Bleu(a, a) == doctest::Approx(1.0));
  CHECK(std::abs(ChrF(kSumA, kSumD) - 0.807) <= 0.01);
  CHECK(ChrF(kSumA, kSumA) == doctest::Approx(1.0));
}

TEST_CASE("weighted bleu") {
  const std::set<std::string> kw = {"if", "return"};
  const TokenList ref = {"if", "x", "return", "y"};
  CHECK(WeightedBleu(ref, ref, kw) == doctest::Approx(1.0));
  const TokenList shares_keywords = {"if", "p", "return", "q"};
  const TokenList shares_names = {"for", "x", "while", "y"};
  // unigram view: two keyword matches outweigh two name matches
  CHECK(WeightedBleu(ref, shares_keywords, kw, 5.0, {1}) >
        WeightedBleu(ref, shares_names, kw, 5.0, {1}));
  CHECK(WeightedBleu(ref, shares_keywords, {}, 5.0, {1}) ==
        WeightedBleu(ref, shares_names, {}, 5.0, {1}));
  // 3-token case: unigram precision (5 + 1) / (5 + 1 + 1)
  const TokenList r3 = {"return", "a", "b"};
  const TokenList h3 = {"return", "a", "c"};
  const double expected =
      OracleBleu(r3, h3, 4, 0.1, [&](const TokenList& g) {
        for (const auto& t : g) {
          if (kw.count(t)) return 5.0;
        }
        return 1.0;
      }, {});
  CHECK(WeightedBleu(r3, h3, kw) == expected);
  CHECK(WeightedBleu(r3, h3, {}) == Bleu(r3, h3));
  CHECK(Keywords(Language::kPython).count("def"));
  CHECK(Keywords(Language::kJava).count("instanceof"));
  CHECK_FALSE(Keywords(Language::kJava).count("def"));
}

TEST_CASE("rouge-l") {
  CHECK(RougeL({"a", "b", "c"}, {"a", "b", "c"}) == doctest::Approx(1.0));
  const double p = 2.0 / 3.0;
  const double b2 = 1.44;
  CHECK(RougeL({"a", "b", "c"}, {"a", "x", "c"}) ==
        doctest::Approx((1 + b2) * p * p / (p + b2 * p)));
  CHECK(RougeL({"a"}, {"b"}) == 0.0);
  CHECK(RougeL({}, {}) == 0.0);
}

TEST_CASE("chrf and edit similarity") {
  CHECK(ChrF("abc", "abd") == OracleChrF("abc", "abd"));
  CHECK(ChrF("abc", "abd") == doctest::Approx((5.0 * 2 / 3 * 2 / 3 / (4.0 * 2 / 3 + 2.0 / 3) +
                                                5.0 * 0.5 * 0.5 / (4.0 * 0.5 + 0.5)) / 3));
  CHECK(ChrF("abc", "") == 0.0);
  CHECK(NormalizeWhitespace("  a \n\t b  ") == "a b");
  CHECK(EditSimilarity("abc", "abc") == 1.0);
  CHECK(EditSimilarity("abc", "axc") == doctest::Approx(1.0 - 1.0 / 3));
  CHECK(EditSimilarity("", "abc") == 0.0);
  CHECK(EditSimilarity("", "") == 1.0);
}

TEST_CASE("crystal bleu") {
  const TokenList ref = {"a", "b", "c", "a", "b"};
  const TokenList hyp = {"a", "b", "d", "a"};
  CHECK(CrystalBleu(ref, hyp, {}) == Bleu(ref, hyp));
  NgramSet every;
  for (int n = 1; n <= 4; ++n) {
    for (const auto& [g, c] : NgramCounts(ref, n)) every.insert(g);
  }
  CHECK(CrystalBleu(ref, hyp, every) == 0.0);
  const std::vector<TokenList> corpus = {ref, hyp};
  const NgramSet top1 = TriviallySharedNgrams(corpus, 1);
  CHECK(top1 == OracleTopK(corpus, 1));
  CHECK(top1 == NgramSet{{"a"}});
  CHECK(CrystalBleu(ref, hyp, top1) == OracleBleu(ref, hyp, 4, 0.1, nullptr, top1));
}

TEST_CASE("syntax match") {
  const SourceUnit plus(Language::kPython, "a=a+b");
  const SourceUnit minus(Language::kPython, "a=a-b");
  CHECK(SyntaxMatch(plus, plus) == 1.0);
  CHECK(SubtreeSignatures(plus, 4).size() == 4);
  CHECK(SubtreeSignatures(plus, 4)[3] == "binary_operator(identifier + identifier)");
  CHECK(SyntaxMatch(plus, minus) == OracleSyntaxMatch(plus, minus, 4));
  // only the module signature is cut off above the operator
  CHECK(SyntaxMatch(plus, minus) == 0.25);
  CHECK(SyntaxMatch(plus, minus, 2) == OracleSyntaxMatch(plus, minus, 2));
  CHECK(SyntaxMatch(plus, minus, 2) == 0.75);
  CHECK(SyntaxMatch(SourceUnit(Language::kPython, "import os"),
                    SourceUnit(Language::kPython, "while x:\n    pass")) == 0.0);
  CHECK(SyntaxMatch(plus, SourceUnit(Language::kPython, "def (")) == 0.0);
}

TEST_CASE("metrics equal brute-force oracles on random inputs") {
  std::mt19937 gen(20240601);
  for (int trial = 0; trial < 50; ++trial) {
    const TokenList ref = RandomTokens(gen);
    const TokenList hyp = RandomTokens(gen);
    CHECK(Bleu(ref, hyp) == OracleBleu(ref, hyp, 4, 0.1, nullptr, {}));
    CHECK(RougeL(ref, hyp) == OracleRouge(ref, hyp));
    const std::vector<TokenList> corpus = {ref, hyp, RandomTokens(gen)};
    const NgramSet shared = TriviallySharedNgrams(corpus, 3);
    CHECK(shared == OracleTopK(corpus, 3));
    CHECK(CrystalBleu(ref, hyp, shared) == OracleBleu(ref, hyp, 4, 0.1, nullptr, shared));
    const std::string rt = RandomText(gen);
    const std::string ht = RandomText(gen);
    CHECK(ChrF(rt, ht) == OracleChrF(NormalizeWhitespace(rt), NormalizeWhitespace(ht)));
    CHECK(Levenshtein(rt, ht) == OracleLevenshtein(rt, ht));
    CHECK(EditSimilarity(rt, ht) ==
          1.0 - static_cast<double>(OracleLevenshtein(rt, ht)) /
                    static_cast<double>(std::max(rt.size(), ht.size())));
  }
}

TEST_CASE("metric range and identity") {
  std::mt19937 gen(7);
  for (int trial = 0; trial < 50; ++trial) {
    const TokenList ref = RandomTokens(gen);
    const TokenList hyp = RandomTokens(gen);
    for (double v : {Bleu(ref, hyp), RougeL(ref, hyp), WeightedBleu(ref, hyp, {"a"}),
                     CrystalBleu(ref, hyp, {{"a"}})}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0 + 1e-12);
    }
    CHECK(Bleu(ref, ref) == doctest::Approx(1.0));
    CHECK(RougeL(ref, ref) == doctest::Approx(1.0));
  }
  const SourceUnit unit(Language::kJava, "static int f(int a) { return a * 2; }");
  for (MetricKind kind : AllMetricKinds()) {
    CHECK(ComputeMetric(kind, unit, unit) == doctest::Approx(1.0));
  }
}

TEST_CASE("renaming hurts bleu but not sketched bleu") {
  const SourceUnit a(Language::kPython, "def sum(a, b):\n    a = a + b\n    return a");
  const SourceUnit renamed = RenameIdentifiers(a, RandomRenaming(a, 5));
  CHECK(Bleu(Tokenize(a), Tokenize(renamed)) < 1.0);
  CHECK(Bleu(Tokenize(Sketch(a).unit), Tokenize(Sketch(renamed).unit)) == 1.0);
}

TEST_CASE("metric names") {
  for (MetricKind kind : AllMetricKinds()) CHECK(ParseMetricKind(MetricName(kind)) == kind);
  CHECK_THROWS(ParseMetricKind("meteor"));
}
