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


#ifndef SYNTH_EVAL_METRICS_H_
#define SYNTH_EVAL_METRICS_H_

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "synth_eval/code_model.h"

namespace synth_eval {

using TokenList = std::vector<std::string>;
using Ngram = std::vector<std::string>;
using NgramSet = std::set<Ngram>;

enum class Smoothing {
  kNone,
  // Zero match counts for n >= 2 become epsilon (default 0.1).
  kEpsilon,
  // Zero match counts for n >= 2 become 1 over (total + 1).
  kAddOne,
};

struct BleuOptions {
  int max_n = 4;
  Smoothing smoothing = Smoothing::kEpsilon;
  double epsilon = 0.1;
};

// Multiset of the n-grams of `tokens` with the given order.
std::map<Ngram, int> NgramCounts(const TokenList& tokens, int n);

// Corpus BLEU on one pair: geometric mean of clipped n-gram precisions times
// the brevity penalty. 0 when the hypothesis is empty or shares no unigram.
// Hypotheses shorter than max_n use the orders they have.
double Bleu(const TokenList& ref, const TokenList& hyp, const BleuOptions& options = {});

// BLEU with n-grams that contain a keyword weighted by `keyword_weight`.
double WeightedBleu(const TokenList& ref, const TokenList& hyp,
                    const std::set<std::string>& keywords, double keyword_weight = 5.0,
                    const BleuOptions& options = {});

// F-measure of the longest common subsequence.
double RougeL(const TokenList& ref, const TokenList& hyp, double beta = 1.2);

// Runs of whitespace become one space; leading/trailing whitespace dropped.
std::string NormalizeWhitespace(std::string_view text);

// Character n-gram F-score averaged over the orders 1..max_n present in both
// (whitespace-normalized) texts.
double ChrF(std::string_view ref, std::string_view hyp, int max_n = 6, double beta = 2.0);

size_t Levenshtein(std::string_view a, std::string_view b);
// 1 - levenshtein / max length; 1 when both are empty.
double EditSimilarity(std::string_view ref, std::string_view hyp);

// The k most frequent n-grams (orders 1..max_n) across `corpus`; ties broken
// by n-gram order.
NgramSet TriviallySharedNgrams(const std::vector<TokenList>& corpus, size_t k,
                               int max_n = 4);

// BLEU ignoring the given n-grams on both sides.
double CrystalBleu(const TokenList& ref, const TokenList& hyp,
                   const NgramSet& trivially_shared, const BleuOptions& options = {});

// Fraction of the reference's non-leaf subtrees (truncated at `max_depth`
// levels, rendered as kind sequences) found among the hypothesis subtrees.
// 0 when either side does not parse.
double SyntaxMatch(const SourceUnit& ref, const SourceUnit& hyp, int max_depth = 4);

// Depth-truncated kind signature of every non-leaf node, in pre-order.
std::vector<std::string> SubtreeSignatures(const SourceUnit& unit, int max_depth);

enum class MetricKind {
  kBleu,
  kWeightedBleu,
  kRougeL,
  kChrF,
  kEditSimilarity,
  kCrystalBleu,
  kSyntaxMatch,
  kExactMatch,
};

const std::vector<MetricKind>& AllMetricKinds();
// "bleu", "weighted-bleu", "rouge-l", "chrf", "ed", "crystal-bleu",
// "syntax-match", "exact-match".
std::string_view MetricName(MetricKind kind);
MetricKind ParseMetricKind(std::string_view name);

// Directory holding bundled data (keyword lists, corpora). The
// SYNTH_EVAL_DATA_DIR environment variable overrides the build-time default.
std::string DataDir();

// Reserved words, one per line in <data>/keywords/<lang>.txt.
const std::set<std::string>& Keywords(Language lang);
std::set<std::string> LoadKeywords(const std::string& path);

struct MetricContext {
  // Needed by kCrystalBleu; empty means plain BLEU.
  NgramSet trivially_shared;
  double keyword_weight = 5.0;
  BleuOptions bleu;
  int syntax_depth = 4;
};

// Scores one pair with `kind`; token metrics use Tokenize, character metrics
// the raw text.
double ComputeMetric(MetricKind kind, const SourceUnit& ref, const SourceUnit& hyp,
                     const MetricContext& context = {});

}  // namespace synth_eval

#endif  // SYNTH_EVAL_METRICS_H_
