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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>

#include "synth_eval/error.h"

namespace synth_eval {
namespace {

using WeightFn = std::function<double(const Ngram&)>;

double BleuCore(const TokenList& ref, const TokenList& hyp, const BleuOptions& options,
                const WeightFn& weight, const NgramSet* skip) {
  if (options.max_n < 1) {
    throw Error(ErrorCode::kInvalidArgument, "BLEU max_n must be at least 1");
  }
  if (hyp.empty()) return 0.0;
  // Orders longer than the hypothesis are dropped and the weights renormalized.
  const int orders = std::min<int>(options.max_n, static_cast<int>(hyp.size()));
  double log_sum = 0.0;
  for (int n = 1; n <= orders; ++n) {
    const auto hyp_counts = NgramCounts(hyp, n);
    const auto ref_counts = NgramCounts(ref, n);
    double matched = 0.0;
    double total = 0.0;
    for (const auto& [gram, count] : hyp_counts) {
      if (skip && skip->count(gram)) continue;
      const double w = weight ? weight(gram) : 1.0;
      total += w * count;
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) matched += w * std::min(count, it->second);
    }
    total = std::max(1.0, total);
    if (matched == 0.0) {
      if (n == 1) return 0.0;
      switch (options.smoothing) {
        case Smoothing::kNone: return 0.0;
        case Smoothing::kEpsilon: matched = options.epsilon; break;
        case Smoothing::kAddOne:
          matched = 1.0;
          total += 1.0;
          break;
      }
    }
    log_sum += std::log(matched / total) / orders;
  }
  const double c = static_cast<double>(hyp.size());
  const double r = static_cast<double>(ref.size());
  const double brevity = c > r ? 1.0 : std::exp(1.0 - r / c);
  return brevity * std::exp(log_sum);
}

std::map<std::string, int> CharNgramCounts(std::string_view text, int n) {
  std::map<std::string, int> counts;
  if (text.size() < static_cast<size_t>(n)) return counts;
  for (size_t i = 0; i + n <= text.size(); ++i) ++counts[std::string(text.substr(i, n))];
  return counts;
}

void AppendSignature(const SyntaxTree& tree, NodeId id, int depth, std::string& out) {
  out += tree[id].kind;
  if (depth <= 1) return;
  bool open = false;
  for (NodeId child : tree[id].children) {
    if (IsCommentKind(tree[child].kind)) continue;
    out += open ? " " : "(";
    open = true;
    AppendSignature(tree, child, depth - 1, out);
  }
  if (open) out += ")";
}

}  // namespace

std::map<Ngram, int> NgramCounts(const TokenList& tokens, int n) {
  std::map<Ngram, int> counts;
  if (n < 1 || tokens.size() < static_cast<size_t>(n)) return counts;
  for (size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[Ngram(tokens.begin() + i, tokens.begin() + i + n)];
  }
  return counts;
}

double Bleu(const TokenList& ref, const TokenList& hyp, const BleuOptions& options) {
  return BleuCore(ref, hyp, options, nullptr, nullptr);
}

double WeightedBleu(const TokenList& ref, const TokenList& hyp,
                    const std::set<std::string>& keywords, double keyword_weight,
                    const BleuOptions& options) {
  const WeightFn weight = [&](const Ngram& gram) {
    for (const auto& token : gram) {
      if (keywords.count(token)) return keyword_weight;
    }
    return 1.0;
  };
  return BleuCore(ref, hyp, options, weight, nullptr);
}

double RougeL(const TokenList& ref, const TokenList& hyp, double beta) {
  if (ref.empty() || hyp.empty()) return 0.0;
  std::vector<size_t> prev(hyp.size() + 1, 0);
  std::vector<size_t> cur(hyp.size() + 1, 0);
  for (size_t i = 1; i <= ref.size(); ++i) {
    for (size_t j = 1; j <= hyp.size(); ++j) {
      cur[j] = ref[i - 1] == hyp[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  const double lcs = static_cast<double>(prev[hyp.size()]);
  if (lcs == 0.0) return 0.0;
  const double precision = lcs / static_cast<double>(hyp.size());
  const double recall = lcs / static_cast<double>(ref.size());
  const double b2 = beta * beta;
  return (1.0 + b2) * precision * recall / (recall + b2 * precision);
}

std::string NormalizeWhitespace(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char ch : text) {
    if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' || ch == '\v') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += ch;
  }
  return out;
}

double ChrF(std::string_view ref, std::string_view hyp, int max_n, double beta) {
  const std::string r = NormalizeWhitespace(ref);
  const std::string h = NormalizeWhitespace(hyp);
  if (h.empty() || r.empty()) return 0.0;
  const double b2 = beta * beta;
  double f_sum = 0.0;
  int orders = 0;
  for (int n = 1; n <= max_n; ++n) {
    const auto ref_counts = CharNgramCounts(r, n);
    const auto hyp_counts = CharNgramCounts(h, n);
    if (ref_counts.empty() || hyp_counts.empty()) continue;
    double matched = 0.0;
    for (const auto& [gram, count] : hyp_counts) {
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) matched += std::min(count, it->second);
    }
    ++orders;
    if (matched == 0.0) continue;
    const double precision = matched / static_cast<double>(h.size() - n + 1);
    const double recall = matched / static_cast<double>(r.size() - n + 1);
    f_sum += (1.0 + b2) * precision * recall / (b2 * precision + recall);
  }
  return orders == 0 ? 0.0 : f_sum / orders;
}

size_t Levenshtein(std::string_view a, std::string_view b) {
  std::vector<size_t> row(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    size_t diagonal = row[0];
    row[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      const size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1,
                         diagonal + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diagonal = up;
    }
  }
  return row[b.size()];
}

double EditSimilarity(std::string_view ref, std::string_view hyp) {
  const size_t longest = std::max(ref.size(), hyp.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(Levenshtein(ref, hyp)) / static_cast<double>(longest);
}

NgramSet TriviallySharedNgrams(const std::vector<TokenList>& corpus, size_t k, int max_n) {
  std::map<Ngram, long> frequency;
  for (const TokenList& tokens : corpus) {
    for (int n = 1; n <= max_n; ++n) {
      for (const auto& [gram, count] : NgramCounts(tokens, n)) frequency[gram] += count;
    }
  }
  std::vector<std::pair<Ngram, long>> ranked(frequency.begin(), frequency.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  NgramSet out;
  for (size_t i = 0; i < ranked.size() && i < k; ++i) out.insert(ranked[i].first);
  return out;
}

double CrystalBleu(const TokenList& ref, const TokenList& hyp,
                   const NgramSet& trivially_shared, const BleuOptions& options) {
  return BleuCore(ref, hyp, options, nullptr, &trivially_shared);
}

std::vector<std::string> SubtreeSignatures(const SourceUnit& unit, int max_depth) {
  const SyntaxTree& tree = unit.tree();
  std::vector<std::string> out;
  for (NodeId id = 0; id < tree.size(); ++id) {
    if (tree[id].is_leaf() || IsCommentKind(tree[id].kind)) continue;
    std::string signature;
    AppendSignature(tree, id, max_depth, signature);
    out.push_back(std::move(signature));
  }
  return out;
}

double SyntaxMatch(const SourceUnit& ref, const SourceUnit& hyp, int max_depth) {
  if (ref.has_error() || hyp.has_error()) return 0.0;
  const std::vector<std::string> ref_subtrees = SubtreeSignatures(ref, max_depth);
  if (ref_subtrees.empty()) return 0.0;
  const std::vector<std::string> hyp_list = SubtreeSignatures(hyp, max_depth);
  const std::set<std::string> hyp_subtrees(hyp_list.begin(), hyp_list.end());
  size_t found = 0;
  for (const auto& s : ref_subtrees) found += hyp_subtrees.count(s);
  return static_cast<double>(found) / static_cast<double>(ref_subtrees.size());
}

const std::vector<MetricKind>& AllMetricKinds() {
  static const std::vector<MetricKind> all = {
      MetricKind::kBleu,           MetricKind::kWeightedBleu, MetricKind::kRougeL,
      MetricKind::kChrF,           MetricKind::kEditSimilarity, MetricKind::kCrystalBleu,
      MetricKind::kSyntaxMatch,    MetricKind::kExactMatch};
  return all;
}

std::string_view MetricName(MetricKind kind) {
  switch (kind) {
    case MetricKind::kBleu: return "bleu";
    case MetricKind::kWeightedBleu: return "weighted-bleu";
    case MetricKind::kRougeL: return "rouge-l";
    case MetricKind::kChrF: return "chrf";
    case MetricKind::kEditSimilarity: return "ed";
    case MetricKind::kCrystalBleu: return "crystal-bleu";
    case MetricKind::kSyntaxMatch: return "syntax-match";
    case MetricKind::kExactMatch: return "exact-match";
  }
  return "?";
}

MetricKind ParseMetricKind(std::string_view name) {
  for (MetricKind kind : AllMetricKinds()) {
    if (MetricName(kind) == name) return kind;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown metric '" + std::string(name) + "'");
}

std::string DataDir() {
  if (const char* env = std::getenv("SYNTH_EVAL_DATA_DIR"); env && *env) return env;
  return SYNTH_EVAL_DATA_DIR;
}

std::set<std::string> LoadKeywords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open keyword list " + path);
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const std::string word = NormalizeWhitespace(line);
    if (!word.empty() && word[0] != '#') words.insert(word);
  }
  return words;
}

const std::set<std::string>& Keywords(Language lang) {
  static std::once_flag once;
  static std::set<std::string> python;
  static std::set<std::string> java;
  std::call_once(once, [] {
    python = LoadKeywords(DataDir() + "/keywords/python.txt");
    java = LoadKeywords(DataDir() + "/keywords/java.txt");
  });
  return lang == Language::kJava ? java : python;
}

double ComputeMetric(MetricKind kind, const SourceUnit& ref, const SourceUnit& hyp,
                     const MetricContext& context) {
  switch (kind) {
    case MetricKind::kBleu: return Bleu(Tokenize(ref), Tokenize(hyp), context.bleu);
    case MetricKind::kWeightedBleu:
      return WeightedBleu(Tokenize(ref), Tokenize(hyp), Keywords(ref.language()),
                          context.keyword_weight, context.bleu);
    case MetricKind::kRougeL: return RougeL(Tokenize(ref), Tokenize(hyp));
    case MetricKind::kChrF: return ChrF(ref.text(), hyp.text());
    case MetricKind::kEditSimilarity: return EditSimilarity(ref.text(), hyp.text());
    case MetricKind::kCrystalBleu:
      return CrystalBleu(Tokenize(ref), Tokenize(hyp), context.trivially_shared,
                         context.bleu);
    case MetricKind::kSyntaxMatch: return SyntaxMatch(ref, hyp, context.syntax_depth);
    case MetricKind::kExactMatch: return Tokenize(ref) == Tokenize(hyp) ? 1.0 : 0.0;
  }
  return 0.0;
}

}  // namespace synth_eval
