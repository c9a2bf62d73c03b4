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

// Straightforward reference implementations used as oracles.

#ifndef SYNTH_EVAL_TESTS_ORACLES_H_
#define SYNTH_EVAL_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "synth_eval/code_model.h"
#include "synth_eval/metrics.h"

namespace synth_eval::oracle {

inline int CountAt(const TokenList& seq, const TokenList& gram) {
  int count = 0;
  for (size_t i = 0; i + gram.size() <= seq.size(); ++i) {
    bool same = true;
    for (size_t k = 0; k < gram.size(); ++k) same = same && seq[i + k] == gram[k];
    count += same;
  }
  return count;
}

// Distinct n-grams of `seq` in first-occurrence order.
inline std::vector<TokenList> DistinctGrams(const TokenList& seq, int n) {
  std::vector<TokenList> out;
  for (size_t i = 0; i + n <= seq.size(); ++i) {
    TokenList gram(seq.begin() + i, seq.begin() + i + n);
    if (std::find(out.begin(), out.end(), gram) == out.end()) out.push_back(gram);
  }
  return out;
}

inline double OracleBleu(const TokenList& ref, const TokenList& hyp, int max_n, double eps,
                  const std::function<double(const TokenList&)>& weight,
                  const std::set<TokenList>& skip) {
  if (hyp.empty()) return 0.0;
  const int orders = std::min<int>(max_n, static_cast<int>(hyp.size()));
  double log_sum = 0.0;
  for (int n = 1; n <= orders; ++n) {
    double matched = 0.0;
    double total = 0.0;
    for (const TokenList& gram : DistinctGrams(hyp, n)) {
      if (skip.count(gram)) continue;
      const double w = weight ? weight(gram) : 1.0;
      total += w * CountAt(hyp, gram);
      matched += w * std::min(CountAt(hyp, gram), CountAt(ref, gram));
    }
    if (total < 1.0) total = 1.0;
    if (matched == 0.0) {
      if (n == 1) return 0.0;
      matched = eps;
    }
    log_sum += std::log(matched / total) / orders;
  }
  const double c = static_cast<double>(hyp.size());
  const double r = static_cast<double>(ref.size());
  return (c > r ? 1.0 : std::exp(1.0 - r / c)) * std::exp(log_sum);
}

inline size_t OracleLcs(const TokenList& a, const TokenList& b) {
  std::map<std::pair<size_t, size_t>, size_t> memo;
  std::function<size_t(size_t, size_t)> go = [&](size_t i, size_t j) -> size_t {
    if (i == a.size() || j == b.size()) return 0;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    size_t best = a[i] == b[j] ? 1 + go(i + 1, j + 1) : std::max(go(i + 1, j), go(i, j + 1));
    return memo[key] = best;
  };
  return go(0, 0);
}

inline double OracleRouge(const TokenList& ref, const TokenList& hyp) {
  if (ref.empty() || hyp.empty()) return 0.0;
  const double lcs = static_cast<double>(OracleLcs(ref, hyp));
  if (lcs == 0.0) return 0.0;
  const double p = lcs / static_cast<double>(hyp.size());
  const double r = lcs / static_cast<double>(ref.size());
  const double b2 = 1.2 * 1.2;
  return (1.0 + b2) * p * r / (r + b2 * p);
}

inline int CountSub(const std::string& s, const std::string& gram) {
  int count = 0;
  for (size_t i = 0; i + gram.size() <= s.size(); ++i) count += s.compare(i, gram.size(), gram) == 0;
  return count;
}

inline double OracleChrF(const std::string& ref, const std::string& hyp) {
  if (ref.empty() || hyp.empty()) return 0.0;
  double f_sum = 0.0;
  int orders = 0;
  for (size_t n = 1; n <= 6; ++n) {
    if (ref.size() < n || hyp.size() < n) continue;
    ++orders;
    double matched = 0.0;
    std::set<std::string> seen;
    for (size_t i = 0; i + n <= hyp.size(); ++i) {
      const std::string gram = hyp.substr(i, n);
      if (!seen.insert(gram).second) continue;
      matched += std::min(CountSub(hyp, gram), CountSub(ref, gram));
    }
    if (matched == 0.0) continue;
    const double p = matched / static_cast<double>(hyp.size() - n + 1);
    const double r = matched / static_cast<double>(ref.size() - n + 1);
    f_sum += (1.0 + 4.0) * p * r / (4.0 * p + r);
  }
  return orders == 0 ? 0.0 : f_sum / orders;
}

inline size_t OracleLevenshtein(const std::string& a, const std::string& b) {
  std::map<std::pair<size_t, size_t>, size_t> memo;
  std::function<size_t(size_t, size_t)> go = [&](size_t i, size_t j) -> size_t {
    if (i == 0) return j;
    if (j == 0) return i;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    size_t best = std::min(go(i - 1, j) + 1, go(i, j - 1) + 1);
    best = std::min(best, go(i - 1, j - 1) + (a[i - 1] != b[j - 1]));
    return memo[key] = best;
  };
  return go(a.size(), b.size());
}

inline std::set<TokenList> OracleTopK(const std::vector<TokenList>& corpus, size_t k) {
  std::vector<TokenList> grams;
  for (const auto& seq : corpus) {
    for (int n = 1; n <= 4; ++n) {
      for (const auto& g : DistinctGrams(seq, n)) {
        if (std::find(grams.begin(), grams.end(), g) == grams.end()) grams.push_back(g);
      }
    }
  }
  auto freq = [&](const TokenList& g) {
    long total = 0;
    for (const auto& seq : corpus) total += CountAt(seq, g);
    return total;
  };
  std::set<TokenList> out;
  while (out.size() < k && out.size() < grams.size()) {
    const TokenList* best = nullptr;
    for (const auto& g : grams) {
      if (out.count(g)) continue;
      if (!best || freq(g) > freq(*best) || (freq(g) == freq(*best) && g < *best)) best = &g;
    }
    out.insert(*best);
  }
  return out;
}

// Enumerates every truncated subtree by explicit recursion over the tree.
inline void CollectSubtrees(const SyntaxTree& tree, NodeId id, int depth,
                     std::vector<std::string>& out) {
  std::function<std::string(NodeId, int)> render = [&](NodeId n, int left) {
    std::string s(tree[n].kind);
    if (left == 1 || tree[n].children.empty()) return s;
    std::vector<std::string> parts;
    for (NodeId c : tree[n].children) parts.push_back(render(c, left - 1));
    s += "(";
    for (size_t i = 0; i < parts.size(); ++i) s += (i ? " " : "") + parts[i];
    return s + ")";
  };
  if (!tree[id].children.empty()) out.push_back(render(id, depth));
  for (NodeId c : tree[id].children) CollectSubtrees(tree, c, depth, out);
}

inline double OracleSyntaxMatch(const SourceUnit& ref, const SourceUnit& hyp, int depth) {
  std::vector<std::string> r;
  std::vector<std::string> h;
  CollectSubtrees(ref.tree(), 0, depth, r);
  CollectSubtrees(hyp.tree(), 0, depth, h);
  int found = 0;
  for (const auto& s : r) found += std::find(h.begin(), h.end(), s) != h.end();
  return static_cast<double>(found) / static_cast<double>(r.size());
}

inline TokenList RandomTokens(std::mt19937& gen, int min_len = 1) {
  static const char* kAlphabet[] = {"a", "b", "c", "d", "e", "+", "="};
  std::uniform_int_distribution<int> len(min_len, 20);
  std::uniform_int_distribution<int> pick(0, 6);
  TokenList out(len(gen));
  for (auto& t : out) t = kAlphabet[pick(gen)];
  return out;
}

inline std::string RandomText(std::mt19937& gen) {
  static const std::string kChars = "abcd  +=(\n";
  std::uniform_int_distribution<int> len(1, 20);
  std::uniform_int_distribution<size_t> pick(0, kChars.size() - 1);
  std::string out(len(gen), ' ');
  for (auto& c : out) c = kChars[pick(gen)];
  return out;
}

}  // namespace synth_eval::oracle

#endif  // SYNTH_EVAL_TESTS_ORACLES_H_
