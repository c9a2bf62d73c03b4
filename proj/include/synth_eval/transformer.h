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

#ifndef SYNTH_EVAL_TRANSFORMER_H_
#define SYNTH_EVAL_TRANSFORMER_H_

#include <cstdint>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "synth_eval/code_model.h"

namespace synth_eval {

// Behavior-preserving rewrites:
//   LoopExchange        for <-> while
//   ExpressionExchange  a += b <-> a = a + b
//   PermuteExchange     if (c) {A} else {B} <-> if (!(c)) {B} else {A}
//   ConditionExchange   a > b <-> b < a, True <-> not False
enum class TransformRule {
  kLoopExchange,
  kExpressionExchange,
  kPermuteExchange,
  kConditionExchange,
};

enum class Direction { kForward, kBackward };

using RuleSet = std::set<TransformRule>;

const RuleSet& AllTransformRules();
std::string_view TransformRuleName(TransformRule rule);
// "loop", "expression", "permute", "condition"; throws kInvalidArgument.
TransformRule ParseTransformRule(std::string_view name);
// Comma-separated list of rule names, or "all".
RuleSet ParseRuleSet(std::string_view list);

struct TransformSite {
  TransformRule rule;
  ByteSpan anchor;
  std::string_view anchor_kind;
  Direction direction;
  // Fingerprint of the text the site was discovered on.
  uint64_t text_hash;
};

uint64_t TextHash(std::string_view text);

// Sites ordered by anchor start. Throws kParseErrorInput.
std::vector<TransformSite> FindSites(const SourceUnit& unit, const RuleSet& rules);

// The rewrites realizing `site`; throws kStaleSite when the unit is not the
// one the site was found on.
std::vector<Rewrite> PlanTransform(const SourceUnit& unit, const TransformSite& site);

SourceUnit ApplyTransform(const SourceUnit& unit, const TransformSite& site);

// Applies a uniformly drawn nonempty subset of the applicable sites (sites
// whose edits collide with an already accepted one are dropped, scanning in
// descending anchor order). Returns nullopt when no site exists.
std::optional<SourceUnit> SampleVariant(const SourceUnit& unit,
                                        const RuleSet& rules, uint64_t seed);

}  // namespace synth_eval

#endif  // SYNTH_EVAL_TRANSFORMER_H_
