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


#ifndef SYNTH_EVAL_MUTATOR_H_
#define SYNTH_EVAL_MUTATOR_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "synth_eval/code_model.h"
#include "synth_eval/corpus.h"

namespace synth_eval {

enum class OperatorClass {
  kArithmetic,
  kRelational,
  kConditional,
  kShift,
  kLogical,
  kAssignment,
};

using ClassSet = std::set<OperatorClass>;

const ClassSet& AllOperatorClasses();
std::string_view OperatorClassName(OperatorClass cls);
// "arithmetic", "relational", "conditional", "shift", "logical", "assignment".
OperatorClass ParseOperatorClass(std::string_view name);
// Comma-separated names, or "all".
ClassSet ParseClassSet(std::string_view list);

// Operators of `cls` that exist in `lang`.
const std::vector<std::string_view>& OperatorInventory(Language lang, OperatorClass cls);

struct MutationSite {
  ByteSpan span;  // the operator token
  OperatorClass cls;
  std::string_view op;
};

// Operator tokens of binary/comparison/assignment nodes, in text order.
// Throws kParseErrorInput.
std::vector<MutationSite> FindMutationSites(const SourceUnit& unit, const ClassSet& classes);

// Replaces one random site's operator with a different operator of the same
// class. nullopt when no site exists. Throws kParseErrorInput.
std::optional<SourceUnit> MutateUnit(const SourceUnit& unit, const ClassSet& classes,
                                     uint64_t seed);

struct MutationPlan {
  double ratio = 1.0;
  uint64_t seed = 0;
  ClassSet classes = AllOperatorClasses();
  int max_redraws = 5;
};

// True when `code` passes every test of `record`.
using TestOracle = std::function<bool(const CorpusRecord& record, const SourceUnit& code)>;

struct MutationStats {
  size_t selected = 0;
  size_t killed = 0;
  // Records whose every draw survived the tests.
  std::vector<std::string> equivalent;
  // Selected records without any mutable operator.
  std::vector<std::string> unmutable;
};

// Mutates the predictions of a seeded sample of ceil(ratio * #passing)
// records with pass1 = 1; killed mutants get pass1 = 0. Throws kMissingTests
// for a selected record without tests, kInvalidArgument for ratio outside
// [0, 1].
std::vector<CorpusRecord> MutateCorpus(const std::vector<CorpusRecord>& records,
                                       const MutationPlan& plan, const TestOracle& oracle,
                                       MutationStats* stats = nullptr);

}  // namespace synth_eval

#endif  // SYNTH_EVAL_MUTATOR_H_
