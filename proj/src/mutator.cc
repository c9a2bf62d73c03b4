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

#include "synth_eval/mutator.h"

#include <algorithm>
#include <cmath>

#include "synth_eval/error.h"
#include "synth_eval/random.h"
#include "syntax_util.h"

namespace synth_eval {
namespace {

using internal::IsOneOf;

struct Inventory {
  OperatorClass cls;
  std::vector<std::string_view> python;
  std::vector<std::string_view> java;
};

const std::vector<Inventory>& Inventories() {
  static const std::vector<Inventory> table = {
      {OperatorClass::kArithmetic,
       {"+", "-", "*", "/", "**", "%"},
       {"+", "-", "*", "/", "%"}},
      {OperatorClass::kRelational,
       {">", "<", ">=", "<=", "==", "!="},
       {">", "<", ">=", "<=", "==", "!="}},
      {OperatorClass::kConditional, {}, {"&&", "||"}},
      {OperatorClass::kShift, {"<<", ">>"}, {"<<", ">>", ">>>"}},
      {OperatorClass::kLogical, {"&", "|", "^"}, {"&", "|", "^"}},
      {OperatorClass::kAssignment,
       {"=", "+=", "-=", "*=", "/=", "%=", "**=", "<<=", ">>="},
       {"=", "+=", "-=", "*=", "/=", "%=", "<<=", ">>=", ">>>="}},
  };
  return table;
}

bool IsOperatorParent(const SourceUnit& unit, NodeId parent, NodeId op) {
  const SyntaxTree& tree = unit.tree();
  const std::string_view kind = tree[parent].kind;
  if (unit.language() == Language::kPython) {
    if (IsOneOf(kind, {"binary_operator", "augmented_assignment"})) {
      return tree[op].field == "operator";
    }
    if (kind == "comparison_operator") return tree[op].field == "operators";
    if (kind == "assignment") {
      // Plain `x = e` only: no annotation, chain, or unpacking target.
      const NodeId left = tree.ChildByField(parent, "left");
      const NodeId right = tree.ChildByField(parent, "right");
      return tree[op].kind == "=" && tree.ChildByField(parent, "type") == kNoNode &&
             left != kNoNode && right != kNoNode &&
             IsOneOf(tree[left].kind, {"identifier", "subscript", "attribute"}) &&
             tree[right].kind != "assignment" &&
             tree[tree[parent].parent].kind == "expression_statement";
    }
    return false;
  }
  if (kind == "binary_expression") return tree[op].field == "operator";
  if (kind == "assignment_expression") {
    return tree[op].field == "operator" &&
           tree[tree[parent].parent].kind == "expression_statement";
  }
  return false;
}

std::optional<OperatorClass> ClassOf(Language lang, std::string_view op) {
  for (const Inventory& inv : Inventories()) {
    const auto& ops = lang == Language::kJava ? inv.java : inv.python;
    if (std::find(ops.begin(), ops.end(), op) != ops.end()) return inv.cls;
  }
  return std::nullopt;
}

}  // namespace

const ClassSet& AllOperatorClasses() {
  static const ClassSet all = {OperatorClass::kArithmetic, OperatorClass::kRelational,
                               OperatorClass::kConditional, OperatorClass::kShift,
                               OperatorClass::kLogical, OperatorClass::kAssignment};
  return all;
}

std::string_view OperatorClassName(OperatorClass cls) {
  switch (cls) {
    case OperatorClass::kArithmetic: return "arithmetic";
    case OperatorClass::kRelational: return "relational";
    case OperatorClass::kConditional: return "conditional";
    case OperatorClass::kShift: return "shift";
    case OperatorClass::kLogical: return "logical";
    case OperatorClass::kAssignment: return "assignment";
  }
  return "?";
}

OperatorClass ParseOperatorClass(std::string_view name) {
  for (OperatorClass cls : AllOperatorClasses()) {
    if (OperatorClassName(cls) == name) return cls;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown operator class '" + std::string(name) + "'");
}

ClassSet ParseClassSet(std::string_view list) {
  if (list.empty() || list == "all") return AllOperatorClasses();
  ClassSet classes;
  size_t start = 0;
  while (start <= list.size()) {
    const size_t comma = std::min(list.find(',', start), list.size());
    classes.insert(ParseOperatorClass(list.substr(start, comma - start)));
    start = comma + 1;
  }
  return classes;
}

const std::vector<std::string_view>& OperatorInventory(Language lang, OperatorClass cls) {
  for (const Inventory& inv : Inventories()) {
    if (inv.cls == cls) return lang == Language::kJava ? inv.java : inv.python;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown operator class");
}

std::vector<MutationSite> FindMutationSites(const SourceUnit& unit,
                                            const ClassSet& classes) {
  if (unit.has_error()) {
    throw Error(ErrorCode::kParseErrorInput, "cannot mutate unparsable code");
  }
  const SyntaxTree& tree = unit.tree();
  std::vector<MutationSite> sites;
  for (NodeId id = 1; id < tree.size(); ++id) {
    const SyntaxNode& node = tree[id];
    if (node.named || node.parent == kNoNode) continue;
    if (!IsOperatorParent(unit, node.parent, id)) continue;
    const std::string_view op = unit.TextOf(id);
    const auto cls = ClassOf(unit.language(), op);
    if (!cls || !classes.count(*cls)) continue;
    if (OperatorInventory(unit.language(), *cls).size() < 2) continue;
    sites.push_back({node.span, *cls, op});
  }
  return sites;
}

std::optional<SourceUnit> MutateUnit(const SourceUnit& unit, const ClassSet& classes,
                                     uint64_t seed) {
  std::vector<MutationSite> sites = FindMutationSites(unit, classes);
  Rng rng(MixSeed(seed, 0x6d75));
  while (!sites.empty()) {
    const size_t pick = rng.Index(sites.size());
    const MutationSite site = sites[pick];
    std::vector<std::string_view> choices;
    for (std::string_view op : OperatorInventory(unit.language(), site.cls)) {
      if (op != site.op) choices.push_back(op);
    }
    rng.Shuffle(choices);
    for (std::string_view replacement : choices) {
      SourceUnit mutant =
          ApplyRewrites(unit, {{site.span, std::string(replacement)}});
      if (!mutant.has_error()) return mutant;
    }
    sites.erase(sites.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return std::nullopt;
}

std::vector<CorpusRecord> MutateCorpus(const std::vector<CorpusRecord>& records,
                                       const MutationPlan& plan, const TestOracle& oracle,
                                       MutationStats* stats) {
  if (!(plan.ratio >= 0.0 && plan.ratio <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "mutation ratio must lie in [0, 1]");
  }
  std::vector<size_t> passing;
  for (size_t i = 0; i < records.size(); ++i) {
    if (records[i].pass1 == 1) passing.push_back(i);
  }
  const size_t count = static_cast<size_t>(
      std::ceil(plan.ratio * static_cast<double>(passing.size()) - 1e-9));
  Rng rng(MixSeed(plan.seed, 0x636f));
  std::vector<size_t> chosen;
  for (size_t k : rng.Sample(passing.size(), count)) chosen.push_back(passing[k]);

  MutationStats local;
  local.selected = chosen.size();
  std::vector<CorpusRecord> out = records;
  for (size_t index : chosen) {
    CorpusRecord& record = out[index];
    if (!record.tests || record.tests->empty()) {
      throw Error(ErrorCode::kMissingTests, "record " + record.id + " has no tests");
    }
    const SourceUnit original = record.PredictionUnit();
    bool any_mutant = false;
    bool killed = false;
    for (int attempt = 0; attempt <= plan.max_redraws && !killed; ++attempt) {
      auto mutant = MutateUnit(original, plan.classes,
                               MixSeed(plan.seed, MixSeed(index, attempt)));
      if (!mutant) break;
      any_mutant = true;
      if (!oracle(record, *mutant)) {
        record.prediction = mutant->text();
        record.pass1 = 0;
        killed = true;
      }
    }
    if (killed) {
      ++local.killed;
    } else if (any_mutant) {
      local.equivalent.push_back(record.id);
    } else {
      local.unmutable.push_back(record.id);
    }
  }
  if (stats) *stats = std::move(local);
  return out;
}

}  // namespace synth_eval
