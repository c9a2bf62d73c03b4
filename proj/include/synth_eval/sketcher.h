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

#ifndef SYNTH_EVAL_SKETCHER_H_
#define SYNTH_EVAL_SKETCHER_H_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "synth_eval/code_model.h"

namespace synth_eval {

enum class IdentifierClass { kFunctionName, kParameter, kLocalVariable, kOther };

// Original identifier -> canonical placeholder ("f", "arg_k", "var_k").
// Entries keep first-occurrence order.
class SketchMap {
 public:
  void Add(std::string original, std::string placeholder, IdentifierClass cls);

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }
  // Placeholder for `original`, or nullptr when it is not a user identifier.
  const std::string* Find(const std::string& original) const;
  IdentifierClass ClassOf(const std::string& original) const;
  int parameter_count() const { return parameters_; }
  int variable_count() const { return variables_; }
  int function_count() const { return functions_; }

  friend bool operator==(const SketchMap& a, const SketchMap& b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::map<std::string, std::pair<size_t, IdentifierClass>> index_;
  int parameters_ = 0;
  int variables_ = 0;
  int functions_ = 0;
};

struct SketchResult {
  SourceUnit unit;
  SketchMap map;
};

// Definition-site class of an identifier leaf; kOther for uses and for
// names the sketcher never touches.
IdentifierClass ClassifyDefinition(const SourceUnit& unit, NodeId id);

// Identifier leaves that denote user-defined names: every occurrence (use or
// definition) of a name defined as function, parameter or local variable,
// minus attribute/member names, keyword-argument names of foreign calls and
// import paths. Sorted by offset.
std::vector<NodeId> UserIdentifierOccurrences(const SourceUnit& unit);

// User-defined names with their class, in first-occurrence order.
std::vector<std::pair<std::string, IdentifierClass>> UserIdentifiers(
    const SourceUnit& unit);

// Replaces function names with "f", parameters with arg_k and local
// variables with var_k. Parameters are numbered first, each group in order
// of first textual occurrence. Throws kParseErrorInput on malformed input.
SketchResult Sketch(const SourceUnit& unit);

// Consistently renames user identifiers according to `renaming`; names not
// present in the map are left alone.
SourceUnit RenameIdentifiers(const SourceUnit& unit,
                             const std::map<std::string, std::string>& renaming);

// A seeded, injective renaming of every user identifier to fresh names that
// cannot collide with keywords or existing identifiers.
std::map<std::string, std::string> RandomRenaming(const SourceUnit& unit,
                                                  uint64_t seed);

}  // namespace synth_eval

#endif  // SYNTH_EVAL_SKETCHER_H_
