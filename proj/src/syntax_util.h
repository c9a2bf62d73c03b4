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

// Tree helpers shared by the rewriting modules.

#ifndef SYNTH_EVAL_SRC_SYNTAX_UTIL_H_
#define SYNTH_EVAL_SRC_SYNTAX_UTIL_H_

#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "synth_eval/code_model.h"

namespace synth_eval::internal {

inline bool IsOneOf(std::string_view kind,
                    std::initializer_list<std::string_view> kinds) {
  for (std::string_view k : kinds) {
    if (kind == k) return true;
  }
  return false;
}

// Leading whitespace of the line containing `offset`.
std::string LineIndent(std::string_view text, uint32_t offset);

// Bytes between the start of the line and `offset`.
uint32_t ColumnOf(std::string_view text, uint32_t offset);

bool HasNewlineBetween(std::string_view text, uint32_t begin, uint32_t end);

// Token-wise equality of two subtrees (ignores layout).
bool SameTokens(const SourceUnit& unit, NodeId a, NodeId b);

// Subtree ids in pre-order, root included.
std::vector<NodeId> Descendants(const SyntaxTree& tree, NodeId id);

bool ContainsKind(const SyntaxTree& tree, NodeId id,
                  std::initializer_list<std::string_view> kinds);

// Nearest enclosing function (or the root).
NodeId EnclosingScope(const SourceUnit& unit, NodeId id);

// The unnamed operator child carrying `field`, or kNoNode.
NodeId OperatorChild(const SyntaxTree& tree, NodeId id, std::string_view field);

// Only named child, or kNoNode when there are zero or several.
NodeId SoleNamedChild(const SyntaxTree& tree, NodeId id);

}  // namespace synth_eval::internal

#endif  // SYNTH_EVAL_SRC_SYNTAX_UTIL_H_
