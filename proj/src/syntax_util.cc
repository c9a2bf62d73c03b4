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

#include "syntax_util.h"

namespace synth_eval::internal {

std::string LineIndent(std::string_view text, uint32_t offset) {
  const size_t newline = text.substr(0, offset).rfind('\n');
  const size_t line_start = newline == std::string_view::npos ? 0 : newline + 1;
  size_t end = line_start;
  while (end < text.size() && (text[end] == ' ' || text[end] == '\t')) ++end;
  return std::string(text.substr(line_start, end - line_start));
}

uint32_t ColumnOf(std::string_view text, uint32_t offset) {
  uint32_t col = 0;
  while (col < offset && text[offset - col - 1] != '\n') ++col;
  return col;
}

bool HasNewlineBetween(std::string_view text, uint32_t begin, uint32_t end) {
  return text.substr(begin, end - begin).find('\n') != std::string_view::npos;
}

std::vector<NodeId> Descendants(const SyntaxTree& tree, NodeId id) {
  const NodeId last = tree.SubtreeEnd(id);
  std::vector<NodeId> out;
  out.reserve(last - id + 1);
  for (NodeId cur = id; cur <= last; ++cur) out.push_back(cur);
  return out;
}

bool SameTokens(const SourceUnit& unit, NodeId a, NodeId b) {
  const SyntaxTree& tree = unit.tree();
  std::vector<std::string_view> left;
  std::vector<std::string_view> right;
  for (NodeId id : Descendants(tree, a)) {
    if (tree[id].is_leaf() && !tree[id].span.empty()) left.push_back(unit.TextOf(id));
  }
  for (NodeId id : Descendants(tree, b)) {
    if (tree[id].is_leaf() && !tree[id].span.empty()) right.push_back(unit.TextOf(id));
  }
  return left == right;
}

bool ContainsKind(const SyntaxTree& tree, NodeId id,
                  std::initializer_list<std::string_view> kinds) {
  for (NodeId cur : Descendants(tree, id)) {
    if (IsOneOf(tree[cur].kind, kinds)) return true;
  }
  return false;
}

NodeId EnclosingScope(const SourceUnit& unit, NodeId id) {
  const SyntaxTree& tree = unit.tree();
  for (NodeId cur = tree[id].parent; cur != kNoNode; cur = tree[cur].parent) {
    if (IsOneOf(tree[cur].kind, {"function_definition", "method_declaration",
                                 "constructor_declaration", "lambda"})) {
      return cur;
    }
  }
  return tree.root();
}

NodeId OperatorChild(const SyntaxTree& tree, NodeId id, std::string_view field) {
  for (NodeId child : tree[id].children) {
    if (tree[child].field == field && !tree[child].named) return child;
  }
  return kNoNode;
}

NodeId SoleNamedChild(const SyntaxTree& tree, NodeId id) {
  NodeId found = kNoNode;
  for (NodeId child : tree[id].children) {
    if (!tree[child].named || IsCommentKind(tree[child].kind)) continue;
    if (found != kNoNode) return kNoNode;
    found = child;
  }
  return found;
}

}  // namespace synth_eval::internal
