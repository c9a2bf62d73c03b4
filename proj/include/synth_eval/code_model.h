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

#ifndef SYNTH_EVAL_CODE_MODEL_H_
#define SYNTH_EVAL_CODE_MODEL_H_

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace synth_eval {

enum class Language { kJava, kPython };

std::string_view LanguageName(Language lang);
// Accepts "java" / "python" (case-insensitive); throws kInvalidArgument.
Language ParseLanguage(std::string_view name);

struct ByteSpan {
  uint32_t begin = 0;
  uint32_t end = 0;

  uint32_t size() const { return end - begin; }
  bool empty() const { return begin == end; }
  bool Contains(const ByteSpan& other) const {
    return begin <= other.begin && other.end <= end;
  }
  bool Overlaps(const ByteSpan& other) const {
    return begin < other.end && other.begin < end;
  }
  friend bool operator==(const ByteSpan&, const ByteSpan&) = default;
};

using NodeId = uint32_t;
inline constexpr NodeId kNoNode = UINT32_MAX;

struct SyntaxNode {
  // Grammar symbol; points into the grammar's static symbol table.
  std::string_view kind;
  // Field name under the parent ("" when the grammar names none).
  std::string_view field;
  ByteSpan span;
  bool named = false;
  bool error = false;    // ERROR node
  bool missing = false;  // zero-width node inserted by error recovery
  NodeId parent = kNoNode;
  std::vector<NodeId> children;

  bool is_leaf() const { return children.empty(); }
};

// Immutable copy of a tree-sitter parse. Node 0 is the root; ids follow
// pre-order, so ids increase with start offset.
class SyntaxTree {
 public:
  SyntaxTree() = default;
  SyntaxTree(std::vector<SyntaxNode> nodes, bool has_error)
      : nodes_(std::move(nodes)), has_error_(has_error) {}

  const SyntaxNode& node(NodeId id) const { return nodes_.at(id); }
  const SyntaxNode& operator[](NodeId id) const { return nodes_[id]; }
  NodeId root() const { return 0; }
  size_t size() const { return nodes_.size(); }
  bool has_error() const { return has_error_; }
  std::span<const SyntaxNode> nodes() const { return nodes_; }

  // First child carrying the given field name, or kNoNode.
  NodeId ChildByField(NodeId id, std::string_view field) const;
  // Named children only.
  std::vector<NodeId> NamedChildren(NodeId id) const;
  // Nearest ancestor (excluding id) of the given kind, or kNoNode.
  NodeId AncestorOfKind(NodeId id, std::string_view kind) const;
  // Node whose span equals `span` and whose kind matches, or kNoNode.
  NodeId FindNode(ByteSpan span, std::string_view kind) const;
  // Last node id in the subtree rooted at id (pre-order).
  NodeId SubtreeEnd(NodeId id) const;

 private:
  std::vector<SyntaxNode> nodes_;
  bool has_error_ = false;
};

// A snippet tagged with its language. The syntax tree is parsed on first
// access and shared between copies.
class SourceUnit {
 public:
  SourceUnit(Language lang, std::string text);

  Language language() const { return lang_; }
  const std::string& text() const { return text_; }
  const SyntaxTree& tree() const;
  bool has_error() const { return tree().has_error(); }

  std::string_view TextOf(NodeId id) const;
  std::string_view TextOf(ByteSpan span) const;

  friend bool operator==(const SourceUnit& a, const SourceUnit& b) {
    return a.lang_ == b.lang_ && a.text_ == b.text_;
  }

 private:
  struct LazyTree {
    std::once_flag once;
    std::unique_ptr<SyntaxTree> tree;
  };

  Language lang_;
  std::string text_;
  std::shared_ptr<LazyTree> lazy_;
};

// Parses text with the vendored grammar for `lang`. Never throws on bad
// input; malformed code yields has_error() == true.
SyntaxTree Parse(Language lang, std::string_view text);

struct Rewrite {
  ByteSpan span;
  std::string replacement;
};

// Applies a batch of non-overlapping rewrites (spans refer to the original
// text). Throws kOverlappingRewrites / kSpanOutOfBounds.
SourceUnit ApplyRewrites(const SourceUnit& unit, std::vector<Rewrite> rewrites);
std::string ApplyRewrites(std::string_view text, std::vector<Rewrite> rewrites);

// Leaf tokens in textual order. Comments and zero-width (missing) leaves are
// skipped; leaf text never includes surrounding whitespace.
std::vector<std::string> Tokenize(const SourceUnit& unit);

// Ids of the leaves Tokenize() would emit, in the same order.
std::vector<NodeId> TokenLeaves(const SourceUnit& unit);

bool IsCommentKind(std::string_view kind);

}  // namespace synth_eval

#endif  // SYNTH_EVAL_CODE_MODEL_H_
