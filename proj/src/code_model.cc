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

#include "synth_eval/code_model.h"

#include <algorithm>
#include <cctype>

#include <tree_sitter/api.h>

#include "synth_eval/error.h"

extern "C" {
const TSLanguage* tree_sitter_python(void);
const TSLanguage* tree_sitter_java(void);
}

namespace synth_eval {
namespace {

struct ParserDeleter {
  void operator()(TSParser* p) const { ts_parser_delete(p); }
};
struct TreeDeleter {
  void operator()(TSTree* t) const { ts_tree_delete(t); }
};
using ParserPtr = std::unique_ptr<TSParser, ParserDeleter>;
using TreePtr = std::unique_ptr<TSTree, TreeDeleter>;

const TSLanguage* GrammarFor(Language lang) {
  return lang == Language::kJava ? tree_sitter_java() : tree_sitter_python();
}

// One parser per thread and language; tree-sitter parsers are not reentrant
// but separate instances are.
TSParser* ThreadParser(Language lang) {
  thread_local ParserPtr parsers[2];
  ParserPtr& slot = parsers[lang == Language::kJava ? 0 : 1];
  if (!slot) {
    ParserPtr parser(ts_parser_new());
    if (!parser || !ts_parser_set_language(parser.get(), GrammarFor(lang))) {
      throw Error(ErrorCode::kInternalGrammarFailure,
                  std::string("cannot load grammar for ") +
                      std::string(LanguageName(lang)));
    }
    slot = std::move(parser);
  }
  return slot.get();
}

}  // namespace

std::string_view LanguageName(Language lang) {
  return lang == Language::kJava ? "java" : "python";
}

Language ParseLanguage(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "java") return Language::kJava;
  if (lower == "python" || lower == "py") return Language::kPython;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown language '" + std::string(name) + "'");
}

NodeId SyntaxTree::ChildByField(NodeId id, std::string_view field) const {
  for (NodeId child : nodes_[id].children) {
    if (nodes_[child].field == field) return child;
  }
  return kNoNode;
}

std::vector<NodeId> SyntaxTree::NamedChildren(NodeId id) const {
  std::vector<NodeId> out;
  for (NodeId child : nodes_[id].children) {
    if (nodes_[child].named) out.push_back(child);
  }
  return out;
}

NodeId SyntaxTree::AncestorOfKind(NodeId id, std::string_view kind) const {
  for (NodeId cur = nodes_[id].parent; cur != kNoNode;
       cur = nodes_[cur].parent) {
    if (nodes_[cur].kind == kind) return cur;
  }
  return kNoNode;
}

NodeId SyntaxTree::FindNode(ByteSpan span, std::string_view kind) const {
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    if (nodes_[id].span == span && nodes_[id].kind == kind) return id;
  }
  return kNoNode;
}

NodeId SyntaxTree::SubtreeEnd(NodeId id) const {
  while (!nodes_[id].children.empty()) id = nodes_[id].children.back();
  return id;
}

SyntaxTree Parse(Language lang, std::string_view text) {
  TSParser* parser = ThreadParser(lang);
  TreePtr ts_tree(ts_parser_parse_string(
      parser, nullptr, text.data(), static_cast<uint32_t>(text.size())));
  if (!ts_tree) {
    throw Error(ErrorCode::kInternalGrammarFailure, "parser returned no tree");
  }
  TSNode root = ts_tree_root_node(ts_tree.get());

  std::vector<SyntaxNode> nodes;
  TSTreeCursor cursor = ts_tree_cursor_new(root);
  std::vector<NodeId> stack;  // ancestors of the cursor position
  for (;;) {
    TSNode current = ts_tree_cursor_current_node(&cursor);
    SyntaxNode node;
    node.kind = ts_node_type(current);
    const char* field = ts_tree_cursor_current_field_name(&cursor);
    node.field = field ? std::string_view(field) : std::string_view();
    node.span = {ts_node_start_byte(current), ts_node_end_byte(current)};
    node.named = ts_node_is_named(current);
    node.error = ts_node_is_error(current);
    node.missing = ts_node_is_missing(current);
    node.parent = stack.empty() ? kNoNode : stack.back();
    const auto id = static_cast<NodeId>(nodes.size());
    if (node.parent != kNoNode) nodes[node.parent].children.push_back(id);
    nodes.push_back(std::move(node));

    if (ts_tree_cursor_goto_first_child(&cursor)) {
      stack.push_back(id);
      continue;
    }
    bool advanced = false;
    while (!advanced) {
      if (ts_tree_cursor_goto_next_sibling(&cursor)) {
        advanced = true;
      } else if (ts_tree_cursor_goto_parent(&cursor)) {
        stack.pop_back();
      } else {
        break;
      }
    }
    if (!advanced) break;
  }
  ts_tree_cursor_delete(&cursor);
  return SyntaxTree(std::move(nodes), ts_node_has_error(root));
}

SourceUnit::SourceUnit(Language lang, std::string text)
    : lang_(lang), text_(std::move(text)), lazy_(std::make_shared<LazyTree>()) {}

const SyntaxTree& SourceUnit::tree() const {
  std::call_once(lazy_->once, [this] {
    lazy_->tree = std::make_unique<SyntaxTree>(Parse(lang_, text_));
  });
  return *lazy_->tree;
}

std::string_view SourceUnit::TextOf(NodeId id) const {
  return TextOf(tree()[id].span);
}

std::string_view SourceUnit::TextOf(ByteSpan span) const {
  return std::string_view(text_).substr(span.begin, span.size());
}

std::string ApplyRewrites(std::string_view text, std::vector<Rewrite> rewrites) {
  std::sort(rewrites.begin(), rewrites.end(),
            [](const Rewrite& a, const Rewrite& b) {
              return a.span.begin != b.span.begin ? a.span.begin < b.span.begin
                                                  : a.span.end < b.span.end;
            });
  for (size_t i = 0; i < rewrites.size(); ++i) {
    const ByteSpan& span = rewrites[i].span;
    if (span.begin > span.end || span.end > text.size()) {
      throw Error(ErrorCode::kSpanOutOfBounds,
                  "rewrite span [" + std::to_string(span.begin) + ", " +
                      std::to_string(span.end) + ") outside text of length " +
                      std::to_string(text.size()));
    }
    if (i > 0) {
      const ByteSpan& prev = rewrites[i - 1].span;
      // Two edits anchored at the same offset have no defined order.
      if (span.begin < prev.end || span.begin == prev.begin) {
        throw Error(ErrorCode::kOverlappingRewrites,
                    "rewrites at offsets " + std::to_string(prev.begin) +
                        " and " + std::to_string(span.begin) + " overlap");
      }
    }
  }
  std::string out(text);
  for (auto it = rewrites.rbegin(); it != rewrites.rend(); ++it) {
    out.replace(it->span.begin, it->span.size(), it->replacement);
  }
  return out;
}

SourceUnit ApplyRewrites(const SourceUnit& unit, std::vector<Rewrite> rewrites) {
  if (rewrites.empty()) return unit;
  return SourceUnit(unit.language(),
                    ApplyRewrites(unit.text(), std::move(rewrites)));
}

bool IsCommentKind(std::string_view kind) {
  return kind == "comment" || kind == "line_comment" ||
         kind == "block_comment";
}

std::vector<NodeId> TokenLeaves(const SourceUnit& unit) {
  const SyntaxTree& tree = unit.tree();
  std::vector<NodeId> out;
  for (NodeId id = 0; id < tree.size(); ++id) {
    const SyntaxNode& node = tree[id];
    if (!node.is_leaf() || node.span.empty() || IsCommentKind(node.kind)) {
      continue;
    }
    if (id == tree.root()) continue;  // empty program or bare ERROR root
    out.push_back(id);
  }
  return out;
}

std::vector<std::string> Tokenize(const SourceUnit& unit) {
  std::vector<std::string> out;
  for (NodeId id : TokenLeaves(unit)) out.emplace_back(unit.TextOf(id));
  return out;
}

}  // namespace synth_eval
