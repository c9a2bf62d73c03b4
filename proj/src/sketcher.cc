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

#include "synth_eval/sketcher.h"

#include <set>
#include <string_view>

#include "synth_eval/error.h"
#include "synth_eval/random.h"

namespace synth_eval {
namespace {

bool IsOneOf(std::string_view kind, std::initializer_list<std::string_view> kinds) {
  for (std::string_view k : kinds) {
    if (kind == k) return true;
  }
  return false;
}

// Climbs through destructuring patterns and reports whether the identifier
// ends up as an assignment/loop target.
bool IsPythonTarget(const SyntaxTree& tree, NodeId id) {
  NodeId cur = id;
  while (tree[cur].parent != kNoNode &&
         IsOneOf(tree[tree[cur].parent].kind,
                 {"pattern_list", "tuple_pattern", "list_pattern",
                  "list_splat_pattern"})) {
    cur = tree[cur].parent;
  }
  const NodeId parent = tree[cur].parent;
  if (parent == kNoNode || tree[cur].field != "left") return false;
  return IsOneOf(tree[parent].kind, {"assignment", "augmented_assignment",
                                     "for_statement", "for_in_clause"});
}

IdentifierClass ClassifyPython(const SyntaxTree& tree, NodeId id) {
  const SyntaxNode& node = tree[id];
  if (node.parent == kNoNode) return IdentifierClass::kOther;
  const SyntaxNode& parent = tree[node.parent];
  const NodeId grand_id = parent.parent;
  const std::string_view grand =
      grand_id == kNoNode ? std::string_view() : tree[grand_id].kind;

  if (parent.kind == "function_definition" && node.field == "name") {
    return IdentifierClass::kFunctionName;
  }
  if (IsOneOf(parent.kind, {"parameters", "lambda_parameters"})) {
    return IdentifierClass::kParameter;
  }
  if (IsOneOf(parent.kind, {"default_parameter", "typed_default_parameter"}) &&
      node.field == "name") {
    return IdentifierClass::kParameter;
  }
  if (parent.kind == "typed_parameter" && node.field.empty()) {
    return IdentifierClass::kParameter;
  }
  if (IsOneOf(parent.kind, {"list_splat_pattern", "dictionary_splat_pattern"}) &&
      IsOneOf(grand, {"parameters", "lambda_parameters", "typed_parameter"})) {
    return IdentifierClass::kParameter;
  }
  if (IsPythonTarget(tree, id)) return IdentifierClass::kLocalVariable;
  if (parent.kind == "named_expression" && node.field == "name") {
    return IdentifierClass::kLocalVariable;
  }
  if (parent.kind == "as_pattern_target" ||
      (parent.kind == "as_pattern" && node.field == "alias")) {
    return IdentifierClass::kLocalVariable;
  }
  return IdentifierClass::kOther;
}

IdentifierClass ClassifyJava(const SyntaxTree& tree, NodeId id) {
  const SyntaxNode& node = tree[id];
  if (node.parent == kNoNode) return IdentifierClass::kOther;
  const SyntaxNode& parent = tree[node.parent];
  const std::string_view grand =
      parent.parent == kNoNode ? std::string_view() : tree[parent.parent].kind;

  if (parent.kind == "method_declaration" && node.field == "name") {
    return IdentifierClass::kFunctionName;
  }
  if (IsOneOf(parent.kind, {"formal_parameter", "catch_formal_parameter"}) &&
      node.field == "name") {
    return IdentifierClass::kParameter;
  }
  if (parent.kind == "inferred_parameters" ||
      (parent.kind == "lambda_expression" && node.field == "parameters")) {
    return IdentifierClass::kParameter;
  }
  if (parent.kind == "variable_declarator" && node.field == "name") {
    if (grand == "spread_parameter") return IdentifierClass::kParameter;
    if (grand == "local_variable_declaration") {
      return IdentifierClass::kLocalVariable;
    }
    return IdentifierClass::kOther;  // fields
  }
  if (IsOneOf(parent.kind, {"enhanced_for_statement", "resource"}) &&
      node.field == "name") {
    return IdentifierClass::kLocalVariable;
  }
  return IdentifierClass::kOther;
}

bool UnderKind(const SyntaxTree& tree, NodeId id,
               std::initializer_list<std::string_view> kinds) {
  for (NodeId cur = tree[id].parent; cur != kNoNode; cur = tree[cur].parent) {
    if (IsOneOf(tree[cur].kind, kinds)) return true;
  }
  return false;
}

// Name -> class, with function > parameter > local priority when a name is
// defined in several roles.
std::map<std::string, IdentifierClass> DefinedNames(const SourceUnit& unit) {
  const SyntaxTree& tree = unit.tree();
  std::map<std::string, IdentifierClass> defined;
  for (NodeId id = 0; id < tree.size(); ++id) {
    if (tree[id].kind != "identifier") continue;
    const IdentifierClass cls = ClassifyDefinition(unit, id);
    if (cls == IdentifierClass::kOther) continue;
    auto [it, inserted] = defined.emplace(std::string(unit.TextOf(id)), cls);
    if (!inserted && static_cast<int>(cls) < static_cast<int>(it->second)) {
      it->second = cls;
    }
  }
  return defined;
}

bool IsRenamablePosition(const SourceUnit& unit, NodeId id,
                         const std::map<std::string, IdentifierClass>& defined) {
  const SyntaxTree& tree = unit.tree();
  const SyntaxNode& node = tree[id];
  const SyntaxNode& parent = tree[node.parent];
  auto is_function = [&](NodeId name_node) {
    auto it = defined.find(std::string(unit.TextOf(name_node)));
    return it != defined.end() && it->second == IdentifierClass::kFunctionName;
  };

  if (unit.language() == Language::kPython) {
    if (parent.kind == "attribute" && node.field == "attribute") return false;
    if (parent.kind == "keyword_argument" && node.field == "name") {
      // Only calls to functions defined in this unit have renamed parameters.
      NodeId call = tree.AncestorOfKind(id, "call");
      if (call == kNoNode) return false;
      NodeId fn = tree.ChildByField(call, "function");
      return fn != kNoNode && tree[fn].kind == "identifier" && is_function(fn);
    }
    if (UnderKind(tree, id, {"import_statement", "import_from_statement",
                             "future_import_statement"})) {
      return false;
    }
    return true;
  }

  if (parent.kind == "field_access" && node.field == "field") return false;
  if (parent.kind == "method_invocation" && node.field == "name") {
    if (tree.ChildByField(node.parent, "object") != kNoNode) return false;
    return is_function(id);
  }
  if (parent.kind == "method_reference") return false;
  if (UnderKind(tree, id, {"import_declaration", "package_declaration"})) {
    return false;
  }
  if (IsOneOf(parent.kind, {"class_declaration", "interface_declaration",
                            "enum_declaration", "constructor_declaration",
                            "labeled_statement", "break_statement",
                            "continue_statement"})) {
    return false;
  }
  return true;
}

}  // namespace

void SketchMap::Add(std::string original, std::string placeholder,
                    IdentifierClass cls) {
  if (index_.count(original) != 0) return;
  switch (cls) {
    case IdentifierClass::kFunctionName: ++functions_; break;
    case IdentifierClass::kParameter: ++parameters_; break;
    case IdentifierClass::kLocalVariable: ++variables_; break;
    case IdentifierClass::kOther: break;
  }
  index_.emplace(original, std::make_pair(entries_.size(), cls));
  entries_.emplace_back(std::move(original), std::move(placeholder));
}

const std::string* SketchMap::Find(const std::string& original) const {
  auto it = index_.find(original);
  return it == index_.end() ? nullptr : &entries_[it->second.first].second;
}

IdentifierClass SketchMap::ClassOf(const std::string& original) const {
  auto it = index_.find(original);
  return it == index_.end() ? IdentifierClass::kOther : it->second.second;
}

IdentifierClass ClassifyDefinition(const SourceUnit& unit, NodeId id) {
  const SyntaxTree& tree = unit.tree();
  if (tree[id].kind != "identifier") return IdentifierClass::kOther;
  return unit.language() == Language::kPython ? ClassifyPython(tree, id)
                                              : ClassifyJava(tree, id);
}

std::vector<NodeId> UserIdentifierOccurrences(const SourceUnit& unit) {
  const SyntaxTree& tree = unit.tree();
  const auto defined = DefinedNames(unit);
  std::vector<NodeId> out;
  for (NodeId id = 0; id < tree.size(); ++id) {
    if (tree[id].kind != "identifier" || tree[id].parent == kNoNode) continue;
    if (defined.count(std::string(unit.TextOf(id))) == 0) continue;
    if (IsRenamablePosition(unit, id, defined)) out.push_back(id);
  }
  return out;
}

std::vector<std::pair<std::string, IdentifierClass>> UserIdentifiers(
    const SourceUnit& unit) {
  const auto defined = DefinedNames(unit);
  std::vector<std::pair<std::string, IdentifierClass>> out;
  std::set<std::string> seen;
  for (NodeId id : UserIdentifierOccurrences(unit)) {
    std::string name(unit.TextOf(id));
    if (seen.insert(name).second) out.emplace_back(name, defined.at(name));
  }
  return out;
}

SourceUnit RenameIdentifiers(const SourceUnit& unit,
                             const std::map<std::string, std::string>& renaming) {
  std::vector<Rewrite> rewrites;
  for (NodeId id : UserIdentifierOccurrences(unit)) {
    auto it = renaming.find(std::string(unit.TextOf(id)));
    if (it == renaming.end() || it->second == it->first) continue;
    rewrites.push_back({unit.tree()[id].span, it->second});
  }
  return ApplyRewrites(unit, std::move(rewrites));
}

SketchResult Sketch(const SourceUnit& unit) {
  if (unit.has_error()) {
    throw Error(ErrorCode::kParseErrorInput,
                "cannot sketch code that does not parse");
  }
  SketchMap map;
  int params = 0;
  int vars = 0;
  for (const auto& [name, cls] : UserIdentifiers(unit)) {
    switch (cls) {
      case IdentifierClass::kFunctionName:
        map.Add(name, "f", cls);
        break;
      case IdentifierClass::kParameter:
        map.Add(name, "arg_" + std::to_string(params++), cls);
        break;
      case IdentifierClass::kLocalVariable:
        map.Add(name, "var_" + std::to_string(vars++), cls);
        break;
      case IdentifierClass::kOther:
        break;
    }
  }
  std::map<std::string, std::string> renaming(map.entries().begin(),
                                              map.entries().end());
  return {RenameIdentifiers(unit, renaming), std::move(map)};
}

std::map<std::string, std::string> RandomRenaming(const SourceUnit& unit,
                                                  uint64_t seed) {
  static constexpr std::string_view kAlphabet =
      "abcdefghijklmnopqrstuvwxyz0123456789";
  std::set<std::string> taken;
  const SyntaxTree& tree = unit.tree();
  for (NodeId id = 0; id < tree.size(); ++id) {
    if (tree[id].is_leaf()) taken.emplace(unit.TextOf(id));
  }
  Rng rng(MixSeed(seed, 0x5e7c4));
  std::map<std::string, std::string> renaming;
  for (const auto& [name, cls] : UserIdentifiers(unit)) {
    std::string fresh;
    do {
      fresh = "u_";
      const size_t len = 1 + rng.Index(8);
      for (size_t i = 0; i < len; ++i) fresh += kAlphabet[rng.Index(26 + (i > 0) * 10)];
    } while (!taken.insert(fresh).second);
    renaming.emplace(name, fresh);
  }
  return renaming;
}

}  // namespace synth_eval
