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

#include "synth_eval/transformer.h"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <map>
#include <string>

#include "synth_eval/error.h"
#include "synth_eval/random.h"
#include "synth_eval/sketcher.h"
#include "syntax_util.h"

namespace synth_eval {
namespace {

using internal::ContainsKind;
using internal::Descendants;
using internal::EnclosingScope;
using internal::HasNewlineBetween;
using internal::IsOneOf;
using internal::LineIndent;
using internal::OperatorChild;
using internal::SameTokens;
using internal::SoleNamedChild;

struct Plan {
  Direction direction;
  std::vector<Rewrite> rewrites;
};

std::string Text(const SourceUnit& unit, NodeId id) {
  return std::string(unit.TextOf(id));
}

// ---------------------------------------------------------------------------
// Shared predicates

const std::map<std::string_view, std::string_view>& CompoundToBinary(Language lang) {
  static const std::map<std::string_view, std::string_view> python = {
      {"+=", "+"}, {"-=", "-"}, {"*=", "*"},   {"/=", "/"},
      {"%=", "%"}, {"**=", "**"}, {"<<=", "<<"}, {">>=", ">>"}};
  static const std::map<std::string_view, std::string_view> java = {
      {"+=", "+"},   {"-=", "-"},   {"*=", "*"},   {"/=", "/"},
      {"%=", "%"},   {"<<=", "<<"}, {">>=", ">>"}, {">>>=", ">>>"}};
  return lang == Language::kJava ? java : python;
}

std::optional<std::string_view> BinaryToCompound(Language lang, std::string_view op) {
  for (const auto& [compound, binary] : CompoundToBinary(lang)) {
    if (binary == op) return compound;
  }
  return std::nullopt;
}

// Operand kinds that bind at least as tightly as any binary operator.
bool IsAtomic(const SourceUnit& unit, NodeId id) {
  const std::string_view kind = unit.tree()[id].kind;
  if (unit.language() == Language::kPython) {
    return IsOneOf(kind, {"identifier", "integer", "float", "string",
                          "concatenated_string", "true", "false", "none",
                          "attribute", "subscript", "call",
                          "parenthesized_expression", "list", "tuple",
                          "dictionary", "set", "list_comprehension",
                          "dictionary_comprehension", "set_comprehension",
                          "generator_expression", "unary_operator"});
  }
  return kind.ends_with("_literal") ||
         IsOneOf(kind, {"identifier", "true", "false", "this", "field_access",
                        "array_access", "method_invocation",
                        "parenthesized_expression", "object_creation_expression",
                        "array_creation_expression", "unary_expression",
                        "update_expression", "cast_expression"});
}

// Side-effect-free index/selector expression.
bool IsPlainExpression(const SourceUnit& unit, NodeId id) {
  for (NodeId cur : Descendants(unit.tree(), id)) {
    const SyntaxNode& node = unit.tree()[cur];
    if (!node.named) continue;
    const std::string_view kind = node.kind;
    if (!(kind.ends_with("_literal") ||
          IsOneOf(kind, {"identifier", "integer", "binary_operator",
                         "binary_expression", "unary_operator",
                         "parenthesized_expression", "this"}))) {
      return false;
    }
  }
  return true;
}

// Assignable expression that can be evaluated twice without side effects.
bool IsSimpleTarget(const SourceUnit& unit, NodeId id) {
  const SyntaxTree& tree = unit.tree();
  const std::string_view kind = tree[id].kind;
  if (kind == "identifier") return true;
  if (kind == "attribute") {
    return IsSimpleTarget(unit, tree.ChildByField(id, "object"));
  }
  if (kind == "field_access") {
    const NodeId object = tree.ChildByField(id, "object");
    return tree[object].kind == "this" || IsSimpleTarget(unit, object);
  }
  if (kind == "subscript") {
    const NodeId index = tree.ChildByField(id, "subscript");
    return IsSimpleTarget(unit, tree.ChildByField(id, "value")) &&
           index != kNoNode && IsPlainExpression(unit, index);
  }
  if (kind == "array_access") {
    return IsSimpleTarget(unit, tree.ChildByField(id, "array")) &&
           IsPlainExpression(unit, tree.ChildByField(id, "index"));
  }
  return false;
}

// Java declared type of `name` anywhere in the unit ("" when unknown).
std::string JavaDeclaredType(const SourceUnit& unit, std::string_view name) {
  const SyntaxTree& tree = unit.tree();
  for (NodeId id = 0; id < tree.size(); ++id) {
    const SyntaxNode& node = tree[id];
    if (node.kind != "identifier" || node.field != "name" ||
        unit.TextOf(id) != name) {
      continue;
    }
    NodeId holder = node.parent;
    if (tree[holder].kind == "variable_declarator") holder = tree[holder].parent;
    const NodeId type = tree.ChildByField(holder, "type");
    if (type != kNoNode) return Text(unit, type);
  }
  return "";
}

bool IsFloatingType(std::string_view type) {
  return IsOneOf(type, {"double", "float", "Double", "Float"});
}

// `x op= e` -> `x = x op e` silently drops Java's implicit narrowing cast.
bool JavaNarrowingRisk(const SourceUnit& unit, NodeId left, NodeId right) {
  if (unit.tree()[left].kind != "identifier") return false;
  const std::string type = JavaDeclaredType(unit, unit.TextOf(left));
  if (IsOneOf(type, {"byte", "short", "char"})) return true;
  if (!IsOneOf(type, {"int", "long"})) return false;
  const SyntaxTree& tree = unit.tree();
  for (NodeId cur : Descendants(tree, right)) {
    const std::string_view kind = tree[cur].kind;
    if (kind == "decimal_floating_point_literal" || kind == "method_invocation") {
      return true;
    }
    if (kind == "identifier" &&
        IsFloatingType(JavaDeclaredType(unit, unit.TextOf(cur)))) {
      return true;
    }
  }
  return false;
}

// Calls that cannot change program state, so swapping evaluation order of
// operands containing them is harmless.
bool IsPureCall(const SourceUnit& unit, NodeId call) {
  static const std::set<std::string_view> kPythonFunctions = {
      "len", "abs", "min", "max", "int", "float", "str", "ord", "chr", "sum",
      "sorted", "round", "bool", "list", "tuple", "set", "isinstance"};
  static const std::set<std::string_view> kMethods = {
      "count", "index", "get", "lower", "upper", "strip", "startswith",
      "endswith", "isdigit", "isalpha", "keys", "values", "items", "find",
      "length", "size", "charAt", "abs", "max", "min", "isEmpty", "equals",
      "contains", "compareTo", "indexOf", "sqrt", "pow", "floor", "ceil",
      "toLowerCase", "toUpperCase", "valueOf", "parseInt", "containsKey",
      "getOrDefault", "intValue", "isDigit", "isLetter"};
  const SyntaxTree& tree = unit.tree();
  if (unit.language() == Language::kPython) {
    const NodeId fn = tree.ChildByField(call, "function");
    if (tree[fn].kind == "identifier") {
      return kPythonFunctions.count(unit.TextOf(fn)) != 0;
    }
    if (tree[fn].kind == "attribute") {
      return kMethods.count(unit.TextOf(tree.ChildByField(fn, "attribute"))) != 0;
    }
    return false;
  }
  return kMethods.count(unit.TextOf(tree.ChildByField(call, "name"))) != 0;
}

bool IsPure(const SourceUnit& unit, NodeId id) {
  const SyntaxTree& tree = unit.tree();
  for (NodeId cur : Descendants(tree, id)) {
    const std::string_view kind = tree[cur].kind;
    if (IsOneOf(kind, {"assignment", "augmented_assignment", "named_expression",
                       "await", "yield", "lambda", "assignment_expression",
                       "update_expression", "lambda_expression",
                       "object_creation_expression"})) {
      return false;
    }
    if ((kind == "call" || kind == "method_invocation") && !IsPureCall(unit, cur)) {
      return false;
    }
  }
  return true;
}

NodeId NearestLoop(const SyntaxTree& tree, NodeId id) {
  for (NodeId cur = tree[id].parent; cur != kNoNode; cur = tree[cur].parent) {
    if (IsOneOf(tree[cur].kind, {"for_statement", "while_statement",
                                 "enhanced_for_statement", "do_statement"})) {
      return cur;
    }
    if (IsOneOf(tree[cur].kind, {"function_definition", "method_declaration",
                                 "lambda", "lambda_expression"})) {
      return kNoNode;
    }
  }
  return kNoNode;
}

// A `continue` that targets `loop` would skip the moved increment.
bool HasOwnContinue(const SyntaxTree& tree, NodeId loop, NodeId body) {
  for (NodeId cur : Descendants(tree, body)) {
    if (tree[cur].kind != "continue_statement") continue;
    if (NearestLoop(tree, cur) == loop) return true;
    if (!tree[cur].children.empty() && tree.NamedChildren(cur).size() > 0) {
      return true;  // labeled continue
    }
  }
  return false;
}

bool IsAssignedIn(const SourceUnit& unit, NodeId within, std::string_view name,
                  NodeId except = kNoNode) {
  const SyntaxTree& tree = unit.tree();
  const NodeId except_end = except == kNoNode ? kNoNode : tree.SubtreeEnd(except);
  for (NodeId cur : Descendants(tree, within)) {
    if (except != kNoNode && cur >= except && cur <= except_end) continue;
    if (tree[cur].kind != "identifier" || unit.TextOf(cur) != name) continue;
    if (ClassifyDefinition(unit, cur) != IdentifierClass::kOther) return true;
    const NodeId parent = tree[cur].parent;
    if (IsOneOf(tree[parent].kind, {"update_expression"})) return true;
    if (tree[parent].kind == "assignment_expression" && tree[cur].field == "left") {
      return true;
    }
  }
  return false;
}

// Any occurrence of `name` in the enclosing scope outside `region`.
bool ReferencedOutside(const SourceUnit& unit, NodeId region, std::string_view name) {
  const SyntaxTree& tree = unit.tree();
  const NodeId scope = EnclosingScope(unit, region);
  const ByteSpan inside = tree[region].span;
  for (NodeId cur : Descendants(tree, scope)) {
    if (tree[cur].kind == "identifier" && unit.TextOf(cur) == name &&
        !inside.Contains(tree[cur].span)) {
      return true;
    }
  }
  return false;
}

// Could running `body` change the value of identifier `name`?
bool MayMutate(const SourceUnit& unit, NodeId body, std::string_view name) {
  const SyntaxTree& tree = unit.tree();
  if (IsAssignedIn(unit, body, name)) return true;
  for (NodeId cur : Descendants(tree, body)) {
    if (tree[cur].kind != "identifier" || unit.TextOf(cur) != name) continue;
    const SyntaxNode& parent = tree[tree[cur].parent];
    if (parent.kind == "attribute" || parent.kind == "argument_list") return true;
    if (parent.kind == "subscript" && tree[cur].field == "value") {
      for (NodeId up = tree[cur].parent; up != kNoNode; up = tree[up].parent) {
        if (tree[up].field == "left" || tree[up].kind == "delete_statement") {
          return true;
        }
        if (IsOneOf(tree[up].kind, {"expression_statement", "block"})) break;
      }
    }
  }
  return false;
}

// Loop bound that is re-evaluated on every iteration after a for -> while
// rewrite; it must be built from stable names and pure builtins.
bool IsStableBound(const SourceUnit& unit, NodeId bound, NodeId body,
                   std::string_view loop_var) {
  const SyntaxTree& tree = unit.tree();
  for (NodeId cur : Descendants(tree, bound)) {
    const SyntaxNode& node = tree[cur];
    if (!node.named) continue;
    if (node.kind == "call") {
      const NodeId fn = tree.ChildByField(cur, "function");
      if (tree[fn].kind != "identifier" ||
          !IsOneOf(unit.TextOf(fn), {"len", "abs", "min", "max", "int"})) {
        return false;
      }
      continue;
    }
    if (node.kind == "identifier") {
      if (node.field == "function") continue;
      if (unit.TextOf(cur) == loop_var || MayMutate(unit, body, unit.TextOf(cur))) {
        return false;
      }
      continue;
    }
    if (!IsOneOf(node.kind, {"integer", "binary_operator", "unary_operator",
                             "parenthesized_expression", "argument_list",
                             "subscript", "attribute"})) {
      return false;
    }
  }
  return true;
}

std::optional<long long> ParseIntLiteral(const SourceUnit& unit, NodeId id) {
  const SyntaxTree& tree = unit.tree();
  bool negative = false;
  if (tree[id].kind == "unary_operator") {
    const NodeId op = OperatorChild(tree, id, "operator");
    if (op == kNoNode || unit.TextOf(op) != "-") return std::nullopt;
    negative = true;
    id = tree.ChildByField(id, "argument");
  }
  if (tree[id].kind != "integer") return std::nullopt;
  const std::string_view text = unit.TextOf(id);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return negative ? -value : value;
}

NodeId ColonBefore(const SyntaxTree& tree, NodeId stmt, NodeId body) {
  NodeId colon = kNoNode;
  for (NodeId child : tree[stmt].children) {
    if (child == body) break;
    if (!tree[child].named && tree[child].kind == ":") colon = child;
  }
  return colon;
}

std::vector<NodeId> Statements(const SyntaxTree& tree, NodeId block) {
  std::vector<NodeId> out;
  for (NodeId child : tree[block].children) {
    if (tree[child].named && !IsCommentKind(tree[child].kind)) out.push_back(child);
  }
  return out;
}

bool DefinesName(const SourceUnit& unit, std::string_view name) {
  for (const auto& [defined, cls] : UserIdentifiers(unit)) {
    if (defined == name) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// ExpressionExchange

std::optional<Plan> MatchExpression(const SourceUnit& unit, NodeId id) {
  const SyntaxTree& tree = unit.tree();
  const SyntaxNode& node = tree[id];
  if (node.parent == kNoNode || tree[node.parent].kind != "expression_statement") {
    return std::nullopt;
  }
  const Language lang = unit.language();
  const bool python = lang == Language::kPython;
  const bool compound = python ? node.kind == "augmented_assignment"
                               : node.kind == "assignment_expression";
  const bool plain = python ? node.kind == "assignment"
                            : node.kind == "assignment_expression";
  if (!compound && !plain) return std::nullopt;
  const NodeId left = tree.ChildByField(id, "left");
  const NodeId right = tree.ChildByField(id, "right");
  if (left == kNoNode || right == kNoNode || !IsSimpleTarget(unit, left)) {
    return std::nullopt;
  }
  const NodeId op_node = OperatorChild(tree, id, "operator");
  const std::string_view op =
      op_node == kNoNode ? std::string_view("=") : unit.TextOf(op_node);
  const std::string target = Text(unit, left);

  if (compound && op != "=") {
    auto it = CompoundToBinary(lang).find(op);
    if (it == CompoundToBinary(lang).end()) return std::nullopt;
    if (!python && JavaNarrowingRisk(unit, left, right)) return std::nullopt;
    std::string operand = Text(unit, right);
    if (!IsAtomic(unit, right)) operand = "(" + operand + ")";
    return Plan{Direction::kForward,
                {{node.span, target + " = " + target + " " +
                                 std::string(it->second) + " " + operand}}};
  }
  if (!plain || op != "=") return std::nullopt;
  if (python && tree.ChildByField(id, "type") != kNoNode) return std::nullopt;
  const std::string_view binary_kind = python ? "binary_operator" : "binary_expression";
  if (tree[right].kind != binary_kind) return std::nullopt;
  const NodeId bin_op = OperatorChild(tree, right, "operator");
  const NodeId bin_left = tree.ChildByField(right, "left");
  const NodeId bin_right = tree.ChildByField(right, "right");
  if (bin_op == kNoNode || bin_left == kNoNode || bin_right == kNoNode) {
    return std::nullopt;
  }
  const auto compound_op = BinaryToCompound(lang, unit.TextOf(bin_op));
  if (!compound_op || !SameTokens(unit, left, bin_left)) return std::nullopt;
  std::string operand = Text(unit, bin_right);
  if (tree[bin_right].kind == "parenthesized_expression") {
    const NodeId inner = SoleNamedChild(tree, bin_right);
    if (inner != kNoNode && !IsAtomic(unit, inner)) operand = Text(unit, inner);
  }
  return Plan{Direction::kBackward,
              {{node.span, target + " " + std::string(*compound_op) + " " + operand}}};
}

// ---------------------------------------------------------------------------
// ConditionExchange

std::optional<std::string_view> MirrorComparison(std::string_view op) {
  if (op == "<") return ">";
  if (op == ">") return "<";
  if (op == "<=") return ">=";
  if (op == ">=") return "<=";
  if (op == "==" || op == "!=") return op;
  return std::nullopt;
}

int JavaPrecedence(std::string_view op) {
  if (IsOneOf(op, {"*", "/", "%"})) return 12;
  if (IsOneOf(op, {"+", "-"})) return 11;
  if (IsOneOf(op, {"<<", ">>", ">>>"})) return 10;
  if (IsOneOf(op, {"<", ">", "<=", ">=", "instanceof"})) return 9;
  if (IsOneOf(op, {"==", "!="})) return 8;
  if (op == "&") return 7;
  if (op == "^") return 6;
  if (op == "|") return 5;
  if (op == "&&") return 4;
  if (op == "||") return 3;
  return 0;
}

std::optional<Plan> MatchBooleanLiteral(const SourceUnit& unit, NodeId id) {
  const SyntaxTree& tree = unit.tree();
  const SyntaxNode& node = tree[id];
  const bool python = unit.language() == Language::kPython;
  if (node.kind == "true" || node.kind == "false") {
    if (python) {
      for (NodeId up = node.parent; up != kNoNode; up = tree[up].parent) {
        if (IsOneOf(tree[up].kind, {"case_pattern", "case_clause"})) return std::nullopt;
      }
      return Plan{Direction::kForward,
                  {{node.span, node.kind == "true" ? "(not False)" : "(not True)"}}};
    }
    return Plan{Direction::kForward,
                {{node.span, node.kind == "true" ? "!false" : "!true"}}};
  }
  if (python && node.kind == "parenthesized_expression") {
    const NodeId inner = SoleNamedChild(tree, id);
    if (inner == kNoNode || tree[inner].kind != "not_operator") return std::nullopt;
    const NodeId arg = tree.ChildByField(inner, "argument");
    if (arg == kNoNode || !IsOneOf(tree[arg].kind, {"true", "false"})) return std::nullopt;
    return Plan{Direction::kBackward,
                {{node.span, tree[arg].kind == "true" ? "False" : "True"}}};
  }
  if (!python && node.kind == "unary_expression") {
    const NodeId op = OperatorChild(tree, id, "operator");
    const NodeId arg = tree.ChildByField(id, "operand");
    if (op == kNoNode || unit.TextOf(op) != "!" || arg == kNoNode ||
        !IsOneOf(tree[arg].kind, {"true", "false"})) {
      return std::nullopt;
    }
    return Plan{Direction::kBackward,
                {{node.span, tree[arg].kind == "true" ? "false" : "true"}}};
  }
  return std::nullopt;
}

std::optional<Plan> MatchCondition(const SourceUnit& unit, NodeId id) {
  if (auto literal = MatchBooleanLiteral(unit, id)) return literal;
  const SyntaxTree& tree = unit.tree();
  const SyntaxNode& node = tree[id];
  NodeId left = kNoNode;
  NodeId right = kNoNode;
  NodeId op = kNoNode;
  if (unit.language() == Language::kPython) {
    if (node.kind != "comparison_operator") return std::nullopt;
    std::vector<NodeId> operands;
    std::vector<NodeId> operators;
    for (NodeId child : node.children) {
      if (tree[child].field == "operators") {
        operators.push_back(child);
      } else if (tree[child].named && !IsCommentKind(tree[child].kind)) {
        operands.push_back(child);
      }
    }
    if (operands.size() != 2 || operators.size() != 1) return std::nullopt;
    left = operands[0];
    right = operands[1];
    op = operators[0];
  } else {
    if (node.kind != "binary_expression") return std::nullopt;
    op = OperatorChild(tree, id, "operator");
    left = tree.ChildByField(id, "left");
    right = tree.ChildByField(id, "right");
    if (op == kNoNode || left == kNoNode || right == kNoNode) return std::nullopt;
    const int precedence = JavaPrecedence(unit.TextOf(op));
    for (NodeId operand : {left, right}) {
      const std::string_view kind = tree[operand].kind;
      if (kind == "binary_expression") {
        const NodeId inner_op = OperatorChild(tree, operand, "operator");
        if (JavaPrecedence(unit.TextOf(inner_op)) <= precedence) return std::nullopt;
      } else if (IsOneOf(kind, {"ternary_expression", "assignment_expression",
                                "lambda_expression", "instanceof_expression"})) {
        return std::nullopt;
      }
    }
  }
  const auto mirrored = MirrorComparison(unit.TextOf(op));
  if (!mirrored) return std::nullopt;
  if (!IsPure(unit, left) || !IsPure(unit, right)) return std::nullopt;
  if (SameTokens(unit, left, right)) return std::nullopt;  // no-op swap
  return Plan{Direction::kForward,
              {{node.span, Text(unit, right) + " " + std::string(*mirrored) + " " +
                               Text(unit, left)}}};
}

// ---------------------------------------------------------------------------
// PermuteExchange

std::optional<Plan> MatchPermute(const SourceUnit& unit, NodeId id) {
  const SyntaxTree& tree = unit.tree();
  const SyntaxNode& node = tree[id];
  if (node.kind != "if_statement") return std::nullopt;
  const std::string_view text = unit.text();
  const NodeId cond = tree.ChildByField(id, "condition");
  const NodeId then_block = tree.ChildByField(id, "consequence");
  if (cond == kNoNode || then_block == kNoNode) return std::nullopt;

  NodeId else_block = kNoNode;
  if (unit.language() == Language::kPython) {
    std::vector<NodeId> alternatives;
    for (NodeId child : node.children) {
      if (tree[child].field == "alternative") alternatives.push_back(child);
    }
    if (alternatives.size() != 1 || tree[alternatives[0]].kind != "else_clause") {
      return std::nullopt;
    }
    else_block = tree.ChildByField(alternatives[0], "body");
    if (else_block == kNoNode || tree[then_block].kind != "block" ||
        tree[else_block].kind != "block") {
      return std::nullopt;
    }
    // Blocks move verbatim, so they must sit on their own lines at one column.
    if (!HasNewlineBetween(text, node.span.begin, tree[then_block].span.begin) ||
        !HasNewlineBetween(text, tree[alternatives[0]].span.begin,
                           tree[else_block].span.begin) ||
        internal::ColumnOf(text, tree[then_block].span.begin) !=
            internal::ColumnOf(text, tree[else_block].span.begin)) {
      return std::nullopt;
    }
    Plan plan;
    plan.direction = Direction::kForward;
    std::string new_cond = "not (" + Text(unit, cond) + ")";
    if (tree[cond].kind == "not_operator") {
      const NodeId arg = tree.ChildByField(cond, "argument");
      const NodeId inner = arg == kNoNode ? kNoNode : SoleNamedChild(tree, arg);
      if (tree[arg].kind == "parenthesized_expression" && inner != kNoNode) {
        plan.direction = Direction::kBackward;
        new_cond = Text(unit, inner);
      }
    }
    plan.rewrites = {{tree[cond].span, new_cond},
                     {tree[then_block].span, Text(unit, else_block)},
                     {tree[else_block].span, Text(unit, then_block)}};
    return plan;
  }

  else_block = tree.ChildByField(id, "alternative");
  if (else_block == kNoNode || tree[then_block].kind != "block" ||
      tree[else_block].kind != "block" ||
      tree[cond].kind != "parenthesized_expression") {
    return std::nullopt;
  }
  Plan plan;
  plan.direction = Direction::kForward;
  std::string new_cond = "(!" + Text(unit, cond) + ")";
  const NodeId inner = SoleNamedChild(tree, cond);
  if (inner != kNoNode && tree[inner].kind == "unary_expression") {
    const NodeId op = OperatorChild(tree, inner, "operator");
    const NodeId operand = tree.ChildByField(inner, "operand");
    if (op != kNoNode && unit.TextOf(op) == "!" && operand != kNoNode &&
        tree[operand].kind == "parenthesized_expression") {
      plan.direction = Direction::kBackward;
      new_cond = Text(unit, operand);
    }
  }
  plan.rewrites = {{tree[cond].span, new_cond},
                   {tree[then_block].span, Text(unit, else_block)},
                   {tree[else_block].span, Text(unit, then_block)}};
  return plan;
}

// ---------------------------------------------------------------------------
// LoopExchange

bool HasNestedCallable(const SyntaxTree& tree, NodeId body) {
  return ContainsKind(tree, body, {"lambda", "function_definition",
                                   "class_definition", "lambda_expression",
                                   "class_declaration"});
}

// Assignments that could make the counter non-integral (range() needs ints).
bool MayHoldFloat(const SourceUnit& unit, std::string_view name) {
  const SyntaxTree& tree = unit.tree();
  for (NodeId id = 0; id < tree.size(); ++id) {
    const std::string_view kind = tree[id].kind;
    if (kind != "assignment" && kind != "augmented_assignment") continue;
    const NodeId left = tree.ChildByField(id, "left");
    const NodeId right = tree.ChildByField(id, "right");
    if (left == kNoNode || right == kNoNode || unit.TextOf(left) != name) continue;
    if (kind == "augmented_assignment" &&
        IsOneOf(unit.TextOf(OperatorChild(tree, id, "operator")), {"/=", "**="})) {
      return true;
    }
    for (NodeId cur : Descendants(tree, right)) {
      if (tree[cur].kind == "float") return true;
      if (tree[cur].kind == "binary_operator" &&
          unit.TextOf(OperatorChild(tree, cur, "operator")) == "/") {
        return true;
      }
    }
  }
  return false;
}

std::optional<Plan> MatchPythonFor(const SourceUnit& unit, NodeId id) {
  const SyntaxTree& tree = unit.tree();
  const std::string_view text = unit.text();
  const NodeId var = tree.ChildByField(id, "left");
  const NodeId iter = tree.ChildByField(id, "right");
  const NodeId body = tree.ChildByField(id, "body");
  if (var == kNoNode || iter == kNoNode || body == kNoNode) return std::nullopt;
  if (tree[var].kind != "identifier" || tree[iter].kind != "call") return std::nullopt;
  if (tree.ChildByField(id, "alternative") != kNoNode) return std::nullopt;
  const NodeId fn = tree.ChildByField(iter, "function");
  if (tree[fn].kind != "identifier" || unit.TextOf(fn) != "range" ||
      DefinesName(unit, "range")) {
    return std::nullopt;
  }
  const NodeId arg_list = tree.ChildByField(iter, "arguments");
  if (arg_list == kNoNode || tree[arg_list].kind != "argument_list") return std::nullopt;
  std::vector<NodeId> args = Statements(tree, arg_list);
  if (args.empty() || args.size() > 3) return std::nullopt;
  for (NodeId arg : args) {
    if (IsOneOf(tree[arg].kind, {"keyword_argument", "list_splat",
                                 "dictionary_splat", "generator_expression"})) {
      return std::nullopt;
    }
  }
  long long step = 1;
  if (args.size() == 3) {
    const auto parsed = ParseIntLiteral(unit, args[2]);
    if (!parsed || *parsed == 0) return std::nullopt;
    step = *parsed;
  }
  const std::string name = Text(unit, var);
  const NodeId stop = args.size() == 1 ? args[0] : args[1];
  const std::string start = args.size() == 1 ? "0" : Text(unit, args[0]);

  if (!HasNewlineBetween(text, tree[id].span.begin, tree[body].span.begin) ||
      HasNestedCallable(tree, body) || HasOwnContinue(tree, id, body) ||
      IsAssignedIn(unit, body, name) || ReferencedOutside(unit, id, name) ||
      !IsStableBound(unit, stop, body, name)) {
    return std::nullopt;
  }
  const NodeId colon = ColonBefore(tree, id, body);
  if (colon == kNoNode) return std::nullopt;
  const std::string indent = LineIndent(text, tree[id].span.begin);
  const std::string body_indent = LineIndent(text, tree[body].span.begin);
  const std::string header = name + " = " + start + "\n" + indent + "while " + name +
                             (step > 0 ? " < " : " > ") + Text(unit, stop) + ":";
  const std::string increment = "\n" + body_indent + name +
                                (step > 0 ? " += " : " -= ") +
                                std::to_string(step > 0 ? step : -step);
  return Plan{Direction::kForward,
              {{{tree[id].span.begin, tree[colon].span.end}, header},
               {{tree[body].span.end, tree[body].span.end}, increment}}};
}

std::optional<Plan> MatchPythonWhile(const SourceUnit& unit, NodeId id) {
  const SyntaxTree& tree = unit.tree();
  const NodeId cond = tree.ChildByField(id, "condition");
  const NodeId body = tree.ChildByField(id, "body");
  if (cond == kNoNode || body == kNoNode || tree[cond].kind != "comparison_operator") {
    return std::nullopt;
  }
  if (tree.ChildByField(id, "alternative") != kNoNode) return std::nullopt;
  std::vector<NodeId> operands;
  std::vector<NodeId> operators;
  for (NodeId child : tree[cond].children) {
    if (tree[child].field == "operators") {
      operators.push_back(child);
    } else if (tree[child].named) {
      operands.push_back(child);
    }
  }
  if (operands.size() != 2 || operators.size() != 1) return std::nullopt;
  const std::string_view cmp = unit.TextOf(operators[0]);
  if (cmp != "<" && cmp != ">") return std::nullopt;
  const NodeId var = operands[0];
  const NodeId stop = operands[1];
  if (tree[var].kind != "identifier") return std::nullopt;
  const std::string name = Text(unit, var);

  const std::vector<NodeId> stmts = Statements(tree, body);
  if (stmts.empty()) return std::nullopt;
  const NodeId last = stmts.back();
  const NodeId inc = SoleNamedChild(tree, last);
  if (tree[last].kind != "expression_statement" || inc == kNoNode ||
      tree[inc].kind != "augmented_assignment") {
    return std::nullopt;
  }
  const NodeId inc_left = tree.ChildByField(inc, "left");
  const NodeId inc_op = OperatorChild(tree, inc, "operator");
  const auto amount = ParseIntLiteral(unit, tree.ChildByField(inc, "right"));
  if (inc_left == kNoNode || inc_op == kNoNode || !amount || *amount <= 0 ||
      unit.TextOf(inc_left) != name) {
    return std::nullopt;
  }
  const std::string_view inc_text = unit.TextOf(inc_op);
  if (!((cmp == "<" && inc_text == "+=") || (cmp == ">" && inc_text == "-="))) {
    return std::nullopt;
  }
  if (HasNestedCallable(tree, body) || HasOwnContinue(tree, id, body) ||
      IsAssignedIn(unit, body, name, last) || ReferencedOutside(unit, id, name) ||
      MayHoldFloat(unit, name) || DefinesName(unit, "range") ||
      !IsStableBound(unit, stop, body, name)) {
    return std::nullopt;
  }
  const NodeId colon = ColonBefore(tree, id, body);
  if (colon == kNoNode) return std::nullopt;
  std::string header = "for " + name + " in range(" + name + ", " + Text(unit, stop);
  if (cmp == ">") {
    header += ", -" + std::to_string(*amount);
  } else if (*amount != 1) {
    header += ", " + std::to_string(*amount);
  }
  header += "):";
  Plan plan{Direction::kBackward, {{{tree[id].span.begin, tree[colon].span.end}, header}}};
  if (stmts.size() == 1) {
    plan.rewrites.push_back({tree[last].span, "pass"});
  } else {
    const NodeId prev = stmts[stmts.size() - 2];
    plan.rewrites.push_back({{tree[prev].span.end, tree[last].span.end}, ""});
  }
  return plan;
}

std::optional<Plan> MatchJavaFor(const SourceUnit& unit, NodeId id) {
  const SyntaxTree& tree = unit.tree();
  const NodeId cond = tree.ChildByField(id, "condition");
  const NodeId body = tree.ChildByField(id, "body");
  if (cond == kNoNode || body == kNoNode || HasOwnContinue(tree, id, body)) {
    return std::nullopt;
  }
  std::string init;
  std::vector<std::string> init_exprs;
  std::vector<std::string> updates;
  for (NodeId child : tree[id].children) {
    if (tree[child].field == "init") {
      if (tree[child].kind == "local_variable_declaration") {
        init = Text(unit, child);
      } else {
        init_exprs.push_back(Text(unit, child));
      }
    } else if (tree[child].field == "update") {
      updates.push_back(Text(unit, child) + ";");
    }
  }
  for (const auto& expr : init_exprs) init += expr + "; ";
  std::string out = "{ ";
  if (!init.empty()) out += init + (init.back() == ' ' ? "" : " ");
  out += "while (" + Text(unit, cond) + ") { " + Text(unit, body);
  for (const auto& update : updates) out += " " + update;
  out += " } }";
  return Plan{Direction::kForward, {{tree[id].span, out}}};
}

std::optional<Plan> MatchJavaWhile(const SourceUnit& unit, NodeId id) {
  const SyntaxTree& tree = unit.tree();
  const NodeId cond = tree.ChildByField(id, "condition");
  if (cond == kNoNode || tree[cond].kind != "parenthesized_expression") {
    return std::nullopt;
  }
  const NodeId inner = SoleNamedChild(tree, cond);
  if (inner == kNoNode) return std::nullopt;
  return Plan{Direction::kBackward,
              {{{tree[id].span.begin, tree[cond].span.end},
                "for (; " + Text(unit, inner) + "; )"}}};
}

std::optional<Plan> MatchLoop(const SourceUnit& unit, NodeId id) {
  const std::string_view kind = unit.tree()[id].kind;
  if (unit.language() == Language::kPython) {
    if (kind == "for_statement") return MatchPythonFor(unit, id);
    if (kind == "while_statement") return MatchPythonWhile(unit, id);
    return std::nullopt;
  }
  if (kind == "for_statement") return MatchJavaFor(unit, id);
  if (kind == "while_statement") return MatchJavaWhile(unit, id);
  return std::nullopt;
}

std::optional<Plan> Match(TransformRule rule, const SourceUnit& unit, NodeId id) {
  switch (rule) {
    case TransformRule::kLoopExchange: return MatchLoop(unit, id);
    case TransformRule::kExpressionExchange: return MatchExpression(unit, id);
    case TransformRule::kPermuteExchange: return MatchPermute(unit, id);
    case TransformRule::kConditionExchange: return MatchCondition(unit, id);
  }
  return std::nullopt;
}

}  // namespace

const RuleSet& AllTransformRules() {
  static const RuleSet all = {
      TransformRule::kLoopExchange, TransformRule::kExpressionExchange,
      TransformRule::kPermuteExchange, TransformRule::kConditionExchange};
  return all;
}

std::string_view TransformRuleName(TransformRule rule) {
  switch (rule) {
    case TransformRule::kLoopExchange: return "loop";
    case TransformRule::kExpressionExchange: return "expression";
    case TransformRule::kPermuteExchange: return "permute";
    case TransformRule::kConditionExchange: return "condition";
  }
  return "?";
}

TransformRule ParseTransformRule(std::string_view name) {
  for (TransformRule rule : AllTransformRules()) {
    if (TransformRuleName(rule) == name) return rule;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown transform rule '" + std::string(name) + "'");
}

RuleSet ParseRuleSet(std::string_view list) {
  if (list.empty() || list == "all") return AllTransformRules();
  RuleSet rules;
  size_t start = 0;
  while (start <= list.size()) {
    const size_t comma = std::min(list.find(',', start), list.size());
    rules.insert(ParseTransformRule(list.substr(start, comma - start)));
    start = comma + 1;
  }
  return rules;
}

uint64_t TextHash(std::string_view text) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::vector<TransformSite> FindSites(const SourceUnit& unit, const RuleSet& rules) {
  if (unit.has_error()) {
    throw Error(ErrorCode::kParseErrorInput, "cannot transform unparsable code");
  }
  const SyntaxTree& tree = unit.tree();
  const uint64_t hash = TextHash(unit.text());
  std::vector<TransformSite> sites;
  for (NodeId id = 0; id < tree.size(); ++id) {
    for (TransformRule rule : rules) {
      auto plan = Match(rule, unit, id);
      if (!plan) continue;
      // Keep only sites whose rewrite reparses cleanly.
      const SourceUnit result = ApplyRewrites(unit, plan->rewrites);
      if (result.has_error() || result.text() == unit.text()) continue;
      sites.push_back({rule, tree[id].span, tree[id].kind, plan->direction, hash});
    }
  }
  std::stable_sort(sites.begin(), sites.end(),
                   [](const TransformSite& a, const TransformSite& b) {
                     return a.anchor.begin < b.anchor.begin;
                   });
  return sites;
}

std::vector<Rewrite> PlanTransform(const SourceUnit& unit, const TransformSite& site) {
  if (site.text_hash != TextHash(unit.text())) {
    throw Error(ErrorCode::kStaleSite, "unit changed since the site was found");
  }
  const NodeId id = unit.tree().FindNode(site.anchor, site.anchor_kind);
  auto plan = id == kNoNode ? std::nullopt : Match(site.rule, unit, id);
  if (!plan || plan->direction != site.direction) {
    throw Error(ErrorCode::kStaleSite, "site no longer matches its rule");
  }
  return std::move(plan->rewrites);
}

SourceUnit ApplyTransform(const SourceUnit& unit, const TransformSite& site) {
  return ApplyRewrites(unit, PlanTransform(unit, site));
}

std::optional<SourceUnit> SampleVariant(const SourceUnit& unit,
                                        const RuleSet& rules, uint64_t seed) {
  if (unit.has_error()) return std::nullopt;
  const std::vector<TransformSite> sites = FindSites(unit, rules);
  if (sites.empty()) return std::nullopt;

  Rng rng(MixSeed(seed, 0x7a5f));
  std::vector<size_t> chosen;
  while (chosen.empty()) {
    for (size_t i = 0; i < sites.size(); ++i) {
      if (rng.Bernoulli(0.5)) chosen.push_back(i);
    }
  }
  std::vector<Rewrite> accepted;
  std::vector<Rewrite> first_site;
  for (auto it = chosen.rbegin(); it != chosen.rend(); ++it) {
    std::vector<Rewrite> rewrites = PlanTransform(unit, sites[*it]);
    bool collides = false;
    for (const Rewrite& mine : rewrites) {
      for (const Rewrite& other : accepted) {
        if (mine.span.Overlaps(other.span) || mine.span.begin == other.span.begin ||
            (mine.span.empty() && other.span.Contains(mine.span)) ||
            (other.span.empty() && mine.span.Contains(other.span))) {
          collides = true;
        }
      }
    }
    if (collides) continue;
    if (first_site.empty()) first_site = rewrites;
    accepted.insert(accepted.end(), rewrites.begin(), rewrites.end());
  }
  SourceUnit variant = ApplyRewrites(unit, accepted);
  if (variant.has_error()) variant = ApplyRewrites(unit, first_site);
  return variant;
}

}  // namespace synth_eval
