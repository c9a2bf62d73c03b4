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

#include <string>
#include <vector>

#include "doctest.h"
#include "synth_eval/error.h"
#include "synth_eval/random.h"

namespace synth_eval {
namespace {

using Tokens = std::vector<std::string>;

constexpr const char* kSumCode =
    "def sum (a , b) :\n    a = a + b\n    return a\n";

TEST_CASE("parse reports errors only for malformed code") {
  CHECK_FALSE(Parse(Language::kPython, "def f(): return 1").has_error());
  CHECK(Parse(Language::kPython, "def f(: return").has_error());
  CHECK(Parse(Language::kJava, "class A { int x( { }").has_error());
  CHECK_FALSE(
      Parse(Language::kJava, "class A { int f(int a) { return a; } }").has_error());
}

TEST_CASE("sum example parses to a single function definition") {
  SourceUnit unit(Language::kPython, kSumCode);
  const SyntaxTree& tree = unit.tree();
  REQUIRE_FALSE(tree.has_error());
  const auto top = tree.NamedChildren(tree.root());
  REQUIRE(top.size() == 1);
  CHECK(tree[top[0]].kind == "function_definition");
}

TEST_CASE("tree spans nest and pre-order starts are nondecreasing") {
  for (const char* text :
       {kSumCode, "x = [i * 2 for i in range(10) if i % 3]\n",
        "def f(: return"}) {
    SourceUnit unit(Language::kPython, text);
    const SyntaxTree& tree = unit.tree();
    uint32_t last_start = 0;
    for (NodeId id = 0; id < tree.size(); ++id) {
      const SyntaxNode& node = tree[id];
      CHECK(node.span.end <= unit.text().size());
      CHECK(node.span.begin >= last_start);
      last_start = node.span.begin;
      for (NodeId child : node.children) CHECK(node.span.Contains(tree[child].span));
    }
  }
}

TEST_CASE("parsing is deterministic") {
  SourceUnit a(Language::kJava, "class A { int f(int x) { return x + 1; } }");
  SourceUnit b(Language::kJava, a.text());
  REQUIRE(a.tree().size() == b.tree().size());
  for (NodeId id = 0; id < a.tree().size(); ++id) {
    CHECK(a.tree()[id].kind == b.tree()[id].kind);
    CHECK(a.tree()[id].span == b.tree()[id].span);
    CHECK(a.tree()[id].children == b.tree()[id].children);
  }
}

TEST_CASE("tokenize yields leaf text in order") {
  CHECK(Tokenize(SourceUnit(Language::kPython, "a = a + b")) ==
        Tokens{"a", "=", "a", "+", "b"});
  CHECK(Tokenize(SourceUnit(Language::kPython, "")).empty());

  const Tokens toks = Tokenize(SourceUnit(Language::kPython, kSumCode));
  CHECK(toks.size() == 15);
  CHECK(Tokens(toks.begin(), toks.begin() + 7) ==
        Tokens{"def", "sum", "(", "a", ",", "b", ")"});
}

TEST_CASE("tokenize ignores whitespace layout") {
  CHECK(Tokenize(SourceUnit(Language::kPython, "def sum (a , b) :\n  return a\n")) ==
        Tokenize(SourceUnit(Language::kPython, "def sum(a,b):\n    return a")));
  CHECK(Tokenize(SourceUnit(Language::kPython, "x = 1  # note\n")) ==
        Tokens{"x", "=", "1"});
}

TEST_CASE("tokenize keeps error leaves") {
  const Tokens tokens = Tokenize(SourceUnit(Language::kPython, "def f(: return"));
  CHECK_FALSE(tokens.empty());
  CHECK(tokens.front() == "def");
}

TEST_CASE("apply_rewrites splices right to left") {
  SourceUnit plus(Language::kPython, "a+b");
  CHECK(ApplyRewrites(plus, {{{1, 2}, "-"}}).text() == "a-b");
  CHECK(ApplyRewrites(SourceUnit(Language::kPython, "abc"), {}).text() == "abc");

  SourceUnit unit(Language::kPython, "x = x + y");
  const SourceUnit out = ApplyRewrites(unit, {{{8, 9}, "z"}, {{6, 7}, "-"}});
  CHECK(out.text() == "x = x - z");
  CHECK(out.language() == Language::kPython);
  CHECK_FALSE(out.has_error());
}

TEST_CASE("apply_rewrites rejects overlaps and out-of-range spans") {
  SourceUnit unit(Language::kPython, "abcdef");
  try {
    ApplyRewrites(unit, {{{0, 3}, "x"}, {{2, 4}, "y"}});
    FAIL("expected OverlappingRewrites");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kOverlappingRewrites);
  }
  try {
    ApplyRewrites(unit, {{{5, 9}, "x"}});
    FAIL("expected SpanOutOfBounds");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSpanOutOfBounds);
  }
  // Adjacent spans do not overlap.
  CHECK(ApplyRewrites(unit, {{{0, 3}, "X"}, {{3, 6}, "Y"}}).text() == "XY");
}

TEST_CASE("empty rewrite batch preserves span structure") {
  SourceUnit unit(Language::kJava,
                  "class A { int f(int a) { for (int i = 0; i < a; i++) a += i; "
                  "return a; } }");
  const SourceUnit same = ApplyRewrites(unit, {});
  REQUIRE(same.tree().size() == unit.tree().size());
  for (NodeId id = 0; id < unit.tree().size(); ++id) {
    CHECK(same.tree()[id].span == unit.tree()[id].span);
  }
}

TEST_CASE("single-token replacement changes exactly one token") {
  SourceUnit unit(Language::kPython,
                  "def g(x, y):\n    z = x * y + 3\n    return z - x\n");
  const auto leaves = TokenLeaves(unit);
  const Tokens before = Tokenize(unit);
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const size_t pick = rng.Index(leaves.size());
    const std::string_view kind = unit.tree()[leaves[pick]].kind;
    if (kind != "identifier" && kind != "integer") continue;
    const SourceUnit out =
        ApplyRewrites(unit, {{unit.tree()[leaves[pick]].span, "qq"}});
    REQUIRE_FALSE(out.has_error());
    const Tokens after = Tokenize(out);
    REQUIRE(after.size() == before.size());
    int changed = 0;
    for (size_t i = 0; i < before.size(); ++i) changed += before[i] != after[i];
    CHECK(changed == (before[pick] == "qq" ? 0 : 1));
  }
}

TEST_CASE("source units share a lazily parsed tree across threads") {
  SourceUnit unit(Language::kPython, kSumCode);
  SourceUnit copy = unit;
  CHECK(&unit.tree() == &copy.tree());
}

}  // namespace
}  // namespace synth_eval
