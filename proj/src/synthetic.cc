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

#include "synth_eval/synthetic.h"

#include <memory>
#include <string>

#include <fmt/format.h>

#include "synth_eval/random.h"

namespace synth_eval {
namespace {

struct Expr {
  enum Kind { kVar, kLit, kBin } kind;
  std::string text;  // variable name, literal, or operator
  std::shared_ptr<Expr> left;
  std::shared_ptr<Expr> right;
};
using ExprPtr = std::shared_ptr<Expr>;

struct Stmt {
  enum Kind { kAssign, kAugAssign, kIf, kFor, kWhile } kind;
  std::string var;
  std::string op;
  ExprPtr value;
  ExprPtr cond;
  ExprPtr start;
  ExprPtr stop;
  std::vector<Stmt> body;
  std::vector<Stmt> orelse;
};

ExprPtr Var(std::string name) { return std::make_shared<Expr>(Expr{Expr::kVar, std::move(name), {}, {}}); }
ExprPtr Lit(int v) { return std::make_shared<Expr>(Expr{Expr::kLit, std::to_string(v), {}, {}}); }
ExprPtr Bin(std::string op, ExprPtr l, ExprPtr r) {
  return std::make_shared<Expr>(Expr{Expr::kBin, std::move(op), std::move(l), std::move(r)});
}

int Precedence(const std::string& op) {
  if (op == "*" || op == "/" || op == "%") return 3;
  if (op == "+" || op == "-") return 2;
  return 1;
}

std::string Render(const ExprPtr& e, int parent = 0) {
  if (e->kind != Expr::kBin) return e->text;
  const int p = Precedence(e->text);
  std::string s = Render(e->left, p) + " " + e->text + " " + Render(e->right, p + 1);
  return p < parent ? "(" + s + ")" : s;
}

const char* const kFunctionNames[] = {"compute", "accumulate", "score", "total", "walk",
                                      "blend", "scan", "measure", "fold", "reduce_values"};
const char* const kParamNames[] = {"n", "m", "k", "limit", "step", "base", "x", "y"};
const char* const kLocalNames[] = {"acc", "result", "s", "t", "count", "value", "prod", "tmp"};
const char* const kLoopNames[] = {"i", "j", "idx"};
const char* const kArith[] = {"+", "-", "*"};
const char* const kRel[] = {"<", ">", "<=", ">=", "==", "!="};

class Generator {
 public:
  Generator(uint64_t seed, Language lang) : rng_(seed), lang_(lang) {}

  TrainingRecord Make(const std::string& id) {
    const std::string name = kFunctionNames[rng_.Index(std::size(kFunctionNames))];
    const size_t n_params = 1 + rng_.Index(3);
    std::vector<size_t> picks = rng_.Sample(std::size(kParamNames), n_params);
    params_.clear();
    for (size_t p : picks) params_.push_back(kParamNames[p]);
    locals_.clear();
    loop_vars_.clear();

    std::vector<Stmt> body;
    const std::string acc = NewLocal();
    body.push_back({Stmt::kAssign, acc, "=", Lit(static_cast<int>(rng_.Index(3))), {}, {}, {}, {}, {}});
    const size_t n_stmts = 1 + rng_.Index(2);
    for (size_t s = 0; s < n_stmts; ++s) body.push_back(Statement(acc, 1));
    ExprPtr ret = Var(acc);
    if (rng_.Bernoulli(0.4)) ret = Bin(Arith(), ret, Term());

    const std::string code = lang_ == Language::kPython ? RenderPython(name, body, ret)
                                                        : RenderJava(name, body, ret);
    TrainingRecord record;
    record.id = id;
    record.lang = lang_;
    record.nl = Describe(name, body);
    record.code = code;
    return record;
  }

 private:
  std::string NewLocal() {
    for (const char* candidate : kLocalNames) {
      if (std::find(locals_.begin(), locals_.end(), candidate) == locals_.end() &&
          rng_.Bernoulli(0.5)) {
        locals_.push_back(candidate);
        return candidate;
      }
    }
    locals_.push_back(fmt::format("v{}", locals_.size()));
    return locals_.back();
  }

  std::string Arith() {
    if (rng_.Bernoulli(0.15)) return rng_.Bernoulli(0.5) ? "//" : "%";
    return kArith[rng_.Index(std::size(kArith))];
  }

  ExprPtr Atom() {
    const double u = rng_.Uniform();
    if (u < 0.45 || (loop_vars_.empty() && u < 0.7)) {
      return Var(params_[rng_.Index(params_.size())]);
    }
    if (u < 0.7) return Var(loop_vars_[rng_.Index(loop_vars_.size())]);
    return Lit(1 + static_cast<int>(rng_.Index(9)));
  }

  ExprPtr Term() {
    if (rng_.Bernoulli(0.2)) return Bin(Arith(), Atom(), Atom());
    return Atom();
  }

  ExprPtr Condition() {
    return Bin(kRel[rng_.Index(std::size(kRel))], Atom(), Term());
  }

  Stmt Update(const std::string& acc) {
    if (rng_.Bernoulli(0.5)) {
      return {Stmt::kAugAssign, acc, Arith(), Term(), {}, {}, {}, {}, {}};
    }
    return {Stmt::kAssign, acc, "=", Bin(Arith(), Var(acc), Term()), {}, {}, {}, {}, {}};
  }

  Stmt Statement(const std::string& acc, int depth) {
    const double u = rng_.Uniform();
    if (depth < 2 && u < 0.35) {
      Stmt loop{Stmt::kFor, loop_vars_.size() < std::size(kLoopNames)
                                ? kLoopNames[loop_vars_.size()]
                                : "q",
                "", {}, {}, {}, {}, {}, {}};
      loop.start = rng_.Bernoulli(0.5) ? Lit(0) : Lit(1);
      loop.stop = Var(params_[rng_.Index(params_.size())]);
      loop_vars_.push_back(loop.var);
      loop.body.push_back(Statement(acc, depth + 1));
      
      loop_vars_.pop_back();
      return loop;
    }
    if (depth < 2 && u < 0.5) {
      Stmt loop{Stmt::kWhile, "", "", {}, {}, {}, {}, {}, {}};
      loop.cond = Bin("<", Var(acc), Var(params_[rng_.Index(params_.size())]));
      Stmt grow{Stmt::kAugAssign, acc, "+", Lit(1 + static_cast<int>(rng_.Index(4))), {}, {}, {}, {}, {}};
      if (rng_.Bernoulli(0.5)) loop.body.push_back(Update(acc));
      loop.body.push_back(grow);
      return loop;
    }
    if (depth < 2 && u < 0.75) {
      Stmt branch{Stmt::kIf, "", "", {}, Condition(), {}, {}, {}, {}};
      branch.body.push_back(Statement(acc, depth + 1));
      if (rng_.Bernoulli(0.7)) branch.orelse.push_back(Update(acc));
      return branch;
    }
    return Update(acc);
  }

  void PythonBlock(const std::vector<Stmt>& stmts, int indent, std::string& out) {
    const std::string pad(static_cast<size_t>(indent) * 4, ' ');
    for (const Stmt& s : stmts) {
      switch (s.kind) {
        case Stmt::kAssign:
          out += pad + s.var + " = " + Render(s.value) + "\n";
          break;
        case Stmt::kAugAssign:
          out += pad + s.var + " " + s.op + "= " + Render(s.value) + "\n";
          break;
        case Stmt::kIf:
          out += pad + "if " + Render(s.cond) + ":\n";
          PythonBlock(s.body, indent + 1, out);
          if (!s.orelse.empty()) {
            out += pad + "else:\n";
            PythonBlock(s.orelse, indent + 1, out);
          }
          break;
        case Stmt::kFor:
          out += pad + "for " + s.var + " in range(" +
                 (s.start->text == "0" ? "" : Render(s.start) + ", ") + Render(s.stop) + "):\n";
          PythonBlock(s.body, indent + 1, out);
          break;
        case Stmt::kWhile:
          out += pad + "while " + Render(s.cond) + ":\n";
          PythonBlock(s.body, indent + 1, out);
          break;
      }
    }
  }

  std::string JavaOp(const std::string& op) { return op == "//" ? "/" : op; }

  std::string RenderJavaExpr(const ExprPtr& e, int parent = 0) {
    if (e->kind != Expr::kBin) return e->text;
    const int p = Precedence(e->text);
    std::string s = RenderJavaExpr(e->left, p) + " " + JavaOp(e->text) + " " +
                    RenderJavaExpr(e->right, p + 1);
    return p < parent ? "(" + s + ")" : s;
  }

  void JavaBlock(const std::vector<Stmt>& stmts, int indent, std::string& out,
                 std::vector<std::string>& declared) {
    const std::string pad(static_cast<size_t>(indent) * 4, ' ');
    for (const Stmt& s : stmts) {
      switch (s.kind) {
        case Stmt::kAssign: {
          const bool fresh = std::find(declared.begin(), declared.end(), s.var) == declared.end();
          if (fresh) declared.push_back(s.var);
          out += pad + (fresh ? "int " : "") + s.var + " = " + RenderJavaExpr(s.value) + ";\n";
          break;
        }
        case Stmt::kAugAssign:
          out += pad + s.var + " " + JavaOp(s.op) + "= " + RenderJavaExpr(s.value) + ";\n";
          break;
        case Stmt::kIf:
          out += pad + "if (" + RenderJavaExpr(s.cond) + ") {\n";
          JavaBlock(s.body, indent + 1, out, declared);
          if (!s.orelse.empty()) {
            out += pad + "} else {\n";
            JavaBlock(s.orelse, indent + 1, out, declared);
          }
          out += pad + "}\n";
          break;
        case Stmt::kFor:
          out += pad + "for (int " + s.var + " = " + RenderJavaExpr(s.start) + "; " + s.var +
                 " < " + RenderJavaExpr(s.stop) + "; " + s.var + "++) {\n";
          JavaBlock(s.body, indent + 1, out, declared);
          out += pad + "}\n";
          break;
        case Stmt::kWhile:
          out += pad + "while (" + RenderJavaExpr(s.cond) + ") {\n";
          JavaBlock(s.body, indent + 1, out, declared);
          out += pad + "}\n";
          break;
      }
    }
  }

  std::string RenderPython(const std::string& name, const std::vector<Stmt>& body,
                           const ExprPtr& ret) {
    std::string out = "def " + name + "(";
    for (size_t i = 0; i < params_.size(); ++i) out += (i ? ", " : "") + params_[i];
    out += "):\n";
    PythonBlock(body, 1, out);
    out += "    return " + Render(ret) + "\n";
    return out;
  }

  std::string RenderJava(const std::string& name, const std::vector<Stmt>& body,
                         const ExprPtr& ret) {
    std::string out = "static int " + name + "(";
    for (size_t i = 0; i < params_.size(); ++i) out += (i ? ", int " : "int ") + params_[i];
    out += ") {\n";
    std::vector<std::string> declared;
    JavaBlock(body, 1, out, declared);
    out += "    return " + RenderJavaExpr(ret) + ";\n}\n";
    return out;
  }

  std::string Describe(const std::string& name, const std::vector<Stmt>& body) {
    std::string nl = "Compute " + name;
    for (const Stmt& s : body) {
      if (s.kind == Stmt::kFor) nl += " looping over a range";
      if (s.kind == Stmt::kWhile) nl += " while a bound holds";
      if (s.kind == Stmt::kIf) nl += " with a conditional update";
    }
    nl += " of the inputs";
    for (const auto& p : params_) nl += " " + p;
    return nl;
  }

  Rng rng_;
  Language lang_;
  std::vector<std::string> params_;
  std::vector<std::string> locals_;
  std::vector<std::string> loop_vars_;
};

}  // namespace

std::vector<TrainingRecord> GenerateSyntheticCorpus(size_t count, uint64_t seed,
                                                    std::optional<Language> only) {
  std::vector<TrainingRecord> records;
  for (size_t i = 0; i < count; ++i) {
    const Language lang =
        only ? *only : (i % 2 == 0 ? Language::kPython : Language::kJava);
    Generator gen(MixSeed(seed, i), lang);
    records.push_back(gen.Make(fmt::format("syn-{:04d}", i)));
  }
  return records;
}

}  // namespace synth_eval
