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


#ifndef SYNTH_EVAL_CORPUS_H_
#define SYNTH_EVAL_CORPUS_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "synth_eval/code_model.h"

namespace synth_eval {

// Either an (input, expected output) pair of literals in the unit's language,
// or a raw assertion snippet.
struct TestCase {
  std::string input;
  std::string output;
  std::string assertion;

  bool is_assertion() const { return !assertion.empty(); }
  bool operator==(const TestCase&) const = default;
};

struct CorpusRecord {
  std::string id;
  Language lang = Language::kPython;
  std::optional<std::string> nl;
  std::string reference;
  std::optional<std::string> prediction;
  std::optional<int> pass1;
  std::optional<std::vector<TestCase>> tests;
  // Function the tests call; defaults to the first function of the unit.
  std::optional<std::string> entry_point;

  SourceUnit ReferenceUnit() const { return SourceUnit(lang, reference); }
  // Prediction, or the reference when no prediction is stored.
  SourceUnit PredictionUnit() const {
    return SourceUnit(lang, prediction.value_or(reference));
  }
  bool operator==(const CorpusRecord&) const = default;
};

// One JSON object per line. Blank lines are skipped. Throws kIo on a
// malformed line (message carries the line number).
std::vector<CorpusRecord> ReadCorpus(std::istream& in);
std::vector<CorpusRecord> ReadCorpusFile(const std::string& path);
void WriteCorpus(std::ostream& out, const std::vector<CorpusRecord>& records);
void WriteCorpusFile(const std::string& path, const std::vector<CorpusRecord>& records);

}  // namespace synth_eval

#endif  // SYNTH_EVAL_CORPUS_H_
