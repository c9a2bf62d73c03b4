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

#include "synth_eval/corpus.h"

#include <fstream>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "synth_eval/error.h"

namespace synth_eval {
namespace {

using nlohmann::json;

CorpusRecord FromJson(const json& j) {
  CorpusRecord r;
  r.id = j.at("id").get<std::string>();
  r.lang = ParseLanguage(j.at("lang").get<std::string>());
  r.reference = j.at("reference").get<std::string>();
  if (j.contains("nl") && !j["nl"].is_null()) r.nl = j["nl"].get<std::string>();
  if (j.contains("prediction") && !j["prediction"].is_null()) {
    r.prediction = j["prediction"].get<std::string>();
  }
  if (j.contains("pass1") && !j["pass1"].is_null()) {
    const int label = j["pass1"].get<int>();
    if (label != 0 && label != 1) {
      throw Error(ErrorCode::kInvalidArgument, "pass1 must be 0 or 1");
    }
    r.pass1 = label;
  }
  if (j.contains("entry_point") && !j["entry_point"].is_null()) {
    r.entry_point = j["entry_point"].get<std::string>();
  }
  if (j.contains("tests") && !j["tests"].is_null()) {
    std::vector<TestCase> tests;
    for (const json& t : j["tests"]) {
      TestCase tc;
      if (t.is_string()) {
        tc.assertion = t.get<std::string>();
      } else if (t.contains("assert")) {
        tc.assertion = t["assert"].get<std::string>();
      } else {
        tc.input = t.at("input").get<std::string>();
        tc.output = t.at("output").get<std::string>();
      }
      tests.push_back(std::move(tc));
    }
    r.tests = std::move(tests);
  }
  return r;
}

json ToJson(const CorpusRecord& r) {
  json j = json::object();
  j["id"] = r.id;
  j["lang"] = LanguageName(r.lang);
  if (r.nl) j["nl"] = *r.nl;
  j["reference"] = r.reference;
  if (r.prediction) j["prediction"] = *r.prediction;
  if (r.pass1) j["pass1"] = *r.pass1;
  if (r.entry_point) j["entry_point"] = *r.entry_point;
  if (r.tests) {
    json tests = json::array();
    for (const TestCase& t : *r.tests) {
      if (t.is_assertion()) {
        tests.push_back({{"assert", t.assertion}});
      } else {
        tests.push_back({{"input", t.input}, {"output", t.output}});
      }
    }
    j["tests"] = std::move(tests);
  }
  return j;
}

}  // namespace

std::vector<CorpusRecord> ReadCorpus(std::istream& in) {
  std::vector<CorpusRecord> records;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(FromJson(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kIo,
                  "corpus line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), "corpus line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

std::vector<CorpusRecord> ReadCorpusFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open corpus " + path);
  return ReadCorpus(in);
}

void WriteCorpus(std::ostream& out, const std::vector<CorpusRecord>& records) {
  for (const CorpusRecord& r : records) out << ToJson(r).dump() << '\n';
}

void WriteCorpusFile(const std::string& path, const std::vector<CorpusRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write corpus " + path);
  WriteCorpus(out, records);
}

}  // namespace synth_eval
