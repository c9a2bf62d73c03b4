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


#ifndef SYNTH_EVAL_SYNTHETIC_H_
#define SYNTH_EVAL_SYNTHETIC_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "synth_eval/trainer.h"

namespace synth_eval {

// Seeded random integer functions (loops, branches, compound assignments,
// arithmetic) with a one-line description. Languages alternate unless `only`
// is given. Every unit parses and has a mutable operator.
std::vector<TrainingRecord> GenerateSyntheticCorpus(size_t count, uint64_t seed,
                                                    std::optional<Language> only = std::nullopt);

}  // namespace synth_eval

#endif  // SYNTH_EVAL_SYNTHETIC_H_
