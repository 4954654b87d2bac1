// Copyright 2026 The Self-Talk QA Authors.
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
#ifndef SELFTALK_DATASET_H_
#define SELFTALK_DATASET_H_

#include <filesystem>
#include <string_view>
#include <vector>

#include "selftalk/types.h"

namespace selftalk {

// Parses one JSON-lines dataset. Whitespace inside text fields is collapsed.
// Lines carrying a per-choice "labels" array (MC-TACO style, several correct
// answers) are reduced to single-correct-answer form: the first correct
// choice is kept as gold and the other correct choices are dropped.
// Throws DatasetError with the offending line number.
std::vector<Instance> ParseInstances(std::string_view jsonl);
std::vector<Instance> LoadInstances(const std::filesystem::path &path);

// Single-correct-answer normalization on its own, for callers that build
// instances in memory.
Instance NormalizeMultiAnswer(Instance inst, const std::vector<bool> &labels);

}  // namespace selftalk

#endif  // SELFTALK_DATASET_H_
