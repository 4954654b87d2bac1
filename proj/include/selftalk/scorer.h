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

// Zero-shot answer scoring. Each choice is scored by the cross-entropy of its
// filled template; with clarifications, by the lowest cross-entropy over the
// template augmented with each clarification.

#ifndef SELFTALK_SCORER_H_
#define SELFTALK_SCORER_H_

#include <string>
#include <vector>

#include "selftalk/lm_backend.h"
#include "selftalk/types.h"

namespace selftalk {

enum class Placement { kAfterContext, kAppendedAfterOption };
enum class TieBreak { kLowestIndex };
enum class Execution { kParallel, kSerial };

std::string PlacementName(Placement p);
// Accepts "after_context", "appended" and "appended_after_option".
Placement ParsePlacement(const std::string &name);

struct ScoringConfig {
  Placement placement = Placement::kAfterContext;
  bool include_bare_option = true;
  TieBreak tie_break = TieBreak::kLowestIndex;
  Execution execution = Execution::kParallel;
};

// The text scored for one (choice, clarification) pair.
std::string AssembleScoredText(const TaskSpec &spec, const Instance &inst,
                               int choice_index, const Clarification &clar,
                               const ScoringConfig &cfg);

// Cross-entropy of every text, in input order. The parallel kernel fans out
// over min(OpenMP threads, backend max_concurrency) threads and returns
// exactly what the serial one does.
std::vector<double> CrossEntropySerial(const LMBackend &backend,
                                       const std::vector<std::string> &texts);
std::vector<double> CrossEntropyParallel(const LMBackend &backend,
                                         const std::vector<std::string> &texts);
std::vector<double> CrossEntropyBatch(const LMBackend &backend,
                                      const std::vector<std::string> &texts,
                                      Execution exec);

// Throws DatasetError when the instance has fewer than two choices.
Prediction ScoreBaseline(const LMBackend &backend, const TaskSpec &spec,
                         const Instance &inst,
                         Execution exec = Execution::kParallel);

// Clarifications are deduplicated by normalized text (first occurrence kept)
// before scoring. best_clarification indexes `clarifications` as passed in.
// With nothing to score (no clarifications, bare option excluded) the result
// is the baseline prediction with fallback set.
Prediction ScoreWithClarifications(const LMBackend &backend,
                                   const TaskSpec &spec, const Instance &inst,
                                   const std::vector<Clarification> &clarifications,
                                   const ScoringConfig &cfg);

}  // namespace selftalk

#endif  // SELFTALK_SCORER_H_
