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

// Self-talk clarification generation: the generator LM is prompted with the
// instance and a question prefix to ask itself questions, then with each
// question and its answer prefix to answer them.

#ifndef SELFTALK_SELFTALK_H_
#define SELFTALK_SELFTALK_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "selftalk/lm_backend.h"
#include "selftalk/scorer.h"
#include "selftalk/types.h"

namespace selftalk {

struct SelfTalkConfig {
  double question_top_p = 0.2;
  int question_max_new_tokens = 6;
  int questions_per_prefix = 5;
  double answer_top_p = 0.5;
  int answer_max_new_tokens = 10;
  int answers_per_question = 10;
  // Only has an effect on instances that carry a question.
  bool reuse_instance_question = true;

  // Throws ConfigError.
  void Validate() const;
};

void to_json(Json &j, const SelfTalkConfig &v);
void from_json(const Json &j, SelfTalkConfig &v);

struct GeneratedQuestion {
  std::string question_prefix;  // the prefix-table entry it came from
  std::string question_text;
  bool from_instance = false;

  bool operator==(const GeneratedQuestion &) const = default;
};

// Used for reused instance questions that match no prefix-table entry.
inline constexpr std::string_view kFallbackQuestionPrefix = "What happened?";
inline constexpr std::string_view kFallbackAnswerPrefix = "What happened was";

// Questions for the instance, deduplicated by normalized text. Prefixes that
// are complete questions ending in '?' are asked as they are, with the
// subject placeholder filled in; other prefixes are continued by sampling and
// cut at the first '?'. A reused instance question comes first.
std::vector<GeneratedQuestion> GenerateQuestions(
    const LMBackend &generator, const TaskSpec &spec, const Instance &inst,
    const SelfTalkConfig &cfg, uint64_t seed,
    Execution exec = Execution::kParallel);

// The answer prefix for a question generated from `question_prefix`. Throws
// PrefixMismatchError for a prefix outside the task's table or a question
// that does not match its prefix.
std::string ResolveAnswerPrefix(const TaskSpec &spec,
                                std::string_view question_prefix,
                                std::string_view question_text);

// Well-formed, deduplicated clarifications answering one question.
std::vector<Clarification> GenerateAnswers(
    const LMBackend &generator, const TaskSpec &spec, const Instance &inst,
    std::string_view question_prefix, std::string_view question_text,
    const SelfTalkConfig &cfg, uint64_t seed);

// Questions then answers; clarifications deduplicated across questions, in
// question order.
std::vector<Clarification> GenerateClarifications(
    const LMBackend &generator, const TaskSpec &spec, const Instance &inst,
    const SelfTalkConfig &cfg, uint64_t seed,
    Execution exec = Execution::kParallel);

// Starts with the prefix (whose `wildcard` may stand for words), ends with
// exactly one '?', adds at least one token to an open prefix, and has no
// control characters.
bool IsWellFormedQuestion(std::string_view text, std::string_view prefix,
                          std::string_view wildcard = "");

// Starts with the answer prefix; ends with '.', '!' or '?' unless the token
// budget ran out; has at least two words beyond the prefix; is not the
// context verbatim; has balanced quotes and brackets.
bool IsWellFormedClarification(std::string_view text,
                               std::string_view answer_prefix,
                               std::string_view context,
                               bool budget_exhausted);

}  // namespace selftalk

#endif  // SELFTALK_SELFTALK_H_
