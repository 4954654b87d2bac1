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

// Prompt assembly: filling a task's combine template with an instance and one
// answer choice, and deriving answer prefixes from generated questions.

#ifndef SELFTALK_COMBINE_H_
#define SELFTALK_COMBINE_H_

#include <optional>
#include <string>
#include <string_view>

#include "selftalk/types.h"

namespace selftalk {

// A filled template split at the context slot. `head` ends with the context
// (or the text before a blank), `tail` holds the rest including the choice.
// Clarifications placed after the context go between the two.
struct CombinedText {
  std::string head;
  std::string tail;

  std::string Full() const;
};

// Picks the template for the instance's question kind, honoring the COPA
// cause/effect swap switch. Throws TemplateError if none applies.
const std::string &SelectTemplate(const TaskSpec &spec, const Instance &inst);

// Fills the template. Throws TemplateError for unknown or unresolvable slots
// and PlaceholderError when a blank slot is used but the context has no
// placeholder. Throws std::out_of_range for a bad choice index.
CombinedText CombineParts(const TaskSpec &spec, const Instance &inst,
                          int choice_index);

std::string Combine(const TaskSpec &spec, const Instance &inst,
                    int choice_index);

// Replaces `_` in the answer prefix template with the body of the generated
// question (text after the prefix, without the question mark). A trailing
// article of the prefix is carried over unless the template already has it
// right before `_`: ("What is a", "What is a zoo?", "_ is") -> "a zoo is".
// Throws PrefixMismatchError if the question does not start with the prefix
// or does not end with exactly one '?'.
std::string SubstituteAnswerPrefix(std::string_view question_prefix,
                                   std::string_view generated_question,
                                   std::string_view answer_prefix_template);

// Matches `text` against a prefix pattern in which `wildcard` (e.g. "X")
// stands for one or more words. Returns the pattern with the wildcard
// replaced by the matched words when `text` starts with it.
std::optional<std::string> MatchPrefixPattern(std::string_view pattern,
                                              std::string_view text,
                                              std::string_view wildcard);

// The generation context of an instance: context and question joined.
std::string GenerationContext(const Instance &inst);

}  // namespace selftalk

#endif  // SELFTALK_COMBINE_H_
