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

// Content-word extraction for knowledge lookups and a rule-based guess at a
// sentence's syntactic subject.

#ifndef SELFTALK_TERMS_H_
#define SELFTALK_TERMS_H_

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "selftalk/types.h"

namespace selftalk {

struct TermSets {
  std::set<std::string> context_terms;              // context + question
  std::vector<std::set<std::string>> choice_terms;  // one set per choice
};

// 180 lowercase function words.
bool IsStopword(std::string_view word);

// Lowercased words of length >= 3 that are not stopwords. Possessive "'s" is
// stripped.
std::set<std::string> ContentWords(std::string_view text);

TermSets ExtractTerms(const Instance &inst);

// The noun phrase before the first finite verb of the first sentence, or
// nullopt when no verb is recognized. "Austin fought for Quinn's life." ->
// "Austin"; "The man broke his toe." -> "The man".
std::optional<std::string> ExtractSubject(std::string_view text);

}  // namespace selftalk

#endif  // SELFTALK_TERMS_H_
