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

// String helpers shared by prompt assembly, the toy tokenizer and the
// knowledge sources.

#ifndef SELFTALK_TEXT_H_
#define SELFTALK_TEXT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace selftalk {

std::string Trim(std::string_view s);
std::string ToLower(std::string_view s);

// Collapses every whitespace run to one space and trims both ends.
std::string CollapseWhitespace(std::string_view s);

// Lowercase + whitespace collapse. Used as the dedup key for generated text.
std::string NormalizeForDedup(std::string_view s);

bool StartsWith(std::string_view s, std::string_view prefix);
bool EndsWith(std::string_view s, std::string_view suffix);

// Characters that the toy tokenizer splits off as their own tokens and that
// attach to the previous fragment when text is joined.
bool IsAttachingPunct(char c);
bool IsSentenceTerminator(char c);

// Joins two fragments with a single space. Empty fragments vanish; a fragment
// starting with attaching punctuation is glued to the left one.
std::string JoinText(std::string_view left, std::string_view right);

// Lowercased whitespace split; attaching punctuation becomes separate tokens.
std::vector<std::string> ToyTokenize(std::string_view text);

// Inverse of ToyTokenize up to case and whitespace.
std::string Detokenize(const std::vector<std::string> &tokens);

// Splits on whitespace without any other normalization.
std::vector<std::string> SplitWords(std::string_view text);

std::string ReplaceAll(std::string s, std::string_view from, std::string_view to);

// Replaces whole-word occurrences of `word` (bounded by non-alphanumerics).
std::string ReplaceWord(std::string_view s, std::string_view word,
                        std::string_view replacement);

// Uppercases the first character.
std::string Capitalize(std::string s);

// 64-bit FNV-1a. Stable across platforms, used for seed derivation only.
uint64_t Fnv1a64(std::string_view s);

// splitmix64 finalizer.
uint64_t MixBits(uint64_t x);

// Per-sample seed derived from the run's root seed, the prompt and the sample
// index, so that the order in which calls execute never changes outputs.
uint64_t DeriveSeed(uint64_t root, std::string_view prompt, uint64_t index);

}  // namespace selftalk

#endif  // SELFTALK_TEXT_H_
