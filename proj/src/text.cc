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

#include "selftalk/text.h"

#include <cctype>

namespace selftalk {

namespace {

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)); }
bool IsAlnum(char c) { return std::isalnum(static_cast<unsigned char>(c)); }

}  // namespace

std::string Trim(std::string_view s) {
  size_t begin = 0;
  size_t end = s.size();
  while (begin < end && IsSpace(s[begin])) ++begin;
  while (end > begin && IsSpace(s[end - 1])) --end;
  return std::string(s.substr(begin, end - begin));
}

std::string ToLower(std::string_view s) {
  std::string out(s);
  for (char &c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string CollapseWhitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (IsSpace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string NormalizeForDedup(std::string_view s) {
  return ToLower(CollapseWhitespace(s));
}

bool StartsWith(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

bool EndsWith(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

bool IsAttachingPunct(char c) {
  switch (c) {
    case '.':
    case ',':
    case '?':
    case '!':
    case ';':
    case ':':
      return true;
    default:
      return false;
  }
}

bool IsSentenceTerminator(char c) { return c == '.' || c == '!' || c == '?'; }

std::string JoinText(std::string_view left, std::string_view right) {
  std::string l = Trim(left);
  std::string r = Trim(right);
  if (l.empty()) return r;
  if (r.empty()) return l;
  if (IsAttachingPunct(r.front())) return l + r;
  return l + " " + r;
}

std::vector<std::string> ToyTokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (char c : text) {
    if (IsSpace(c)) {
      flush();
    } else if (IsAttachingPunct(c)) {
      flush();
      tokens.emplace_back(1, c);
    } else {
      current.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  flush();
  return tokens;
}

std::string Detokenize(const std::vector<std::string> &tokens) {
  std::string out;
  for (const auto &t : tokens) out = JoinText(out, t);
  return out;
}

std::vector<std::string> SplitWords(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  for (char c : text) {
    if (IsSpace(c)) {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

std::string ReplaceAll(std::string s, std::string_view from,
                       std::string_view to) {
  if (from.empty()) return s;
  size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

std::string ReplaceWord(std::string_view s, std::string_view word,
                        std::string_view replacement) {
  if (word.empty()) return std::string(s);
  std::string out;
  size_t pos = 0;
  while (pos < s.size()) {
    size_t hit = s.find(word, pos);
    if (hit == std::string_view::npos) break;
    bool left_ok = hit == 0 || !IsAlnum(s[hit - 1]);
    size_t after = hit + word.size();
    bool right_ok = after >= s.size() || !IsAlnum(s[after]);
    out.append(s.substr(pos, hit - pos));
    if (left_ok && right_ok) {
      out.append(replacement);
    } else {
      out.append(word);
    }
    pos = after;
  }
  if (pos < s.size()) out.append(s.substr(pos));
  return out;
}

std::string Capitalize(std::string s) {
  if (!s.empty()) {
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  }
  return s;
}

uint64_t Fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

uint64_t MixBits(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t DeriveSeed(uint64_t root, std::string_view prompt, uint64_t index) {
  uint64_t h = MixBits(root);
  h = MixBits(h ^ Fnv1a64(prompt));
  return MixBits(h ^ (index * 0x9e3779b97f4a7c15ULL + 1));
}

}  // namespace selftalk
