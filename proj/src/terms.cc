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

#include "selftalk/terms.h"

#include <cctype>
#include <unordered_set>

#include "selftalk/combine.h"
#include "selftalk/text.h"

namespace selftalk {

namespace {

const std::unordered_set<std::string> &Stopwords() {
  static const auto *words = new std::unordered_set<std::string>{
      "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you",
      "you're", "you've", "you'll", "you'd", "your", "yours", "yourself",
      "yourselves", "he", "him", "his", "himself", "she", "she's", "her",
      "hers", "herself", "it", "it's", "its", "itself", "they", "them",
      "their", "theirs", "themselves", "what", "which", "who", "whom", "this",
      "that", "that'll", "these", "those", "am", "is", "are", "was", "were",
      "be", "been", "being", "have", "has", "had", "having", "do", "does",
      "did", "doing", "a", "an", "the", "and", "but", "if", "or", "because",
      "as", "until", "while", "of", "at", "by", "for", "with", "about",
      "against", "between", "into", "through", "during", "before", "after",
      "above", "below", "to", "from", "up", "down", "in", "out", "on", "off",
      "over", "under", "again", "further", "then", "once", "here", "there",
      "when", "where", "why", "how", "all", "any", "both", "each", "few",
      "more", "most", "other", "some", "such", "no", "nor", "not", "only",
      "own", "same", "so", "than", "too", "very", "s", "t", "can", "will",
      "just", "don", "don't", "should", "should've", "now", "d", "ll", "m",
      "o", "re", "ve", "y", "ain", "aren", "aren't", "couldn", "couldn't",
      "didn", "didn't", "doesn", "doesn't", "hadn", "hadn't", "hasn",
      "hasn't", "haven", "haven't", "isn", "isn't", "ma", "mightn",
      "mightn't", "mustn", "mustn't", "needn", "needn't", "shan", "shan't",
      "shouldn", "shouldn't", "wasn", "wasn't", "weren", "weren't", "won",
      "won't", "wouldn", "wouldn't", "also"};
  return *words;
}

// Auxiliaries and common irregular past forms.
const std::unordered_set<std::string> &FiniteVerbs() {
  static const auto *words = new std::unordered_set<std::string>{
      "is", "was", "are", "were", "am", "has", "had", "have", "does", "did",
      "do", "will", "would", "can", "could", "should", "may", "might", "must",
      "shall", "went", "got", "made", "took", "gave", "came", "saw", "knew",
      "found", "told", "felt", "left", "kept", "brought", "bought", "thought",
      "began", "ran", "fell", "broke", "wrote", "drove", "ate", "drank",
      "sat", "stood", "held", "heard", "met", "paid", "said", "sent", "spent",
      "taught", "won", "lost", "threw", "wore", "woke", "fought", "caught",
      "sold", "built", "put", "let", "set", "cut", "hit", "hurt", "read",
      "became", "chose", "forgot", "grew", "hid", "led", "lent", "rode",
      "rose", "sang", "slept", "spoke", "stole", "swam", "tore", "understood",
      "wants", "needs", "gets", "goes", "makes", "takes", "gives", "loves",
      "likes", "decides", "tries", "asks", "tells"};
  return *words;
}

bool IsDeterminer(const std::string &w) {
  return w == "a" || w == "an" || w == "the" || w == "my" || w == "his" ||
         w == "her" || w == "their" || w == "our" || w == "your" ||
         w == "this" || w == "that";
}

std::string StripPunct(const std::string &word) {
  size_t b = 0;
  size_t e = word.size();
  while (b < e && !std::isalnum(static_cast<unsigned char>(word[b]))) ++b;
  while (e > b && !std::isalnum(static_cast<unsigned char>(word[e - 1]))) --e;
  return word.substr(b, e - b);
}

}  // namespace

bool IsStopword(std::string_view word) {
  return Stopwords().count(std::string(word)) > 0;
}

std::set<std::string> ContentWords(std::string_view text) {
  std::set<std::string> out;
  std::string lower = ToLower(text);
  std::string word;
  auto flush = [&] {
    while (!word.empty() && word.back() == '\'') word.pop_back();
    while (!word.empty() && word.front() == '\'') word.erase(word.begin());
    if (EndsWith(word, "'s")) word.resize(word.size() - 2);
    if (word.size() >= 3 && !IsStopword(word)) out.insert(word);
    word.clear();
  };
  for (char c : lower) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '\'') {
      word += c;
    } else {
      flush();
    }
  }
  flush();
  return out;
}

TermSets ExtractTerms(const Instance &inst) {
  TermSets terms;
  terms.context_terms = ContentWords(GenerationContext(inst));
  for (const auto &choice : inst.choices) {
    terms.choice_terms.push_back(ContentWords(choice));
  }
  return terms;
}

std::optional<std::string> ExtractSubject(std::string_view text) {
  std::vector<std::string> words;
  for (const auto &raw : SplitWords(text)) {
    std::string w = StripPunct(raw);
    if (w.empty()) continue;
    words.push_back(w);
    if (IsSentenceTerminator(raw.back())) break;
  }
  for (size_t v = 1; v < words.size(); ++v) {
    std::string lw = ToLower(words[v]);
    bool finite = FiniteVerbs().count(lw) > 0 ||
                  (lw.size() > 3 && EndsWith(lw, "ed"));
    if (!finite) continue;
    const std::string &head = words[v - 1];
    if (IsStopword(ToLower(head)) && !IsDeterminer(ToLower(head))) return head;
    if (v <= 3) {
      std::string phrase = words[0];
      for (size_t i = 1; i < v; ++i) phrase += " " + words[i];
      return phrase;
    }
    if (v >= 2 && IsDeterminer(ToLower(words[v - 2]))) {
      return words[v - 2] + " " + head;
    }
    return head;
  }
  return std::nullopt;
}

}  // namespace selftalk
