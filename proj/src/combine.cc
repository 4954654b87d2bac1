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

#include "selftalk/combine.h"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <vector>

#include "selftalk/errors.h"
#include "selftalk/text.h"

namespace selftalk {

namespace {

enum class Slot { kNone, kContext, kQuestion, kChoice, kBlankPrefix, kBlankSuffix };

struct Segment {
  Slot slot = Slot::kNone;
  std::string text;  // literal text when slot == kNone
};

Slot ParseSlot(const std::string &name) {
  if (name == "context") return Slot::kContext;
  if (name == "question") return Slot::kQuestion;
  if (name == "choice") return Slot::kChoice;
  if (name == "blank_prefix") return Slot::kBlankPrefix;
  if (name == "blank_suffix") return Slot::kBlankSuffix;
  throw TemplateError("unresolved slot [" + name + "]");
}

std::vector<Segment> ParseTemplate(const std::string &tmpl) {
  std::vector<Segment> segments;
  size_t pos = 0;
  while (pos < tmpl.size()) {
    size_t open = tmpl.find('[', pos);
    if (open == std::string::npos) {
      segments.push_back({Slot::kNone, tmpl.substr(pos)});
      break;
    }
    size_t close = tmpl.find(']', open);
    if (close == std::string::npos) {
      throw TemplateError("unterminated slot in template '" + tmpl + "'");
    }
    if (open > pos) segments.push_back({Slot::kNone, tmpl.substr(pos, open - pos)});
    segments.push_back({ParseSlot(tmpl.substr(open + 1, close - open - 1)), {}});
    pos = close + 1;
  }
  return segments;
}

struct BlankSplit {
  std::string prefix;
  std::string suffix;
};

BlankSplit SplitAtPlaceholder(const TaskSpec &spec, const Instance &inst) {
  if (!spec.placeholder_token || spec.placeholder_token->empty()) {
    throw TemplateError("task " + spec.name +
                        " uses blank slots but declares no placeholder token");
  }
  const std::string &token = *spec.placeholder_token;
  const std::string context = inst.context.value_or("");
  size_t pos = context.find(token);
  if (pos == std::string::npos) {
    throw PlaceholderError("instance " + inst.id + ": context has no '" +
                           token + "' placeholder");
  }
  // A run of repeated placeholder tokens ("____") is one blank.
  size_t end = pos + token.size();
  while (context.compare(end, token.size(), token) == 0) end += token.size();
  return {Trim(context.substr(0, pos)), context.substr(end)};
}

bool IsArticle(const std::string &word) {
  std::string w = ToLower(word);
  return w == "a" || w == "an" || w == "the";
}

bool IsWordChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '\'';
}

// Case-insensitive prefix test that also requires a word boundary.
bool StartsWithWords(std::string_view text, std::string_view prefix) {
  if (text.size() < prefix.size()) return false;
  if (ToLower(text.substr(0, prefix.size())) != ToLower(prefix)) return false;
  if (text.size() == prefix.size() || prefix.empty()) return true;
  return !(IsWordChar(prefix.back()) && IsWordChar(text[prefix.size()]));
}

}  // namespace

std::string CombinedText::Full() const { return JoinText(head, tail); }

const std::string &SelectTemplate(const TaskSpec &spec, const Instance &inst) {
  std::string kind = inst.question_kind.value_or("default");
  if (spec.copa_swap_templates) {
    if (kind == "cause") {
      kind = "effect";
    } else if (kind == "effect") {
      kind = "cause";
    }
  }
  auto it = spec.combine_templates.find(kind);
  if (it == spec.combine_templates.end()) {
    it = spec.combine_templates.find("default");
  }
  if (it == spec.combine_templates.end()) {
    throw TemplateError("task " + spec.name + " has no template for kind '" +
                        kind + "'");
  }
  return it->second;
}

CombinedText CombineParts(const TaskSpec &spec, const Instance &inst,
                          int choice_index) {
  if (choice_index < 0 || choice_index >= static_cast<int>(inst.choices.size())) {
    throw std::out_of_range("choice index " + std::to_string(choice_index) +
                            " out of range for instance " + inst.id);
  }
  const std::vector<Segment> segments = ParseTemplate(SelectTemplate(spec, inst));

  int anchor = -1;
  for (size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].slot == Slot::kContext ||
        segments[i].slot == Slot::kBlankPrefix) {
      anchor = static_cast<int>(i);
      break;
    }
  }

  std::optional<BlankSplit> blank;
  auto get_blank = [&]() -> const BlankSplit & {
    if (!blank) blank = SplitAtPlaceholder(spec, inst);
    return *blank;
  };
  auto content_after = [&](size_t i) {
    for (size_t j = i + 1; j < segments.size(); ++j) {
      if (segments[j].slot != Slot::kNone) return true;
      std::string t = Trim(segments[j].text);
      if (!t.empty() && t != ".") return true;
    }
    return false;
  };

  std::string head;
  std::string tail;
  bool strip_period = false;
  for (size_t i = 0; i < segments.size(); ++i) {
    const Segment &seg = segments[i];
    std::string piece;
    switch (seg.slot) {
      case Slot::kNone:
        piece = seg.text;
        if (strip_period) {
          size_t first = piece.find_first_not_of(" \t");
          if (first != std::string::npos && piece[first] == '.') {
            piece.erase(first, 1);
          }
        }
        break;
      case Slot::kContext: {
        // The context carries its own terminal period; a literal period that
        // follows the slot in the template is dropped.
        piece = CollapseWhitespace(inst.context.value_or(""));
        if (!piece.empty() && !IsSentenceTerminator(piece.back()) &&
            content_after(i)) {
          piece.push_back('.');
        }
        break;
      }
      case Slot::kQuestion:
        if (!inst.question) {
          throw TemplateError("instance " + inst.id +
                              ": unresolved slot [question]");
        }
        piece = CollapseWhitespace(*inst.question);
        break;
      case Slot::kChoice:
        piece = CollapseWhitespace(inst.choices[choice_index]);
        break;
      case Slot::kBlankPrefix:
        piece = get_blank().prefix;
        break;
      case Slot::kBlankSuffix:
        piece = get_blank().suffix;
        break;
    }
    strip_period = seg.slot == Slot::kContext;
    if (static_cast<int>(i) <= anchor) {
      head += piece;
    } else {
      tail += piece;
    }
  }
  return {CollapseWhitespace(head), CollapseWhitespace(tail)};
}

std::string Combine(const TaskSpec &spec, const Instance &inst,
                    int choice_index) {
  return CombineParts(spec, inst, choice_index).Full();
}

std::string SubstituteAnswerPrefix(std::string_view question_prefix,
                                   std::string_view generated_question,
                                   std::string_view answer_prefix_template) {
  std::string tmpl(answer_prefix_template);
  size_t blank = tmpl.find('_');
  if (blank == std::string::npos) return tmpl;

  std::string prefix = Trim(question_prefix);
  std::string question = Trim(generated_question);
  if (!StartsWithWords(question, prefix)) {
    throw PrefixMismatchError("question '" + question +
                              "' does not start with prefix '" + prefix + "'");
  }
  if (question.empty() || question.back() != '?' ||
      std::count(question.begin(), question.end(), '?') != 1) {
    throw PrefixMismatchError("question '" + question +
                              "' must end with exactly one '?'");
  }
  std::string body = Trim(std::string_view(question).substr(
      prefix.size(), question.size() - prefix.size() - 1));
  if (body.empty()) {
    throw PrefixMismatchError("question '" + question + "' has no body");
  }

  std::vector<std::string> prefix_words = SplitWords(prefix);
  if (!prefix_words.empty() && IsArticle(prefix_words.back())) {
    std::string article = ToLower(prefix_words.back());
    std::string lower_tmpl = ToLower(tmpl);
    bool has_article = blank >= article.size() + 1 &&
                       lower_tmpl.compare(blank - article.size() - 1,
                                          article.size() + 1, article + " ") == 0;
    if (!has_article) body = article + " " + body;
  }
  tmpl.replace(blank, 1, body);
  return CollapseWhitespace(tmpl);
}

std::optional<std::string> MatchPrefixPattern(std::string_view pattern,
                                              std::string_view text,
                                              std::string_view wildcard) {
  std::string pat = Trim(pattern);
  std::string txt = Trim(text);

  size_t wpos = std::string::npos;
  if (!wildcard.empty()) {
    size_t search = 0;
    while ((search = pat.find(wildcard, search)) != std::string::npos) {
      bool left = search == 0 || !IsWordChar(pat[search - 1]);
      size_t after = search + wildcard.size();
      bool right = after >= pat.size() || !IsWordChar(pat[after]);
      if (left && right) {
        wpos = search;
        break;
      }
      search = after;
    }
  }
  if (wpos == std::string::npos) {
    if (StartsWithWords(txt, pat)) return txt.substr(0, pat.size());
    return std::nullopt;
  }

  std::string pre = pat.substr(0, wpos);
  std::string post = pat.substr(wpos + wildcard.size());
  if (ToLower(std::string_view(txt).substr(0, pre.size())) != ToLower(pre)) {
    return std::nullopt;
  }
  size_t start = pre.size();
  if (post.empty()) {
    // The wildcard takes the next word.
    size_t end = start;
    while (end < txt.size() && IsWordChar(txt[end])) ++end;
    if (end == start) return std::nullopt;
    return txt.substr(0, end);
  }
  std::string lower_txt = ToLower(txt);
  std::string lower_post = ToLower(post);
  for (size_t k = start + 1; k + post.size() <= txt.size(); ++k) {
    if (lower_txt.compare(k, post.size(), lower_post) != 0) continue;
    std::string filler = Trim(std::string_view(txt).substr(start, k - start));
    if (filler.empty()) continue;
    if (!IsWordChar(txt[k - 1]) && txt[k - 1] != ' ') continue;
    size_t end = k + post.size();
    if (end < txt.size() && IsWordChar(post.back()) && IsWordChar(txt[end])) {
      continue;
    }
    return txt.substr(0, end);
  }
  return std::nullopt;
}

std::string GenerationContext(const Instance &inst) {
  return JoinText(inst.context.value_or(""), inst.question.value_or(""));
}

}  // namespace selftalk
