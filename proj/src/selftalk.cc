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

#include "selftalk/selftalk.h"

#include <algorithm>
#include <cctype>
#include <exception>
#include <optional>
#include <unordered_set>

#include <omp.h>

#include "selftalk/combine.h"
#include "selftalk/errors.h"
#include "selftalk/terms.h"
#include "selftalk/text.h"

namespace selftalk {

namespace {

std::string Wildcard(const TaskSpec &spec) {
  return spec.subject_placeholder.value_or("");
}

bool HasWildcard(std::string_view pattern, const std::string &wildcard) {
  return !wildcard.empty() &&
         ReplaceWord(pattern, wildcard, "\x01") != std::string(pattern);
}

bool IsCompleteQuestion(std::string_view prefix) {
  std::string p = Trim(prefix);
  return !p.empty() && p.back() == '?';
}

// Words of the question matched by the wildcard of `pattern`.
std::optional<std::string> MatchedSubject(std::string_view pattern,
                                          std::string_view text,
                                          const std::string &wildcard) {
  std::optional<std::string> matched = MatchPrefixPattern(pattern, text, wildcard);
  if (!matched) return std::nullopt;
  std::string pat = Trim(pattern);
  std::string marked = ReplaceWord(pat, wildcard, "\x01");
  size_t pos = marked.find('\x01');
  if (pos == std::string::npos) return std::nullopt;
  size_t post = marked.size() - pos - 1;
  return Trim(std::string_view(*matched).substr(pos, matched->size() - pos - post));
}

std::string CutAfterFirst(std::string text, std::string_view chars) {
  size_t pos = text.find_first_of(chars);
  if (pos != std::string::npos) text.resize(pos + 1);
  return text;
}

// Runs body(i) for i in [0, n) and keeps the first exception.
template <typename Fn>
void ForEachIndex(int n, Execution exec, int max_concurrency, Fn body) {
  if (exec == Execution::kSerial || omp_in_parallel() || n < 2) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  const int threads = std::max(1, std::min(omp_get_max_threads(), max_concurrency));
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(selftalk_generation_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

bool HasControlChars(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) {
    return std::iscntrl(static_cast<unsigned char>(c));
  });
}

int CountWords(std::string_view s) {
  int n = 0;
  for (const auto &w : SplitWords(s)) {
    if (std::any_of(w.begin(), w.end(), [](char c) {
          return std::isalnum(static_cast<unsigned char>(c));
        })) {
      ++n;
    }
  }
  return n;
}

bool Balanced(std::string_view s) {
  if (std::count(s.begin(), s.end(), '"') % 2 != 0) return false;
  std::string stack;
  for (char c : s) {
    if (c == '(' || c == '[' || c == '{') {
      stack.push_back(c);
    } else if (c == ')' || c == ']' || c == '}') {
      char open = c == ')' ? '(' : (c == ']' ? '[' : '{');
      if (stack.empty() || stack.back() != open) return false;
      stack.pop_back();
    }
  }
  return stack.empty();
}

}  // namespace

void SelfTalkConfig::Validate() const {
  auto valid_p = [](double p) { return p > 0.0 && p <= 1.0; };
  if (!valid_p(question_top_p) || !valid_p(answer_top_p)) {
    throw ConfigError("self-talk top_p values must lie in (0, 1]");
  }
  if (question_max_new_tokens < 1 || questions_per_prefix < 1 ||
      answer_max_new_tokens < 1 || answers_per_question < 1) {
    throw ConfigError("self-talk counts must be at least 1");
  }
}

void to_json(Json &j, const SelfTalkConfig &v) {
  j = Json{{"question_top_p", v.question_top_p},
           {"question_max_new_tokens", v.question_max_new_tokens},
           {"questions_per_prefix", v.questions_per_prefix},
           {"answer_top_p", v.answer_top_p},
           {"answer_max_new_tokens", v.answer_max_new_tokens},
           {"answers_per_question", v.answers_per_question},
           {"reuse_instance_question", v.reuse_instance_question}};
}

void from_json(const Json &j, SelfTalkConfig &v) {
  SelfTalkConfig d;
  v.question_top_p = j.value("question_top_p", d.question_top_p);
  v.question_max_new_tokens = j.value("question_max_new_tokens", d.question_max_new_tokens);
  v.questions_per_prefix = j.value("questions_per_prefix", d.questions_per_prefix);
  v.answer_top_p = j.value("answer_top_p", d.answer_top_p);
  v.answer_max_new_tokens = j.value("answer_max_new_tokens", d.answer_max_new_tokens);
  v.answers_per_question = j.value("answers_per_question", d.answers_per_question);
  v.reuse_instance_question = j.value("reuse_instance_question", d.reuse_instance_question);
}

bool IsWellFormedQuestion(std::string_view text, std::string_view prefix,
                          std::string_view wildcard) {
  std::string q = Trim(text);
  std::string p = Trim(prefix);
  if (q.empty() || HasControlChars(q)) return false;
  if (q.back() != '?' || std::count(q.begin(), q.end(), '?') != 1) return false;
  std::optional<std::string> matched = MatchPrefixPattern(p, q, wildcard);
  if (!matched) return false;
  if (IsCompleteQuestion(p)) return *matched == q;
  std::string rest = q.substr(matched->size());
  return CountWords(rest) >= 1;
}

bool IsWellFormedClarification(std::string_view text,
                               std::string_view answer_prefix,
                               std::string_view context,
                               bool budget_exhausted) {
  std::string t = Trim(text);
  std::string p = Trim(answer_prefix);
  if (t.empty() || HasControlChars(t)) return false;
  if (!StartsWith(ToLower(t), ToLower(p))) return false;
  if (!IsSentenceTerminator(t.back()) && !budget_exhausted) return false;
  if (CountWords(std::string_view(t).substr(p.size())) < 2) return false;
  if (NormalizeForDedup(t) == NormalizeForDedup(context)) return false;
  return Balanced(t);
}

std::string ResolveAnswerPrefix(const TaskSpec &spec,
                                std::string_view question_prefix,
                                std::string_view question_text) {
  const PrefixPair *pair = nullptr;
  for (const auto &pp : spec.prefix_pairs) {
    if (pp.question_prefix == question_prefix) {
      pair = &pp;
      break;
    }
  }
  if (pair == nullptr) {
    if (question_prefix == kFallbackQuestionPrefix) {
      return std::string(kFallbackAnswerPrefix);
    }
    throw PrefixMismatchError("prefix '" + std::string(question_prefix) +
                              "' is not in the " + spec.name + " prefix table");
  }
  const std::string wildcard = Wildcard(spec);
  std::string tmpl = pair->answer_prefix_template;
  if (HasWildcard(pair->question_prefix, wildcard)) {
    std::optional<std::string> subject =
        MatchedSubject(pair->question_prefix, question_text, wildcard);
    if (!subject) {
      throw PrefixMismatchError("question '" + std::string(question_text) +
                                "' does not match '" + pair->question_prefix + "'");
    }
    tmpl = ReplaceWord(tmpl, wildcard, *subject);
  }
  if (IsCompleteQuestion(pair->question_prefix)) {
    if (!MatchPrefixPattern(pair->question_prefix, question_text, wildcard)) {
      throw PrefixMismatchError("question '" + std::string(question_text) +
                                "' does not match '" + pair->question_prefix + "'");
    }
    return tmpl;
  }
  return SubstituteAnswerPrefix(pair->question_prefix, question_text, tmpl);
}

std::vector<GeneratedQuestion> GenerateQuestions(
    const LMBackend &generator, const TaskSpec &spec, const Instance &inst,
    const SelfTalkConfig &cfg, uint64_t seed, Execution exec) {
  spec.ValidateForSelfTalk();
  cfg.Validate();
  const std::string context = GenerationContext(inst);
  const std::string wildcard = Wildcard(spec);
  const std::optional<std::string> subject =
      wildcard.empty() ? std::nullopt : ExtractSubject(inst.context.value_or(""));

  const int n = static_cast<int>(spec.prefix_pairs.size());
  std::vector<std::vector<GeneratedQuestion>> per_prefix(n);
  ForEachIndex(n, exec, generator.descriptor().max_concurrency, [&](int i) {
    const std::string &prefix = spec.prefix_pairs[i].question_prefix;
    if (IsCompleteQuestion(prefix)) {
      std::string q = Trim(prefix);
      if (subject && HasWildcard(q, wildcard)) q = ReplaceWord(q, wildcard, *subject);
      if (IsWellFormedQuestion(q, prefix, wildcard)) {
        per_prefix[i].push_back({prefix, q, false});
      }
      return;
    }
    SamplingParams params;
    params.top_p = cfg.question_top_p;
    params.max_new_tokens = cfg.question_max_new_tokens;
    params.num_samples = cfg.questions_per_prefix;
    params.seed = seed;
    params.stop_sequences = {"?"};
    for (const auto &cont :
         generator.SampleContinuations(JoinText(context, prefix), params)) {
      std::string q = CutAfterFirst(JoinText(prefix, cont), "?");
      if (IsWellFormedQuestion(q, prefix, wildcard)) {
        per_prefix[i].push_back({prefix, q, false});
      }
    }
  });

  std::vector<GeneratedQuestion> out;
  std::unordered_set<std::string> seen;
  auto add = [&](GeneratedQuestion q) {
    if (seen.insert(NormalizeForDedup(q.question_text)).second) {
      out.push_back(std::move(q));
    }
  };
  if (cfg.reuse_instance_question && inst.question && !Trim(*inst.question).empty()) {
    std::string q = CutAfterFirst(Trim(*inst.question), "?");
    // Longest matching prefix-table entry; the generic pair otherwise.
    std::string best(kFallbackQuestionPrefix);
    size_t best_len = 0;
    for (const auto &pp : spec.prefix_pairs) {
      std::optional<std::string> m = MatchPrefixPattern(pp.question_prefix, q, wildcard);
      if (!m) continue;
      if (IsCompleteQuestion(pp.question_prefix) && *m != q) continue;
      if (!IsCompleteQuestion(pp.question_prefix) &&
          !IsWellFormedQuestion(q, pp.question_prefix, wildcard)) {
        continue;
      }
      if (Trim(pp.question_prefix).size() > best_len) {
        best = pp.question_prefix;
        best_len = Trim(pp.question_prefix).size();
      }
    }
    add({best, q, true});
  }
  for (auto &qs : per_prefix) {
    for (auto &q : qs) add(std::move(q));
  }
  return out;
}

std::vector<Clarification> GenerateAnswers(
    const LMBackend &generator, const TaskSpec &spec, const Instance &inst,
    std::string_view question_prefix, std::string_view question_text,
    const SelfTalkConfig &cfg, uint64_t seed) {
  cfg.Validate();
  const std::string answer_prefix =
      ResolveAnswerPrefix(spec, question_prefix, question_text);
  const std::string context = GenerationContext(inst);
  const std::string prompt = JoinText(JoinText(context, question_text), answer_prefix);

  SamplingParams params;
  params.top_p = cfg.answer_top_p;
  params.max_new_tokens = cfg.answer_max_new_tokens;
  params.num_samples = cfg.answers_per_question;
  params.seed = seed;
  params.stop_sequences = {".", "!", "?"};

  std::vector<Clarification> out;
  std::unordered_set<std::string> seen;
  for (const auto &raw_cont : generator.SampleContinuations(prompt, params)) {
    std::string cont = CutAfterFirst(Trim(raw_cont), ".!?");
    if (cont.empty()) continue;
    const bool terminated = IsSentenceTerminator(cont.back());
    const bool exhausted =
        !terminated &&
        static_cast<int>(ToyTokenize(cont).size()) >= cfg.answer_max_new_tokens;
    std::string text = JoinText(answer_prefix, cont);
    if (!IsWellFormedClarification(text, answer_prefix, inst.context.value_or(""),
                                   exhausted)) {
      continue;
    }
    if (!seen.insert(NormalizeForDedup(text)).second) continue;
    Clarification c;
    c.text = text;
    c.source = ClarificationSource::kSelfTalk;
    c.question_text = std::string(question_text);
    c.question_prefix = std::string(question_prefix);
    c.answer_prefix = answer_prefix;
    c.raw_generation = text.substr(answer_prefix.size());
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Clarification> GenerateClarifications(
    const LMBackend &generator, const TaskSpec &spec, const Instance &inst,
    const SelfTalkConfig &cfg, uint64_t seed, Execution exec) {
  const std::vector<GeneratedQuestion> questions =
      GenerateQuestions(generator, spec, inst, cfg, seed, exec);
  const int n = static_cast<int>(questions.size());
  std::vector<std::vector<Clarification>> per_question(n);
  ForEachIndex(n, exec, generator.descriptor().max_concurrency, [&](int i) {
    per_question[i] = GenerateAnswers(generator, spec, inst,
                                      questions[i].question_prefix,
                                      questions[i].question_text, cfg, seed);
  });
  std::vector<Clarification> out;
  std::unordered_set<std::string> seen;
  for (auto &cs : per_question) {
    for (auto &c : cs) {
      if (seen.insert(NormalizeForDedup(c.text)).second) out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace selftalk
