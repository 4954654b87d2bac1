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

#include "selftalk/scorer.h"

#include <algorithm>
#include <exception>
#include <unordered_set>

#include <omp.h>

#include "selftalk/combine.h"
#include "selftalk/errors.h"
#include "selftalk/text.h"

namespace selftalk {

namespace {

void RequireChoices(const Instance &inst) {
  inst.Validate();
  if (inst.choices.size() < 2) {
    throw DatasetError("instance " + inst.id + " needs at least two choices");
  }
}

}  // namespace

std::string PlacementName(Placement p) {
  return p == Placement::kAfterContext ? "after_context" : "appended_after_option";
}

Placement ParsePlacement(const std::string &name) {
  if (name == "after_context") return Placement::kAfterContext;
  if (name == "appended" || name == "appended_after_option") {
    return Placement::kAppendedAfterOption;
  }
  throw ConfigError("unknown placement '" + name + "'");
}

std::string AssembleScoredText(const TaskSpec &spec, const Instance &inst,
                               int choice_index, const Clarification &clar,
                               const ScoringConfig &cfg) {
  CombinedText parts = CombineParts(spec, inst, choice_index);
  if (cfg.placement == Placement::kAppendedAfterOption) {
    return JoinText(parts.Full(), clar.text);
  }
  return JoinText(JoinText(parts.head, clar.text), parts.tail);
}

std::vector<double> CrossEntropySerial(const LMBackend &backend,
                                       const std::vector<std::string> &texts) {
  std::vector<double> out(texts.size());
  for (size_t i = 0; i < texts.size(); ++i) out[i] = CrossEntropy(backend, texts[i]);
  return out;
}

std::vector<double> CrossEntropyParallel(const LMBackend &backend,
                                         const std::vector<std::string> &texts) {
  // Nested regions would oversubscribe; callers already fanning out over
  // instances get the serial kernel.
  if (omp_in_parallel() || texts.size() < 2) return CrossEntropySerial(backend, texts);
  const int threads = std::max(
      1, std::min(omp_get_max_threads(), backend.descriptor().max_concurrency));
  std::vector<double> out(texts.size());
  std::exception_ptr error;
  const long n = static_cast<long>(texts.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = CrossEntropy(backend, texts[i]);
    } catch (...) {
#pragma omp critical(selftalk_scorer_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

std::vector<double> CrossEntropyBatch(const LMBackend &backend,
                                      const std::vector<std::string> &texts,
                                      Execution exec) {
  return exec == Execution::kSerial ? CrossEntropySerial(backend, texts)
                                    : CrossEntropyParallel(backend, texts);
}

Prediction ScoreBaseline(const LMBackend &backend, const TaskSpec &spec,
                         const Instance &inst, Execution exec) {
  RequireChoices(inst);
  std::vector<std::string> texts;
  for (size_t i = 0; i < inst.choices.size(); ++i) {
    texts.push_back(Combine(spec, inst, static_cast<int>(i)));
  }
  std::vector<double> ce = CrossEntropyBatch(backend, texts, exec);
  Prediction pred;
  pred.instance_id = inst.id;
  pred.mode = PredictionMode::kBaseline;
  for (size_t i = 0; i < ce.size(); ++i) {
    pred.choice_scores.push_back({static_cast<int>(i), ce[i], std::nullopt, std::nullopt});
  }
  pred.predicted = ArgMinScore(pred.choice_scores);
  return pred;
}

Prediction ScoreWithClarifications(const LMBackend &backend,
                                   const TaskSpec &spec, const Instance &inst,
                                   const std::vector<Clarification> &clarifications,
                                   const ScoringConfig &cfg) {
  RequireChoices(inst);
  std::vector<int> unique;
  std::unordered_set<std::string> seen;
  for (size_t j = 0; j < clarifications.size(); ++j) {
    if (Trim(clarifications[j].text).empty()) continue;
    if (seen.insert(NormalizeForDedup(clarifications[j].text)).second) {
      unique.push_back(static_cast<int>(j));
    }
  }
  if (unique.empty() && !cfg.include_bare_option) {
    Prediction pred = ScoreBaseline(backend, spec, inst, cfg.execution);
    pred.mode = PredictionMode::kClarified;
    pred.fallback = true;
    return pred;
  }

  // Candidate order per choice: bare option first, then clarifications by
  // index. The reduction keeps the first minimum, so ties go to the bare
  // option and then to the lowest clarification index.
  const int k = static_cast<int>(inst.choices.size());
  const int per_choice = static_cast<int>(unique.size()) + (cfg.include_bare_option ? 1 : 0);
  std::vector<std::string> texts;
  texts.reserve(static_cast<size_t>(k) * per_choice);
  for (int i = 0; i < k; ++i) {
    if (cfg.include_bare_option) texts.push_back(Combine(spec, inst, i));
    for (int j : unique) {
      texts.push_back(AssembleScoredText(spec, inst, i, clarifications[j], cfg));
    }
  }
  std::vector<double> ce = CrossEntropyBatch(backend, texts, cfg.execution);

  Prediction pred;
  pred.instance_id = inst.id;
  pred.mode = PredictionMode::kClarified;
  for (int i = 0; i < k; ++i) {
    const size_t base = static_cast<size_t>(i) * per_choice;
    size_t best = 0;
    for (size_t c = 1; c < static_cast<size_t>(per_choice); ++c) {
      if (ce[base + c] < ce[base + best]) best = c;
    }
    ChoiceScore cs;
    cs.choice_index = i;
    cs.score = ce[base + best];
    const int clar_slot = static_cast<int>(best) - (cfg.include_bare_option ? 1 : 0);
    if (clar_slot >= 0) {
      cs.best_clarification = unique[clar_slot];
      cs.clarification = clarifications[unique[clar_slot]];
    }
    pred.choice_scores.push_back(std::move(cs));
  }
  pred.predicted = ArgMinScore(pred.choice_scores);
  return pred;
}

}  // namespace selftalk
