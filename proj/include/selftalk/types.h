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

// Value types shared by every stage of the pipeline. All of them are plain
// immutable-after-construction structs and are safe to share across threads.

#ifndef SELFTALK_TYPES_H_
#define SELFTALK_TYPES_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace selftalk {

using Json = nlohmann::json;

enum class TaskId {
  kCopa,
  kCommonsenseQa,
  kMcTaco,
  kSocialIqa,
  kPiqa,
  kWinogrande,
  kCustom,
};

std::string TaskIdName(TaskId id);
TaskId ParseTaskId(const std::string &name);

// One multiple-choice item.
struct Instance {
  std::string id;
  std::optional<std::string> context;
  std::optional<std::string> question;
  std::optional<std::string> question_kind;  // e.g. "cause" / "effect"
  std::vector<std::string> choices;
  std::optional<int> gold;

  // Throws DatasetError if choices are empty/blank or gold is out of range.
  void Validate() const;

  bool operator==(const Instance &) const = default;
};

struct PrefixPair {
  std::string question_prefix;
  std::string answer_prefix_template;  // `_` marks the question body

  bool operator==(const PrefixPair &) const = default;
};

// Per-task prompt configuration, loaded from data/tasks/<task>.json.
struct TaskSpec {
  TaskId task_id = TaskId::kCustom;
  std::string name;
  // question_kind (or "default") -> template with [context], [question],
  // [choice], [blank_prefix], [blank_suffix] slots.
  std::map<std::string, std::string> combine_templates;
  std::vector<PrefixPair> prefix_pairs;
  std::optional<std::string> placeholder_token;
  // Word in prefix tables that stands for the instance's syntactic subject.
  std::optional<std::string> subject_placeholder;
  // Exchange the cause/effect templates (COPA).
  bool copa_swap_templates = false;

  void Validate() const;
  // Validation plus the self-talk requirement of a non-empty prefix table.
  void ValidateForSelfTalk() const;

  bool operator==(const TaskSpec &) const = default;
};

enum class ClarificationSource {
  kSelfTalk,
  kConceptNet,
  kNgrams,
  kGenerativeKb,
  kStatic,
};

std::string SourceName(ClarificationSource source);
ClarificationSource ParseSource(const std::string &name);

struct Clarification {
  std::string text;
  ClarificationSource source = ClarificationSource::kStatic;
  std::optional<std::string> question_text;
  std::optional<std::string> question_prefix;
  std::optional<std::string> answer_prefix;
  // For self-talk, the continuation including its leading separator, so that
  // text == *answer_prefix + *raw_generation.
  std::optional<std::string> raw_generation;

  bool operator==(const Clarification &) const = default;
};

struct ChoiceScore {
  int choice_index = 0;
  double score = 0.0;  // bits per token
  // Index into the clarification list the prediction was computed from; absent
  // for baseline scoring and when the bare option scored best.
  std::optional<int> best_clarification;
  std::optional<Clarification> clarification;

  bool operator==(const ChoiceScore &) const = default;
};

enum class PredictionMode { kBaseline, kClarified };

struct Prediction {
  std::string instance_id;
  std::vector<ChoiceScore> choice_scores;
  int predicted = 0;
  PredictionMode mode = PredictionMode::kBaseline;
  // Clarified scoring that had nothing to score and used the baseline path.
  bool fallback = false;

  bool operator==(const Prediction &) const = default;
};

// Index of the minimal score, lowest index on ties.
int ArgMinScore(const std::vector<ChoiceScore> &scores);

void to_json(Json &j, const Instance &v);
void from_json(const Json &j, Instance &v);
void to_json(Json &j, const PrefixPair &v);
void from_json(const Json &j, PrefixPair &v);
void to_json(Json &j, const TaskSpec &v);
void from_json(const Json &j, TaskSpec &v);
void to_json(Json &j, const Clarification &v);
void from_json(const Json &j, Clarification &v);
void to_json(Json &j, const ChoiceScore &v);
void from_json(const Json &j, ChoiceScore &v);
void to_json(Json &j, const Prediction &v);
void from_json(const Json &j, Prediction &v);

}  // namespace selftalk

#endif  // SELFTALK_TYPES_H_
