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

#include "selftalk/types.h"

#include <array>
#include <utility>

#include "selftalk/errors.h"
#include "selftalk/text.h"

namespace selftalk {

namespace {

const std::array<std::pair<TaskId, const char *>, 7> kTaskNames = {{
    {TaskId::kCopa, "copa"},
    {TaskId::kCommonsenseQa, "commonsenseqa"},
    {TaskId::kMcTaco, "mctaco"},
    {TaskId::kSocialIqa, "socialiqa"},
    {TaskId::kPiqa, "piqa"},
    {TaskId::kWinogrande, "winogrande"},
    {TaskId::kCustom, "custom"},
}};

const std::array<std::pair<ClarificationSource, const char *>, 5> kSourceNames =
    {{
        {ClarificationSource::kSelfTalk, "selftalk"},
        {ClarificationSource::kConceptNet, "conceptnet"},
        {ClarificationSource::kNgrams, "ngrams"},
        {ClarificationSource::kGenerativeKb, "generative_kb"},
        {ClarificationSource::kStatic, "static"},
    }};

template <typename T>
void PutOptional(Json &j, const char *key, const std::optional<T> &v) {
  if (v) j[key] = *v;
}

template <typename T>
void GetOptional(const Json &j, const char *key, std::optional<T> &v) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    v.reset();
  } else {
    v = it->template get<T>();
  }
}

}  // namespace

std::string TaskIdName(TaskId id) {
  for (const auto &[task, name] : kTaskNames) {
    if (task == id) return name;
  }
  return "custom";
}

TaskId ParseTaskId(const std::string &name) {
  std::string lower = ToLower(name);
  for (const auto &[task, task_name] : kTaskNames) {
    if (lower == task_name) return task;
  }
  throw ConfigError("unknown task id '" + name + "'");
}

std::string SourceName(ClarificationSource source) {
  for (const auto &[s, name] : kSourceNames) {
    if (s == source) return name;
  }
  return "static";
}

ClarificationSource ParseSource(const std::string &name) {
  for (const auto &[s, source_name] : kSourceNames) {
    if (name == source_name) return s;
  }
  throw DatasetError("unknown clarification source '" + name + "'");
}

void Instance::Validate() const {
  if (choices.empty()) throw DatasetError("instance " + id + ": no choices");
  for (size_t i = 0; i < choices.size(); ++i) {
    if (Trim(choices[i]).empty()) {
      throw DatasetError("instance " + id + ": choice " + std::to_string(i) +
                         " is blank");
    }
  }
  if (gold && (*gold < 0 || *gold >= static_cast<int>(choices.size()))) {
    throw DatasetError("instance " + id + ": gold index " +
                       std::to_string(*gold) + " out of range");
  }
}

void TaskSpec::Validate() const {
  if (combine_templates.empty()) {
    throw ConfigError("task " + name + ": no combine templates");
  }
  for (const auto &[kind, tmpl] : combine_templates) {
    if (tmpl.find("[choice]") == std::string::npos) {
      throw ConfigError("task " + name + ": template '" + kind +
                        "' lacks the [choice] slot");
    }
  }
  for (const auto &pair : prefix_pairs) {
    if (Trim(pair.question_prefix).empty()) {
      throw ConfigError("task " + name + ": empty question prefix");
    }
  }
}

void TaskSpec::ValidateForSelfTalk() const {
  Validate();
  if (prefix_pairs.empty()) {
    throw ConfigError("task " + name + ": self-talk needs question prefixes");
  }
}

int ArgMinScore(const std::vector<ChoiceScore> &scores) {
  int best = 0;
  for (size_t i = 1; i < scores.size(); ++i) {
    if (scores[i].score < scores[best].score) best = static_cast<int>(i);
  }
  return best;
}

void to_json(Json &j, const Instance &v) {
  j = Json::object();
  j["id"] = v.id;
  PutOptional(j, "context", v.context);
  PutOptional(j, "question", v.question);
  PutOptional(j, "question_kind", v.question_kind);
  j["choices"] = v.choices;
  PutOptional(j, "gold", v.gold);
}

void from_json(const Json &j, Instance &v) {
  const Json &id = j.at("id");
  v.id = id.is_string() ? id.get<std::string>() : id.dump();
  GetOptional(j, "context", v.context);
  GetOptional(j, "question", v.question);
  GetOptional(j, "question_kind", v.question_kind);
  v.choices = j.at("choices").get<std::vector<std::string>>();
  GetOptional(j, "gold", v.gold);
}

void to_json(Json &j, const PrefixPair &v) {
  j = Json{{"question_prefix", v.question_prefix},
           {"answer_prefix_template", v.answer_prefix_template}};
}

void from_json(const Json &j, PrefixPair &v) {
  v.question_prefix = j.at("question_prefix").get<std::string>();
  v.answer_prefix_template = j.at("answer_prefix_template").get<std::string>();
}

void to_json(Json &j, const TaskSpec &v) {
  j = Json::object();
  j["task_id"] = TaskIdName(v.task_id);
  j["name"] = v.name;
  j["combine_templates"] = v.combine_templates;
  j["prefix_pairs"] = v.prefix_pairs;
  PutOptional(j, "placeholder_token", v.placeholder_token);
  PutOptional(j, "subject_placeholder", v.subject_placeholder);
  j["copa_swap_templates"] = v.copa_swap_templates;
}

void from_json(const Json &j, TaskSpec &v) {
  v.task_id = ParseTaskId(j.at("task_id").get<std::string>());
  v.name = j.value("name", TaskIdName(v.task_id));
  v.combine_templates =
      j.at("combine_templates").get<std::map<std::string, std::string>>();
  v.prefix_pairs = j.value("prefix_pairs", std::vector<PrefixPair>{});
  GetOptional(j, "placeholder_token", v.placeholder_token);
  GetOptional(j, "subject_placeholder", v.subject_placeholder);
  v.copa_swap_templates = j.value("copa_swap_templates", false);
}

void to_json(Json &j, const Clarification &v) {
  j = Json::object();
  j["text"] = v.text;
  j["source"] = SourceName(v.source);
  PutOptional(j, "question_text", v.question_text);
  PutOptional(j, "question_prefix", v.question_prefix);
  PutOptional(j, "answer_prefix", v.answer_prefix);
  PutOptional(j, "raw_generation", v.raw_generation);
}

void from_json(const Json &j, Clarification &v) {
  v.text = j.at("text").get<std::string>();
  v.source = ParseSource(j.at("source").get<std::string>());
  GetOptional(j, "question_text", v.question_text);
  GetOptional(j, "question_prefix", v.question_prefix);
  GetOptional(j, "answer_prefix", v.answer_prefix);
  GetOptional(j, "raw_generation", v.raw_generation);
}

void to_json(Json &j, const ChoiceScore &v) {
  j = Json::object();
  j["choice_index"] = v.choice_index;
  j["score"] = v.score;
  PutOptional(j, "best_clarification", v.best_clarification);
  PutOptional(j, "clarification", v.clarification);
}

void from_json(const Json &j, ChoiceScore &v) {
  v.choice_index = j.at("choice_index").get<int>();
  v.score = j.at("score").get<double>();
  GetOptional(j, "best_clarification", v.best_clarification);
  GetOptional(j, "clarification", v.clarification);
}

void to_json(Json &j, const Prediction &v) {
  j = Json::object();
  j["instance_id"] = v.instance_id;
  j["choice_scores"] = v.choice_scores;
  j["predicted"] = v.predicted;
  j["mode"] = v.mode == PredictionMode::kBaseline ? "baseline" : "clarified";
  j["fallback"] = v.fallback;
}

void from_json(const Json &j, Prediction &v) {
  v.instance_id = j.at("instance_id").get<std::string>();
  v.choice_scores = j.at("choice_scores").get<std::vector<ChoiceScore>>();
  v.predicted = j.at("predicted").get<int>();
  std::string mode = j.at("mode").get<std::string>();
  if (mode == "baseline") {
    v.mode = PredictionMode::kBaseline;
  } else if (mode == "clarified") {
    v.mode = PredictionMode::kClarified;
  } else {
    throw DatasetError("unknown prediction mode '" + mode + "'");
  }
  v.fallback = j.value("fallback", false);
}

}  // namespace selftalk
