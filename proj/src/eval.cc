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

#include "selftalk/eval.h"

#include <algorithm>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "selftalk/digest.h"
#include "selftalk/errors.h"
#include "selftalk/nucleus.h"
#include "selftalk/text.h"

namespace selftalk {

namespace {

std::map<std::string, const Instance *> IndexInstances(
    const std::vector<Instance> &instances) {
  std::map<std::string, const Instance *> index;
  for (const auto &inst : instances) index[inst.id] = &inst;
  return index;
}

std::map<std::string, const Prediction *> IndexPredictions(
    const std::vector<Prediction> &preds, const char *what) {
  std::map<std::string, const Prediction *> index;
  for (const auto &p : preds) {
    if (!index.emplace(p.instance_id, &p).second) {
      throw AnalysisError(std::string(what) + " run predicts instance " +
                          p.instance_id + " twice");
    }
  }
  return index;
}

int GoldOf(const std::map<std::string, const Instance *> &index,
           const std::string &id) {
  auto it = index.find(id);
  if (it == index.end()) throw DatasetError("prediction for unknown instance " + id);
  if (!it->second->gold) throw ItemListError("instances without gold", {id});
  return *it->second->gold;
}

std::string Clean(std::string s) {
  for (char &c : s) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

void to_json(Json &j, const EvalResult &v) {
  j = Json{{"task", v.task},
           {"scorer", v.scorer},
           {"generator", v.generator},
           {"knowledge", v.knowledge},
           {"split", v.split},
           {"mode", v.mode == PredictionMode::kBaseline ? "baseline" : "clarified"},
           {"n_instances", v.n_instances},
           {"correct", v.correct},
           {"majority_count", v.majority_count},
           {"accuracy", v.accuracy},
           {"majority_accuracy", v.majority_accuracy},
           {"instance_digest", v.instance_digest},
           {"predicted", v.predicted},
           {"gold", v.gold}};
}

void from_json(const Json &j, EvalResult &v) {
  v.task = j.at("task").get<std::string>();
  v.scorer = j.value("scorer", "");
  v.generator = j.value("generator", "");
  v.knowledge = j.value("knowledge", "none");
  v.split = j.value("split", "dev");
  v.mode = j.value("mode", "baseline") == "clarified" ? PredictionMode::kClarified
                                                       : PredictionMode::kBaseline;
  v.n_instances = j.at("n_instances").get<int>();
  v.correct = j.value("correct", 0);
  v.majority_count = j.value("majority_count", 0);
  v.accuracy = j.at("accuracy").get<double>();
  v.majority_accuracy = j.at("majority_accuracy").get<double>();
  v.instance_digest = j.value("instance_digest", "");
  v.predicted = j.value("predicted", std::map<std::string, int>{});
  v.gold = j.value("gold", std::map<std::string, int>{});
}

EvalResult Evaluate(const std::vector<Prediction> &predictions,
                    const std::vector<Instance> &instances) {
  if (predictions.empty()) throw DatasetError("no predictions to evaluate");
  const auto index = IndexInstances(instances);
  std::vector<std::string> missing;
  EvalResult r;
  std::map<int, int> gold_counts;
  for (const auto &p : predictions) {
    auto it = index.find(p.instance_id);
    if (it == index.end()) {
      throw DatasetError("prediction for unknown instance " + p.instance_id);
    }
    if (!it->second->gold) {
      missing.push_back(p.instance_id);
      continue;
    }
    if (!r.predicted.emplace(p.instance_id, p.predicted).second) {
      throw DatasetError("instance " + p.instance_id + " predicted twice");
    }
    const int gold = *it->second->gold;
    r.gold[p.instance_id] = gold;
    ++gold_counts[gold];
    if (p.predicted == gold) ++r.correct;
    r.mode = p.mode;
  }
  if (!missing.empty()) throw ItemListError("instances without gold", missing);

  r.n_instances = static_cast<int>(predictions.size());
  for (const auto &[g, c] : gold_counts) r.majority_count = std::max(r.majority_count, c);
  r.accuracy = 100.0 * r.correct / r.n_instances;
  r.majority_accuracy = 100.0 * r.majority_count / r.n_instances;
  std::string ids;
  for (const auto &[id, _] : r.gold) ids += id + "\n";
  r.instance_digest = Sha256Hex(ids);
  return r;
}

double RelativeImprovement(const EvalResult &clarified, const EvalResult &baseline) {
  if (clarified.task != baseline.task || clarified.split != baseline.split) {
    throw AnalysisError("relative improvement needs the same task and split");
  }
  if (clarified.n_instances != baseline.n_instances ||
      clarified.instance_digest != baseline.instance_digest) {
    throw AnalysisError("relative improvement needs the same instance set");
  }
  return clarified.accuracy - baseline.accuracy;
}

std::string FlipKindName(FlipKind kind) {
  return kind == FlipKind::kUseful ? "useful" : "harmful";
}

void to_json(Json &j, const ClarificationJudgment &v) {
  j = Json{{"instance_id", v.instance_id},
           {"task", v.task},
           {"kind", FlipKindName(v.kind)},
           {"clarification", v.clarification},
           {"baseline_predicted", v.baseline_predicted},
           {"clarified_predicted", v.clarified_predicted},
           {"gold", v.gold}};
}

void from_json(const Json &j, ClarificationJudgment &v) {
  v.instance_id = j.at("instance_id").get<std::string>();
  v.task = j.at("task").get<std::string>();
  v.kind = j.at("kind").get<std::string>() == "harmful" ? FlipKind::kHarmful
                                                       : FlipKind::kUseful;
  v.clarification = j.at("clarification").get<Clarification>();
  v.baseline_predicted = j.at("baseline_predicted").get<int>();
  v.clarified_predicted = j.at("clarified_predicted").get<int>();
  v.gold = j.at("gold").get<int>();
}

std::vector<ClarificationJudgment> FindFlipClarifications(
    const std::vector<Prediction> &baseline,
    const std::vector<Prediction> &clarified,
    const std::vector<Instance> &instances, FlipKind kind,
    const std::string &task) {
  const auto inst_index = IndexInstances(instances);
  const auto base_index = IndexPredictions(baseline, "baseline");
  const auto clar_index = IndexPredictions(clarified, "clarified");
  if (base_index.size() != clar_index.size()) {
    throw AnalysisError("baseline and clarified runs cover different instances");
  }
  std::vector<ClarificationJudgment> out;
  for (const auto &[id, b] : base_index) {
    auto cit = clar_index.find(id);
    if (cit == clar_index.end()) {
      throw AnalysisError("instance " + id + " is missing from the clarified run");
    }
    const Prediction &c = *cit->second;
    const int gold = GoldOf(inst_index, id);
    const bool base_ok = b->predicted == gold;
    const bool clar_ok = c.predicted == gold;
    const bool flip = kind == FlipKind::kUseful ? (!base_ok && clar_ok)
                                                : (base_ok && !clar_ok);
    if (!flip) continue;
    if (c.predicted < 0 || c.predicted >= static_cast<int>(c.choice_scores.size())) {
      throw AnalysisError("instance " + id + " has no score for its prediction");
    }
    const ChoiceScore &cs = c.choice_scores[c.predicted];
    if (!cs.best_clarification || !cs.clarification) {
      throw AnalysisError("instance " + id +
                          " flipped without a best clarification on its predicted choice");
    }
    out.push_back({id, task, kind, *cs.clarification, b->predicted, c.predicted, gold});
  }
  return out;
}

FlipAccounting AccountFlips(const std::vector<Prediction> &baseline,
                            const std::vector<Prediction> &clarified,
                            const std::vector<Instance> &instances) {
  const auto inst_index = IndexInstances(instances);
  const auto base_index = IndexPredictions(baseline, "baseline");
  const auto clar_index = IndexPredictions(clarified, "clarified");
  if (base_index.size() != clar_index.size()) {
    throw AnalysisError("baseline and clarified runs cover different instances");
  }
  FlipAccounting acc;
  for (const auto &[id, b] : base_index) {
    auto cit = clar_index.find(id);
    if (cit == clar_index.end()) {
      throw AnalysisError("instance " + id + " is missing from the clarified run");
    }
    const int gold = GoldOf(inst_index, id);
    const bool base_ok = b->predicted == gold;
    const bool clar_ok = cit->second->predicted == gold;
    ++acc.n;
    acc.baseline_correct += base_ok;
    acc.clarified_correct += clar_ok;
    acc.useful += !base_ok && clar_ok;
    acc.harmful += base_ok && !clar_ok;
  }
  return acc;
}

const std::vector<AnnotationQuestion> &AnnotationQuestions() {
  static const auto *questions = new std::vector<AnnotationQuestion>{
      {"grammaticality",
       "Is the text grammatical, not entirely grammatical but understandable, or "
       "completely not understandable?",
       {"grammatical", "understandable", "not_understandable"}},
      {"relevance", "Is the text on topic with the instance?", {"yes", "no"}},
      {"correctness", "Is the answer factually correct or likely true?", {"yes", "no"}},
      {"helpfulness", "Does the answer add helpful information to solve the instance?",
       {"yes", "no"}},
  };
  return *questions;
}

void to_json(Json &j, const AnnotationTask &v) {
  Json questions = Json::array();
  for (const auto &q : AnnotationQuestions()) {
    questions.push_back({{"category", q.category}, {"prompt", q.prompt}, {"labels", q.labels}});
  }
  j = Json{{"item_id", v.item_id},
           {"task", v.judgment.task},
           {"source", SourceName(v.judgment.clarification.source)},
           {"kind", FlipKindName(v.judgment.kind)},
           {"instance_id", v.judgment.instance_id},
           {"clarification_question", v.judgment.clarification.question_text
                                          ? Json(*v.judgment.clarification.question_text)
                                          : Json(nullptr)},
           {"clarification", v.judgment.clarification.text},
           {"questions", questions}};
}

std::vector<AnnotationTask> SampleForAnnotation(
    const std::vector<ClarificationJudgment> &judgments, int per_cell_cap,
    uint64_t seed) {
  std::map<std::pair<std::string, std::string>, std::vector<size_t>> cells;
  for (size_t i = 0; i < judgments.size(); ++i) {
    cells[{judgments[i].task, SourceName(judgments[i].clarification.source)}]
        .push_back(i);
  }
  std::vector<AnnotationTask> out;
  if (per_cell_cap <= 0) return out;
  for (auto &[cell, members] : cells) {
    std::vector<size_t> chosen = members;
    if (static_cast<int>(chosen.size()) > per_cell_cap) {
      std::mt19937_64 engine(DeriveSeed(seed, cell.first + "\t" + cell.second, 0));
      // Fisher-Yates with our own uniform draw, identical on every platform.
      for (size_t i = chosen.size() - 1; i > 0; --i) {
        size_t j = static_cast<size_t>(UniformUnit(engine) * static_cast<double>(i + 1));
        std::swap(chosen[i], chosen[std::min(j, i)]);
      }
      chosen.resize(per_cell_cap);
      std::sort(chosen.begin(), chosen.end());
    }
    for (size_t i : chosen) {
      const ClarificationJudgment &jd = judgments[i];
      out.push_back({jd.task + ":" + cell.second + ":" + jd.instance_id + ":" +
                         FlipKindName(jd.kind),
                     jd});
    }
  }
  return out;
}

std::string ExportErrorTaxonomy(const std::vector<ClarificationJudgment> &judgments) {
  std::ostringstream out;
  out << "#labels";
  for (auto label : kErrorTypes) out << '\t' << label;
  out << "\nitem_id\tinstance_id\ttask\tsource\tclarification\tlabel\n";
  for (const auto &jd : judgments) {
    if (jd.kind != FlipKind::kHarmful) {
      throw AnalysisError("error taxonomy applies to harmful clarifications; " +
                          jd.instance_id + " is useful");
    }
    const std::string source = SourceName(jd.clarification.source);
    out << jd.task << ':' << source << ':' << jd.instance_id << '\t'
        << jd.instance_id << '\t' << jd.task << '\t' << source << '\t'
        << Clean(jd.clarification.text) << "\t\n";
  }
  return out.str();
}

ErrorDistribution IngestErrorTaxonomy(std::string_view worksheet) {
  ErrorDistribution dist;
  std::istringstream in{std::string(worksheet)};
  std::string line;
  bool header_seen = false;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (StartsWith(line, "item_id\t")) continue;
    }
    size_t tab = line.rfind('\t');
    std::string label = Trim(tab == std::string::npos ? line : line.substr(tab + 1));
    if (label.empty()) {
      throw DatasetError("taxonomy line " + std::to_string(line_no) + " has no label");
    }
    int found = -1;
    for (size_t i = 0; i < kErrorTypes.size(); ++i) {
      if (ToLower(label) == ToLower(kErrorTypes[i])) found = static_cast<int>(i);
    }
    if (found < 0) {
      throw DatasetError("taxonomy line " + std::to_string(line_no) +
                         ": unknown label '" + label + "'");
    }
    ++dist.counts[found];
    ++dist.total;
  }
  for (size_t i = 0; i < kErrorTypes.size(); ++i) {
    dist.percent[i] = dist.total == 0 ? 0.0 : 100.0 * dist.counts[i] / dist.total;
  }
  return dist;
}

std::string FormatErrorDistribution(const ErrorDistribution &dist) {
  std::string out = "label,count,percent\n";
  char buf[64];
  for (size_t i = 0; i < kErrorTypes.size(); ++i) {
    std::snprintf(buf, sizeof(buf), ",%d,%.1f\n", dist.counts[i], dist.percent[i]);
    out += std::string(kErrorTypes[i]) + buf;
  }
  return out;
}

}  // namespace selftalk
