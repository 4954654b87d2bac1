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

// Accuracy, majority baseline and relative improvement; extraction of the
// clarifications that flipped a prediction; sampling of those for human
// annotation; and the error-type worksheet for harmful ones.

#ifndef SELFTALK_EVAL_H_
#define SELFTALK_EVAL_H_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "selftalk/types.h"

namespace selftalk {

struct EvalResult {
  std::string task;
  std::string scorer;     // backend display name
  std::string generator;  // empty when no generator was used
  std::string knowledge;  // "none", "selftalk", "conceptnet", ...
  std::string split;
  PredictionMode mode = PredictionMode::kBaseline;
  int n_instances = 0;
  int correct = 0;
  int majority_count = 0;
  double accuracy = 0.0;           // percent
  double majority_accuracy = 0.0;  // percent
  // SHA-256 over the sorted instance ids.
  std::string instance_digest;
  std::map<std::string, int> predicted;  // instance id -> predicted index
  std::map<std::string, int> gold;

  bool operator==(const EvalResult &) const = default;
};

void to_json(Json &j, const EvalResult &v);
void from_json(const Json &j, EvalResult &v);

// Throws DatasetError for an empty prediction set or a prediction of an
// unknown instance, and ItemListError listing instances without gold.
// Metadata fields other than mode are left for the caller.
EvalResult Evaluate(const std::vector<Prediction> &predictions,
                    const std::vector<Instance> &instances);

// clarified.accuracy - baseline.accuracy. Throws AnalysisError unless both
// cover the same task, split and instance set.
double RelativeImprovement(const EvalResult &clarified, const EvalResult &baseline);

enum class FlipKind { kUseful, kHarmful };
std::string FlipKindName(FlipKind kind);

struct ClarificationJudgment {
  std::string instance_id;
  std::string task;
  FlipKind kind = FlipKind::kUseful;
  Clarification clarification;
  int baseline_predicted = 0;
  int clarified_predicted = 0;
  int gold = 0;

  bool operator==(const ClarificationJudgment &) const = default;
};

void to_json(Json &j, const ClarificationJudgment &v);
void from_json(const Json &j, ClarificationJudgment &v);

// Instances whose prediction flipped from wrong to right (useful) or right to
// wrong (harmful), each with the best clarification of the clarified
// prediction's choice. Throws AnalysisError when the two runs cover different
// instances or a flipped prediction carries no clarification.
std::vector<ClarificationJudgment> FindFlipClarifications(
    const std::vector<Prediction> &baseline,
    const std::vector<Prediction> &clarified,
    const std::vector<Instance> &instances, FlipKind kind,
    const std::string &task);

struct FlipAccounting {
  int n = 0;
  int baseline_correct = 0;
  int clarified_correct = 0;
  int useful = 0;
  int harmful = 0;

  // clarified_correct == baseline_correct + useful - harmful.
  bool Holds() const { return clarified_correct == baseline_correct + useful - harmful; }
};

FlipAccounting AccountFlips(const std::vector<Prediction> &baseline,
                            const std::vector<Prediction> &clarified,
                            const std::vector<Instance> &instances);

struct AnnotationQuestion {
  std::string category;
  std::string prompt;
  std::vector<std::string> labels;
};

// The four questions asked about every sampled clarification.
const std::vector<AnnotationQuestion> &AnnotationQuestions();

struct AnnotationTask {
  std::string item_id;  // task:source:instance:kind
  ClarificationJudgment judgment;
};

void to_json(Json &j, const AnnotationTask &v);

// Seeded uniform sample of at most per_cell_cap judgments for each
// (task, clarification source) cell. Output is ordered by cell, then by
// input order.
std::vector<AnnotationTask> SampleForAnnotation(
    const std::vector<ClarificationJudgment> &judgments, int per_cell_cap,
    uint64_t seed);

// The fixed harmful-clarification error types, in worksheet order.
inline constexpr std::array<std::string_view, 8> kErrorTypes = {
    "Irrelevant",          "Nonsensical or ungrammatical",
    "Relevant",            "Factually incorrect",
    "Correct",             "Restating the instance",
    "Wrong sense",         "Dataset error"};

// Tab-separated worksheet: a "#labels" line enumerating kErrorTypes, a
// column header, then one row per judgment with an empty label column.
// Throws AnalysisError for judgments that are not harmful.
std::string ExportErrorTaxonomy(const std::vector<ClarificationJudgment> &judgments);

struct ErrorDistribution {
  int total = 0;
  std::array<int, 8> counts{};
  std::array<double, 8> percent{};
};

// Reads a labeled worksheet. Labels match kErrorTypes case-insensitively;
// anything else, or an empty label, throws DatasetError.
ErrorDistribution IngestErrorTaxonomy(std::string_view worksheet);

// One line per error type: "<label>,<count>,<percent with one decimal>".
std::string FormatErrorDistribution(const ErrorDistribution &dist);

}  // namespace selftalk

#endif  // SELFTALK_EVAL_H_
