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

// Cross-run reports: the best setup per task and model type by development
// accuracy, and the relative improvement of each knowledge source over the
// zero-shot baseline averaged across scorer LMs.

#ifndef SELFTALK_REPORT_H_
#define SELFTALK_REPORT_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "selftalk/eval.h"

namespace selftalk {

// Reads eval.json (and baseline_eval.json when present) from each run
// directory. Throws DatasetError when a directory has no manifest.json or
// its eval file does not match the manifest's digest.
std::vector<EvalResult> LoadRunResults(const std::vector<std::filesystem::path> &dirs);

struct BestSetupRow {
  std::string dataset;
  std::string model;  // Majority, Baseline, Ext. Knowledge, Self-talk
  std::string lm;
  std::string knowledge_source;
  std::optional<double> dev_acc;
  std::optional<double> test_acc;
};

// Label used for a run's knowledge in both tables: the generator model for
// self-talk and generative runs, a fixed name for the static sources.
std::string KnowledgeLabel(const EvalResult &r);

// Per task: the majority reference row, then for each model type present the
// dev-best setup (ties: first in input order) with its test accuracy.
std::vector<BestSetupRow> BestSetupTable(const std::vector<EvalResult> &results);

struct ImprovementMatrix {
  std::vector<std::string> tasks;
  std::vector<std::string> columns;
  std::map<std::pair<std::string, std::string>, double> cells;
};

// Dev-split runs with knowledge, each paired with the baseline run of the
// same task and scorer; cells average the differences over scorers.
ImprovementMatrix ComputeImprovementMatrix(const std::vector<EvalResult> &results);

// One decimal.
std::string FormatAccuracy(double v);
// Sign, two decimals, one trailing zero dropped: +10.25, +7.9, -3.2.
std::string FormatSigned(double v);

std::string BestSetupCsv(const std::vector<BestSetupRow> &rows);
std::string BestSetupText(const std::vector<BestSetupRow> &rows);
std::string ImprovementCsv(const ImprovementMatrix &m);
std::string ImprovementText(const ImprovementMatrix &m);

}  // namespace selftalk

#endif  // SELFTALK_REPORT_H_
