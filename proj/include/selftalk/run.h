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

// Batch runs: configuration, backend construction, the score and self-talk
// pipelines, and the run manifest that marks a complete output directory.
//
// Output directory layout:
//   predictions.jsonl     one Prediction per instance (clarified when any
//                         knowledge source is enabled)
//   baseline.jsonl        baseline predictions, clarified runs only
//   clarifications.jsonl  {"instance_id", "clarifications": [...]}
//   eval.json             EvalResult of predictions.jsonl (gold required)
//   baseline_eval.json    EvalResult of baseline.jsonl
//   manifest.json         written last

#ifndef SELFTALK_RUN_H_
#define SELFTALK_RUN_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "selftalk/eval.h"
#include "selftalk/generative_kb.h"
#include "selftalk/lm_backend.h"
#include "selftalk/ngram_table.h"
#include "selftalk/scorer.h"
#include "selftalk/selftalk.h"

namespace selftalk {

inline constexpr char kArtifactVersion[] = "1.0.0";

struct RunConfig {
  std::string task;
  std::optional<std::filesystem::path> task_file;
  std::filesystem::path dataset;
  std::string split = "dev";
  std::string scorer_backend;                    // toy:<path> | remote:<model>[@<url>]
  std::optional<std::string> generator_backend;
  std::vector<std::string> knowledge;            // selftalk, generative, conceptnet, ngrams
  SelfTalkConfig selftalk;
  ScoringConfig scoring;
  GenerativeKbConfig generative;
  NgramOptions ngrams;
  int max_path_len = 2;
  uint64_t seed = 0;
  std::optional<std::filesystem::path> cache_dir;
  std::filesystem::path out_dir;
  std::filesystem::path data_dir;
  std::optional<std::filesystem::path> conceptnet_path;  // dump, or *.index
  std::optional<std::filesystem::path> ngrams_path;      // dump, or *.index
  std::optional<std::filesystem::path> routes_path;
  bool copa_swap_templates = false;
  std::string endpoint;
  std::string api_token;
  int remote_max_concurrency = 4;

  // Throws ConfigError.
  void Validate() const;
  // Snapshot for the manifest; the API token is never included.
  Json ToJson() const;
};

// Overlays the keys present in a config document onto cfg. Throws
// ConfigError for unknown keys or wrong types.
void ApplyConfigJson(const Json &doc, RunConfig &cfg);

// "all" expands to every source; "none" or empty to nothing. Accepts a
// comma-separated list. Throws ConfigError for unknown names.
std::vector<std::string> ParseKnowledge(const std::string &spec);
// "none", the single source, "all", or sources joined by '+'.
std::string KnowledgeId(const std::vector<std::string> &knowledge);

// Builds a backend from "toy:<model file>" or "remote:<model>[@<base url>]".
std::shared_ptr<const LMBackend> MakeBackend(const std::string &spec,
                                             const RunConfig &cfg);

struct RunCounts {
  int instances = 0;
  uint64_t lm_calls = 0;
  uint64_t cache_hits = 0;
  uint64_t backend_computations = 0;
};

struct RunReport {
  RunCounts counts;
  std::vector<Prediction> predictions;
  std::vector<Prediction> baseline;  // clarified runs only
  std::optional<EvalResult> eval;
  std::optional<EvalResult> baseline_eval;
  std::optional<FlipAccounting> flips;
};

RunReport RunScore(const RunConfig &cfg);
// Self-talk clarifications only.
RunReport RunSelfTalk(const RunConfig &cfg);

// Writes manifest.json listing `files` (relative to dir) with their SHA-256.
void WriteManifest(const std::filesystem::path &dir, const Json &config,
                   const Json &counts, const std::vector<std::string> &files,
                   std::chrono::system_clock::time_point started,
                   std::chrono::system_clock::time_point finished);

// Checks every output listed in the manifest against its digest. Throws
// DatasetError when the manifest is missing or an entry does not match.
Json VerifyManifest(const std::filesystem::path &dir);

std::string ToJsonLines(const std::vector<Prediction> &predictions);
std::vector<Prediction> ReadPredictions(const std::filesystem::path &path);

}  // namespace selftalk

#endif  // SELFTALK_RUN_H_
