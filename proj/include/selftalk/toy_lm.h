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

// A deterministic, file-defined n-gram language model with backoff.
//
// Model file (JSON):
//
//   {
//     "name": "tiny-bigram",
//     "order": 2,
//     "unk": "<unk>",                 // reserved unknown token
//     "end": "</s>",                  // optional end-of-text token
//     "vocabulary": ["<unk>", "the", ...],
//     "tables": {                     // history -> token -> log2 p
//       "":    {"the": -1.0, ...},    // unigram table, complete
//       "the": {"cat": -1.0, ...}
//     },
//     "backoff": {"the": -0.58}       // optional log2 backoff weights
//   }
//
// Histories are space-joined tokens, at most order-1 of them. Lookup follows
// the usual backoff recursion:
//
//   p(w | h) = table[h][w]                   if listed
//            = backoff(h) * p(w | h[1:])     otherwise
//
// with backoff(h) = 1 when h has no table. Backoff weights that the file
// omits are computed so that each listed distribution sums to one; weights
// that it states are checked against the same condition.

#ifndef SELFTALK_TOY_LM_H_
#define SELFTALK_TOY_LM_H_

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "selftalk/lm_backend.h"
#include "selftalk/nucleus.h"
#include "selftalk/types.h"

namespace selftalk {

class ToyLanguageModel {
 public:
  // Throws ConfigError if the document violates any model invariant.
  static ToyLanguageModel FromJson(const Json &doc);
  static ToyLanguageModel LoadFile(const std::filesystem::path &path);

  int order() const { return order_; }
  const std::string &name() const { return name_; }
  const std::vector<std::string> &vocabulary() const { return vocab_; }
  const std::string &unk_token() const { return vocab_[unk_id_]; }
  std::optional<std::string> end_token() const;

  // Vocabulary id of a token, the unknown id for out-of-vocabulary tokens.
  int TokenId(const std::string &token) const;

  // log2 p(token | history). Only the last order-1 ids of `history` are used.
  double LogProb(std::span<const int> history, int token) const;

  // Full next-token distribution over the vocabulary.
  std::vector<TokenProb> NextDistribution(std::span<const int> history) const;

  // Largest deviation from 1 of any listed history's distribution mass.
  double MaxNormalizationError() const;

 private:
  struct Table {
    std::unordered_map<int, double> logprobs;
    // log2 weight; -inf when the listed entries hold all the mass.
    double backoff = 0.0;
  };

  const Table *FindTable(std::span<const int> history) const;

  std::string name_;
  int order_ = 1;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, int> ids_;
  int unk_id_ = 0;
  int end_id_ = -1;
  std::map<std::vector<int>, Table> tables_;
};

// LMBackend over a ToyLanguageModel. Stateless per call; safe to call from any
// number of threads.
class ToyBackend : public LMBackend {
 public:
  ToyBackend(std::shared_ptr<const ToyLanguageModel> model,
             std::string backend_id);

  // backend_id = "toy:" + SHA-256 of the file bytes.
  static std::unique_ptr<ToyBackend> FromFile(const std::filesystem::path &path);

  const BackendDescriptor &descriptor() const override { return descriptor_; }
  std::vector<TokenLogProb> ScoreText(std::string_view text) const override;
  std::vector<std::string> SampleContinuations(
      std::string_view prompt, const SamplingParams &params) const override;

  const ToyLanguageModel &model() const { return *model_; }

 private:
  std::shared_ptr<const ToyLanguageModel> model_;
  BackendDescriptor descriptor_;
};

}  // namespace selftalk

#endif  // SELFTALK_TOY_LM_H_
