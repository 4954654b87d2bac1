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

// The language-model contract. Scorers and generators only see this
// interface; the toy n-gram model and the HTTP client both implement it.

#ifndef SELFTALK_LM_BACKEND_H_
#define SELFTALK_LM_BACKEND_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace selftalk {

struct TokenLogProb {
  std::string token;
  double logprob = 0.0;  // log2 p(token | previous tokens), <= 0

  bool operator==(const TokenLogProb &) const = default;
};

struct SamplingParams {
  double top_p = 1.0;
  int max_new_tokens = 1;
  int num_samples = 1;
  // Root seed; each sample derives its own seed from (seed, prompt, index).
  std::optional<uint64_t> seed;
  // A continuation ends right after the first stop sequence it produces.
  std::vector<std::string> stop_sequences;

  // Throws std::invalid_argument.
  void Validate() const;
};

enum class BackendKind { kToy, kRemote };

struct BackendDescriptor {
  // Stable cache identity: model-file hash for toy models, model name and
  // endpoint for remote ones.
  std::string backend_id;
  BackendKind kind = BackendKind::kToy;
  int max_concurrency = 1;
  // Human-readable model name used in reports.
  std::string display_name;
};

class LMBackend {
 public:
  virtual ~LMBackend() = default;

  virtual const BackendDescriptor &descriptor() const = 0;

  // One entry per token of `text` under the backend's own tokenizer. Entry i
  // conditions on tokens 0..i-1. Throws BackendError on empty input.
  virtual std::vector<TokenLogProb> ScoreText(std::string_view text) const = 0;

  // Up to params.num_samples continuations of `prompt`, each without leading
  // whitespace. Join with JoinText(prompt, continuation).
  virtual std::vector<std::string> SampleContinuations(
      std::string_view prompt, const SamplingParams &params) const = 0;
};

// Mean of -logprob over the scored tokens: bits per token.
double MeanNegLogProb(const std::vector<TokenLogProb> &scored);

// Cross-entropy of `text` in bits per token.
double CrossEntropy(const LMBackend &backend, std::string_view text);

}  // namespace selftalk

#endif  // SELFTALK_LM_BACKEND_H_
