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

// JSON-over-HTTP completion client.
//
// Request (POST <base_url><path>):
//   {"model": str, "prompt": str, "max_tokens": int, "top_p": float, "n": int,
//    "seed": int (optional), "echo_logprobs": true}
//
// Response:
//   {"logprob_base": "e" | "2",                       (default "e")
//    "prompt":  {"tokens": [str], "logprobs": [float|null]},
//    "choices": [{"text": str, "tokens": [str], "logprobs": [float]}]}
//
// Natural-log values are converted to log2 here. Prompt positions whose
// logprob is null (typically the first token, which has no history) are
// skipped, so cross-entropy covers every token the server actually scores.

#ifndef SELFTALK_REMOTE_BACKEND_H_
#define SELFTALK_REMOTE_BACKEND_H_

#include <chrono>
#include <memory>
#include <semaphore>
#include <string>

#include "selftalk/lm_backend.h"
#include "selftalk/types.h"

namespace selftalk {

struct RemoteConfig {
  std::string base_url;  // e.g. http://localhost:8000
  std::string path = "/v1/completions";
  std::string model;
  std::string api_token;  // sent as a bearer token when non-empty
  int max_concurrency = 4;
  bool supports_sampling = true;
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::seconds timeout{60};

  // Fills base_url / api_token from SELFTALK_ENDPOINT / SELFTALK_API_TOKEN
  // where they are still empty.
  void ApplyEnvironment();
};

class RemoteBackend : public LMBackend {
 public:
  explicit RemoteBackend(RemoteConfig config);
  ~RemoteBackend() override;

  const BackendDescriptor &descriptor() const override { return descriptor_; }
  std::vector<TokenLogProb> ScoreText(std::string_view text) const override;
  std::vector<std::string> SampleContinuations(
      std::string_view prompt, const SamplingParams &params) const override;

  // Sends one request with the retry policy; returns the parsed body.
  Json Post(const Json &request) const;

 private:
  RemoteConfig config_;
  BackendDescriptor descriptor_;
  // Admission queue: at most max_concurrency requests in flight.
  mutable std::unique_ptr<std::counting_semaphore<>> slots_;
};

// Converts a logprob in the given base ("e" or "2") to log2.
double ToLog2(double value, const std::string &base);

}  // namespace selftalk

#endif  // SELFTALK_REMOTE_BACKEND_H_
