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
#include "selftalk/lm_backend.h"

#include <stdexcept>

#include "selftalk/errors.h"

namespace selftalk {

void SamplingParams::Validate() const {
  if (!(top_p > 0.0 && top_p <= 1.0)) {
    throw std::invalid_argument("top_p must lie in (0, 1]");
  }
  if (max_new_tokens < 1) {
    throw std::invalid_argument("max_new_tokens must be positive");
  }
  if (num_samples < 1) {
    throw std::invalid_argument("num_samples must be positive");
  }
}

double MeanNegLogProb(const std::vector<TokenLogProb> &scored) {
  if (scored.empty()) throw BackendError("no scored tokens");
  double total = 0.0;
  for (const auto &t : scored) total += -t.logprob;
  return total / static_cast<double>(scored.size());
}

double CrossEntropy(const LMBackend &backend, std::string_view text) {
  return MeanNegLogProb(backend.ScoreText(text));
}

}  // namespace selftalk
