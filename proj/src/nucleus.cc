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

#include "selftalk/nucleus.h"

#include <algorithm>
#include <stdexcept>

namespace selftalk {

namespace {

// Slack for cumulative sums that should reach top_p exactly.
constexpr double kMassEpsilon = 1e-12;

}  // namespace

std::vector<TokenProb> NucleusSet(std::span<const TokenProb> distribution,
                                  double top_p) {
  if (!(top_p > 0.0 && top_p <= 1.0)) {
    throw std::invalid_argument("top_p must lie in (0, 1]");
  }
  std::vector<TokenProb> sorted;
  sorted.reserve(distribution.size());
  for (const auto &tp : distribution) {
    if (tp.prob > 0.0) sorted.push_back(tp);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const TokenProb &a, const TokenProb &b) {
              if (a.prob != b.prob) return a.prob > b.prob;
              return a.token < b.token;
            });
  double cumulative = 0.0;
  size_t keep = 0;
  while (keep < sorted.size()) {
    cumulative += sorted[keep].prob;
    ++keep;
    if (cumulative + kMassEpsilon >= top_p) break;
  }
  sorted.resize(keep);
  for (auto &tp : sorted) tp.prob /= cumulative;
  return sorted;
}

double UniformUnit(std::mt19937_64 &engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

size_t SampleIndex(std::span<const TokenProb> distribution,
                   std::mt19937_64 &engine) {
  if (distribution.empty()) throw std::invalid_argument("empty distribution");
  double u = UniformUnit(engine);
  double cumulative = 0.0;
  for (size_t i = 0; i < distribution.size(); ++i) {
    cumulative += distribution[i].prob;
    if (u < cumulative) return i;
  }
  return distribution.size() - 1;
}

}  // namespace selftalk
