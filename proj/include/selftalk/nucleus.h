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

#ifndef SELFTALK_NUCLEUS_H_
#define SELFTALK_NUCLEUS_H_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace selftalk {

struct TokenProb {
  std::string token;
  double prob = 0.0;

  bool operator==(const TokenProb &) const = default;
};

// Smallest prefix of the distribution, sorted by descending probability
// (ties: lexicographic token order), whose cumulative mass reaches top_p.
// Zero-probability tokens are never included. The result is renormalized.
std::vector<TokenProb> NucleusSet(std::span<const TokenProb> distribution,
                                  double top_p);

// Uniform double in [0, 1) from the top 53 bits of one engine draw. Unlike
// std::uniform_real_distribution this is identical on every standard library.
double UniformUnit(std::mt19937_64 &engine);

// Draws one entry of a normalized distribution.
size_t SampleIndex(std::span<const TokenProb> distribution,
                   std::mt19937_64 &engine);

}  // namespace selftalk

#endif  // SELFTALK_NUCLEUS_H_
