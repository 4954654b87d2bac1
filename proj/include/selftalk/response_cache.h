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

// Content-addressed memoization of backend responses, in memory and
// optionally on disk. Entries live at <dir>/<key[0:2]>/<key>.json as
//   {"key": ..., "value_digest": sha256(value), "value": ..., "created_at": ...}
// and are written by atomic rename, so concurrent writers of one key leave
// one complete entry behind.

#ifndef SELFTALK_RESPONSE_CACHE_H_
#define SELFTALK_RESPONSE_CACHE_H_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "selftalk/lm_backend.h"

namespace selftalk {

struct CacheStats {
  uint64_t requests = 0;
  uint64_t hits = 0;          // served from memory or disk
  uint64_t computations = 0;  // compute callbacks actually run
};

class ResponseCache {
 public:
  // Memory-only when dir is empty.
  explicit ResponseCache(std::optional<std::filesystem::path> dir = std::nullopt);

  // SHA-256 of the key material.
  static std::string KeyFor(const std::string &key_material);

  // Returns the stored value for the key, or runs compute, stores and returns
  // its result. Concurrent callers with one key share a single computation.
  // A corrupt disk entry is logged, recomputed and overwritten.
  std::string GetOrCompute(const std::string &key_material,
                           const std::function<std::string()> &compute);

  // Counts a request that bypasses the cache (e.g. unseeded sampling).
  void RecordUncached();

  CacheStats stats() const;
  std::optional<std::filesystem::path> dir() const { return dir_; }
  std::filesystem::path EntryPath(const std::string &key) const;

 private:
  std::optional<std::string> ReadEntry(const std::string &key) const;
  void WriteEntry(const std::string &key, const std::string &value) const;

  std::optional<std::filesystem::path> dir_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::shared_future<std::string>> memory_;
  std::atomic<uint64_t> requests_{0};
  std::atomic<uint64_t> hits_{0};
  std::atomic<uint64_t> computations_{0};
};

// LMBackend decorator that routes every call through a ResponseCache. Keys
// cover (backend_id, operation, prompt, params); values are the verbatim
// backend responses. Sampling without a seed is not reproducible and is
// passed through uncached.
class CachingBackend : public LMBackend {
 public:
  CachingBackend(std::shared_ptr<const LMBackend> inner,
                 std::shared_ptr<ResponseCache> cache);

  const BackendDescriptor &descriptor() const override {
    return inner_->descriptor();
  }
  std::vector<TokenLogProb> ScoreText(std::string_view text) const override;
  std::vector<std::string> SampleContinuations(
      std::string_view prompt, const SamplingParams &params) const override;

  const ResponseCache &cache() const { return *cache_; }

 private:
  std::shared_ptr<const LMBackend> inner_;
  std::shared_ptr<ResponseCache> cache_;
};

}  // namespace selftalk

#endif  // SELFTALK_RESPONSE_CACHE_H_
