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

#include "selftalk/response_cache.h"

#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>

#include <spdlog/spdlog.h>

#include "selftalk/digest.h"
#include "selftalk/types.h"

namespace selftalk {

namespace {

std::string NowUtc() {
  std::time_t t = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

ResponseCache::ResponseCache(std::optional<std::filesystem::path> dir)
    : dir_(std::move(dir)) {
  if (dir_) std::filesystem::create_directories(*dir_);
}

std::string ResponseCache::KeyFor(const std::string &key_material) {
  return Sha256Hex(key_material);
}

std::filesystem::path ResponseCache::EntryPath(const std::string &key) const {
  return *dir_ / key.substr(0, 2) / (key + ".json");
}

std::optional<std::string> ResponseCache::ReadEntry(const std::string &key) const {
  if (!dir_) return std::nullopt;
  const std::filesystem::path path = EntryPath(key);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  try {
    Json doc = Json::parse(ReadFile(path));
    std::string value = doc.at("value").get<std::string>();
    if (doc.at("key").get<std::string>() != key ||
        doc.at("value_digest").get<std::string>() != Sha256Hex(value)) {
      spdlog::warn("cache entry {} fails its digest check; recomputing",
                   path.string());
      return std::nullopt;
    }
    return value;
  } catch (const std::exception &e) {
    spdlog::warn("cache entry {} is unreadable ({}); recomputing",
                 path.string(), e.what());
    return std::nullopt;
  }
}

void ResponseCache::WriteEntry(const std::string &key,
                               const std::string &value) const {
  if (!dir_) return;
  Json doc = {{"key", key},
              {"value_digest", Sha256Hex(value)},
              {"value", value},
              {"created_at", NowUtc()}};
  const std::filesystem::path path = EntryPath(key);
  std::filesystem::create_directories(path.parent_path());
  WriteFileAtomic(path, doc.dump());
}

std::string ResponseCache::GetOrCompute(
    const std::string &key_material,
    const std::function<std::string()> &compute) {
  ++requests_;
  const std::string key = KeyFor(key_material);

  std::promise<std::string> promise;
  std::unique_lock<std::mutex> lock(mu_);
  if (auto it = memory_.find(key); it != memory_.end()) {
    std::shared_future<std::string> future = it->second;
    ++hits_;
    // The owner may still be computing; wait without holding the lock.
    lock.unlock();
    return future.get();
  }
  memory_.emplace(key, promise.get_future().share());
  lock.unlock();

  try {
    std::string value;
    if (std::optional<std::string> stored = ReadEntry(key)) {
      ++hits_;
      value = std::move(*stored);
    } else {
      ++computations_;
      value = compute();
      WriteEntry(key, value);
    }
    promise.set_value(value);
    return value;
  } catch (...) {
    promise.set_exception(std::current_exception());
    lock.lock();
    memory_.erase(key);
    throw;
  }
}

void ResponseCache::RecordUncached() {
  ++requests_;
  ++computations_;
}

CacheStats ResponseCache::stats() const {
  return {requests_.load(), hits_.load(), computations_.load()};
}

CachingBackend::CachingBackend(std::shared_ptr<const LMBackend> inner,
                               std::shared_ptr<ResponseCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

std::vector<TokenLogProb> CachingBackend::ScoreText(std::string_view text) const {
  Json material = {{"backend_id", inner_->descriptor().backend_id},
                   {"op", "score_text"},
                   {"text", std::string(text)}};
  std::string value = cache_->GetOrCompute(material.dump(), [&] {
    Json out = Json::array();
    for (const auto &t : inner_->ScoreText(text)) {
      // JSON has no infinity; null stands for log2(0).
      Json lp = std::isfinite(t.logprob) ? Json(t.logprob) : Json(nullptr);
      out.push_back(Json::array({t.token, lp}));
    }
    return out.dump();
  });
  std::vector<TokenLogProb> scored;
  for (const auto &entry : Json::parse(value)) {
    double lp = entry[1].is_null() ? -std::numeric_limits<double>::infinity()
                                   : entry[1].get<double>();
    scored.push_back({entry[0].get<std::string>(), lp});
  }
  return scored;
}

std::vector<std::string> CachingBackend::SampleContinuations(
    std::string_view prompt, const SamplingParams &params) const {
  if (!params.seed) {
    cache_->RecordUncached();
    return inner_->SampleContinuations(prompt, params);
  }
  Json material = {{"backend_id", inner_->descriptor().backend_id},
                   {"op", "sample"},
                   {"prompt", std::string(prompt)},
                   {"top_p", params.top_p},
                   {"max_new_tokens", params.max_new_tokens},
                   {"num_samples", params.num_samples},
                   {"seed", *params.seed},
                   {"stop_sequences", params.stop_sequences}};
  std::string value = cache_->GetOrCompute(material.dump(), [&] {
    return Json(inner_->SampleContinuations(prompt, params)).dump();
  });
  return Json::parse(value).get<std::vector<std::string>>();
}

}  // namespace selftalk
