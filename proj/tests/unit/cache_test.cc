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

#include <atomic>
#include <chrono>
#include <thread>
#include <vector>

#include "doctest.h"
#include "selftalk/digest.h"
#include "selftalk/errors.h"
#include "selftalk/response_cache.h"
#include "test_util.h"

namespace selftalk {
namespace {

using testing::ScratchDir;
using testing::TinyBigram;

// Counts calls into the wrapped backend.
class CountingBackend : public LMBackend {
 public:
  explicit CountingBackend(std::shared_ptr<const LMBackend> inner)
      : inner_(std::move(inner)) {}
  const BackendDescriptor &descriptor() const override { return inner_->descriptor(); }
  std::vector<TokenLogProb> ScoreText(std::string_view text) const override {
    ++calls;
    return inner_->ScoreText(text);
  }
  std::vector<std::string> SampleContinuations(
      std::string_view prompt, const SamplingParams &params) const override {
    ++calls;
    return inner_->SampleContinuations(prompt, params);
  }
  mutable std::atomic<int> calls{0};

 private:
  std::shared_ptr<const LMBackend> inner_;
};

TEST_CASE("memory cache computes once per key") {
  ResponseCache cache;
  int runs = 0;
  auto f = [&] { ++runs; return std::string("v"); };
  CHECK(cache.GetOrCompute("a", f) == "v");
  CHECK(cache.GetOrCompute("a", f) == "v");
  CHECK(cache.GetOrCompute("b", f) == "v");
  CHECK(runs == 2);
  CacheStats s = cache.stats();
  CHECK(s.requests == 3);
  CHECK(s.hits == 1);
  CHECK(s.computations == 2);
  CHECK(ResponseCache::KeyFor("a") == Sha256Hex("a"));
}

TEST_CASE("concurrent callers share one computation") {
  ResponseCache cache;
  std::atomic<int> runs{0};
  std::vector<std::thread> threads;
  std::vector<std::string> got(8);
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&, i] {
      got[i] = cache.GetOrCompute("k", [&] {
        ++runs;
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
        return std::string("slow");
      });
    });
  }
  for (auto &t : threads) t.join();
  CHECK(runs == 1);
  for (const auto &g : got) CHECK(g == "slow");
  CHECK(cache.stats().hits == 7);
}

TEST_CASE("failed computation is not cached") {
  ResponseCache cache;
  CHECK_THROWS_AS(cache.GetOrCompute("k", []() -> std::string {
    throw BackendError("down");
  }), BackendError);
  CHECK(cache.GetOrCompute("k", [] { return std::string("up"); }) == "up");
}

TEST_CASE("disk entries survive and corrupt ones are recomputed") {
  ScratchDir dir("cache");
  {
    ResponseCache cache(dir.path());
    cache.GetOrCompute("k", [] { return std::string("first"); });
  }
  const std::string key = ResponseCache::KeyFor("k");
  ResponseCache warm(dir.path());
  std::filesystem::path entry = warm.EntryPath(key);
  CHECK(entry == dir.path() / key.substr(0, 2) / (key + ".json"));
  REQUIRE(std::filesystem::exists(entry));
  Json doc = Json::parse(ReadFile(entry));
  CHECK(doc["value_digest"] == Sha256Hex("first"));

  int runs = 0;
  CHECK(warm.GetOrCompute("k", [&] { ++runs; return std::string("x"); }) == "first");
  CHECK(runs == 0);
  CHECK(warm.stats().hits == 1);

  doc["value"] = "tampered";
  WriteFileAtomic(entry, doc.dump());
  ResponseCache again(dir.path());
  CHECK(again.GetOrCompute("k", [&] { ++runs; return std::string("fresh"); }) == "fresh");
  CHECK(runs == 1);
  CHECK(Json::parse(ReadFile(entry))["value"] == "fresh");

  WriteFileAtomic(entry, "{not json");
  ResponseCache broken(dir.path());
  CHECK(broken.GetOrCompute("k", [&] { ++runs; return std::string("z"); }) == "z");
  CHECK(runs == 2);
}

TEST_CASE("caching backend returns the inner responses") {
  auto inner = std::make_shared<CountingBackend>(TinyBigram());
  auto cache = std::make_shared<ResponseCache>();
  CachingBackend cached(inner, cache);

  auto direct = inner->ScoreText("the dog sat on the mat .");
  CHECK(cached.ScoreText("the dog sat on the mat .") == direct);
  CHECK(cached.ScoreText("the dog sat on the mat .") == direct);
  CHECK(inner->calls == 2);  // one direct, one through the cache

  // log2(0) round-trips through the JSON value.
  auto zero = cached.ScoreText("the sat");
  CHECK(std::isinf(zero[1].logprob));
  CHECK(std::isinf(cached.ScoreText("the sat")[1].logprob));

  SamplingParams p;
  p.top_p = 0.9;
  p.max_new_tokens = 4;
  p.num_samples = 3;
  p.seed = 7;
  auto a = cached.SampleContinuations("the", p);
  int before = inner->calls;
  CHECK(cached.SampleContinuations("the", p) == a);
  CHECK(inner->calls == before);
  p.seed = 8;
  cached.SampleContinuations("the", p);
  CHECK(inner->calls == before + 1);

  // Unseeded sampling bypasses the cache.
  p.seed.reset();
  cached.SampleContinuations("the", p);
  cached.SampleContinuations("the", p);
  CHECK(inner->calls == before + 3);
}

TEST_CASE("backend identity is part of the key") {
  auto cache = std::make_shared<ResponseCache>();
  auto m1 = std::make_shared<CountingBackend>(testing::Unigram({{"a", 0.5}}));
  CachingBackend c1(m1, cache);
  c1.ScoreText("a");
  auto m2 = std::make_shared<CountingBackend>(testing::BackendFromJson(
      {{"order", 1}, {"vocabulary", {"<unk>", "a"}},
       {"tables", {{"", {{"a", -2.0}, {"<unk>", std::log2(0.75)}}}}}},
      "toy:other"));
  CachingBackend c2(m2, cache);
  CHECK(c2.ScoreText("a")[0].logprob == doctest::Approx(-2.0));
  CHECK(m2->calls == 1);
}

}  // namespace
}  // namespace selftalk
