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

#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "selftalk/errors.h"
#include "selftalk/lm_backend.h"
#include "selftalk/nucleus.h"
#include "selftalk/toy_lm.h"
#include "test_util.h"

namespace selftalk {
namespace {

using testing::BackendFromJson;
using testing::TinyBigram;
using testing::Unigram;

std::shared_ptr<ToyBackend> Uniform8() {
  std::map<std::string, double> p;
  for (const char *w : {"a", "b", "c", "d", "e", "f", "g"}) p[w] = 1.0 / 8;
  return Unigram(p);  // "<unk>" takes the eighth share
}

std::set<std::string> Tokens(const std::vector<TokenProb> &v) {
  std::set<std::string> out;
  for (const auto &tp : v) out.insert(tp.token);
  return out;
}

TEST_CASE("uniform unigram over 8 tokens") {
  auto lm = Uniform8();
  auto scored = lm->ScoreText("a b c");
  REQUIRE(scored.size() == 3);
  for (const auto &t : scored) CHECK(t.logprob == -3.0);
  CHECK(CrossEntropy(*lm, "a b c d e") == 3.0);
  CHECK(lm->ScoreText("a zebra")[1].logprob == -3.0);  // scored as <unk>
}

TEST_CASE("tiny bigram reads the conditional table") {
  auto lm = TinyBigram();
  auto scored = lm->ScoreText("the cat sat");
  REQUIRE(scored.size() == 3);
  CHECK(scored[0].logprob == -3.0);  // p(the) = 1/8
  CHECK(scored[1].logprob == -1.0);  // p(cat | the) = 1/2
  CHECK(scored[2].logprob == -1.0);  // p(sat | cat) = 1/2
  CHECK(CrossEntropy(*lm, "the cat") == doctest::Approx((3.0 + 1.0) / 2).epsilon(1e-15));
  // "dog" lists only "ran": the rest backs off with weight (1/2)/(15/16).
  CHECK(lm->ScoreText("dog sat")[1].logprob == doctest::Approx(-std::log2(30.0)));
  // CE is exactly the mean of the scored logprobs.
  auto s = lm->ScoreText("a cat ran away .");
  CHECK(CrossEntropy(*lm, "a cat ran away .") == MeanNegLogProb(s));
}

TEST_CASE("certain single token has zero cross-entropy") {
  auto lm = Unigram({{"x", 1.0}});
  CHECK(CrossEntropy(*lm, "x") == 0.0);
}

TEST_CASE("empty text is rejected") {
  CHECK_THROWS_AS(TinyBigram()->ScoreText("   "), BackendError);
}

TEST_CASE("model validation") {
  Json doc = {{"order", 1}, {"vocabulary", {"<unk>", "a"}}, {"tables", {{"", {{"a", -0.5}}}}}};
  CHECK_THROWS_AS(ToyLanguageModel::FromJson(doc), ConfigError);  // mass != 1
  doc["tables"][""]["a"] = 0.0;
  CHECK_NOTHROW(ToyLanguageModel::FromJson(doc));
  doc["vocabulary"] = {"a"};
  CHECK_THROWS_AS(ToyLanguageModel::FromJson(doc), ConfigError);  // no <unk>
  doc["vocabulary"] = {"<unk>", "a", "a"};
  CHECK_THROWS_AS(ToyLanguageModel::FromJson(doc), ConfigError);
  Json bigram = {{"order", 2}, {"vocabulary", {"<unk>", "a"}},
                 {"tables", {{"", {{"a", 0.0}}}, {"b", {{"a", 0.0}}}}}};
  CHECK_THROWS_AS(ToyLanguageModel::FromJson(bigram), ConfigError);  // unknown history
  CHECK(TinyBigram()->model().MaxNormalizationError() < 1e-12);
}

TEST_CASE("nucleus set examples") {
  std::vector<TokenProb> abc = {{"a", 0.5}, {"b", 0.3}, {"c", 0.2}};
  CHECK(Tokens(NucleusSet(abc, 0.2)) == std::set<std::string>{"a"});
  CHECK(Tokens(NucleusSet(abc, 0.6)) == std::set<std::string>{"a", "b"});
  CHECK(Tokens(NucleusSet(abc, 1.0)).size() == 3);
  CHECK(Tokens(NucleusSet(std::vector<TokenProb>{{"x", 1.0}}, 0.3)) ==
        std::set<std::string>{"x"});
  std::vector<TokenProb> tie = {{"b", 0.4}, {"a", 0.4}, {"c", 0.2}};
  CHECK(Tokens(NucleusSet(tie, 0.4)) == std::set<std::string>{"a"});
  std::vector<TokenProb> flat = {{"a", .25}, {"b", .25}, {"c", .25}, {"d", .25}};
  CHECK(NucleusSet(flat, 1.0).size() == 4);
  auto renorm = NucleusSet(abc, 0.6);
  CHECK(renorm[0].prob + renorm[1].prob == doctest::Approx(1.0));
  CHECK_THROWS_AS(NucleusSet(abc, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(NucleusSet(abc, 1.5), std::invalid_argument);
}

TEST_CASE("nucleus sets nest as top_p grows") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<TokenProb> d;
    double total = 0;
    for (int i = 0; i < 10; ++i) {
      d.push_back({"t" + std::to_string(i), UniformUnit(rng)});
      total += d.back().prob;
    }
    for (auto &tp : d) tp.prob /= total;
    double lo = 0.05 + 0.9 * UniformUnit(rng);
    auto small = Tokens(NucleusSet(d, lo));
    auto large = Tokens(NucleusSet(d, std::min(1.0, lo + 0.1)));
    CHECK(std::includes(large.begin(), large.end(), small.begin(), small.end()));
  }
}

TEST_CASE("sampling is seeded per prompt and sample index") {
  auto lm = Unigram({{"a", 0.5}, {"b", 0.3}, {"c", 0.2}});
  SamplingParams p;
  p.max_new_tokens = 3;
  p.num_samples = 20;
  p.seed = 11;
  auto first = lm->SampleContinuations("a", p);
  CHECK(first == lm->SampleContinuations("a", p));
  p.num_samples = 5;
  auto prefix = lm->SampleContinuations("a", p);
  CHECK(std::equal(prefix.begin(), prefix.end(), first.begin()));
  p.top_p = 0.2;
  for (const auto &s : lm->SampleContinuations("b", p)) CHECK(s == "a a a");
}

TEST_CASE("sampling stops after a stop sequence or the end token") {
  Json doc = {{"order", 2},
              {"end", "</s>"},
              {"vocabulary", {"<unk>", "</s>", "x", "y", "?"}},
              {"tables",
               {{"", {{"x", -1.0}, {"y", -1.0}}},
                {"x", {{"y", 0.0}}},
                {"y", {{"?", 0.0}}},
                {"?", {{"</s>", 0.0}}}}}};
  auto lm = BackendFromJson(doc);
  SamplingParams p;
  p.max_new_tokens = 10;
  p.seed = 0;
  CHECK(lm->SampleContinuations("x", p)[0] == "y?");
  p.stop_sequences = {"y"};
  CHECK(lm->SampleContinuations("x", p)[0] == "y");
  p.max_new_tokens = 0;
  CHECK_THROWS_AS(p.Validate(), std::invalid_argument);
}

}  // namespace
}  // namespace selftalk
