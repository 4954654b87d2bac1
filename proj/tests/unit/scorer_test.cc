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

#include <random>

#include "doctest.h"
#include "selftalk/errors.h"
#include "selftalk/scorer.h"
#include "selftalk/task_spec.h"
#include "selftalk/toy_lm.h"
#include "test_util.h"

namespace selftalk {
namespace {

using testing::kDataDir;
using testing::TinyBigram;
using testing::Unigram;

TaskSpec Custom(const std::string &tmpl = "[context] [choice]") {
  TaskSpec spec;
  spec.name = "custom";
  spec.combine_templates = {{"default", tmpl}};
  return spec;
}

Clarification Clar(const std::string &text) {
  Clarification c;
  c.text = text;
  return c;
}

TEST_CASE("identical combined texts tie to choice 0") {
  auto lm = TinyBigram();
  Instance inst{"i", "the cat sat.", std::nullopt, std::nullopt, {"on", "on"}, 1};
  Prediction p = ScoreBaseline(*lm, Custom(), inst);
  CHECK(p.choice_scores[0].score == p.choice_scores[1].score);
  CHECK(p.predicted == 0);
  CHECK(p.mode == PredictionMode::kBaseline);
}

TEST_CASE("lower cross-entropy wins on the bigram fixture") {
  auto lm = TinyBigram();
  // "the cat ." costs (3+1+2)/3 bits, "the mat ." costs (3+2+0)/3.
  Instance inst{"i", "", std::nullopt, std::nullopt, {"the cat .", "the mat ."}, 1};
  Prediction p = ScoreBaseline(*lm, Custom(), inst);
  CHECK(p.choice_scores[0].score == doctest::Approx(2.0));
  CHECK(p.choice_scores[1].score == doctest::Approx(5.0 / 3));
  CHECK(p.predicted == 1);
}

TEST_CASE("uniform LM ties equal-length texts") {
  auto lm = Unigram({{"a", 0.25}, {"b", 0.25}, {"c", 0.25}, {"d", 0.25}});
  Instance inst{"i", "a b", std::nullopt, std::nullopt, {"c d", "d c"}, 1};
  CHECK(ScoreBaseline(*lm, Custom(), inst).predicted == 0);
  Prediction clarified = ScoreWithClarifications(*lm, Custom(), inst, {Clar("a a a")}, {});
  CHECK(clarified.predicted == 0);
  CHECK(clarified.choice_scores[0].score == clarified.choice_scores[1].score);
}

TEST_CASE("fewer than two choices is a dataset error") {
  Instance inst{"i", "x", std::nullopt, std::nullopt, {"only"}, 0};
  CHECK_THROWS_AS(ScoreBaseline(*TinyBigram(), Custom(), inst), DatasetError);
}

TEST_CASE("placement") {
  TaskSpec wino = LoadBuiltinTaskSpec("winogrande", kDataDir);
  Instance inst{"w", "Katrina had the financial means to afford a new car while Monica did "
                     "not, since _ had a high paying job.",
                std::nullopt, std::nullopt, {"Katrina", "Monica"}, 0};
  Clarification c = Clar("The purpose of the internship is to help people find jobs.");
  ScoringConfig cfg;
  CHECK(AssembleScoredText(wino, inst, 0, c, cfg) ==
        "Katrina had the financial means to afford a new car while Monica did not, since "
        "The purpose of the internship is to help people find jobs. Katrina had a high "
        "paying job.");
  cfg.placement = Placement::kAppendedAfterOption;
  CHECK(AssembleScoredText(wino, inst, 1, c, cfg) ==
        "Katrina had the financial means to afford a new car while Monica did not, since "
        "Monica had a high paying job. The purpose of the internship is to help people "
        "find jobs.");

  TaskSpec custom = Custom("[context] [question] [choice]");
  Instance empty{"e", "", "Why?", std::nullopt, {"A", "B"}, 0};
  cfg.placement = Placement::kAfterContext;
  CHECK(AssembleScoredText(custom, empty, 0, Clar("It rained."), cfg) == "It rained. Why? A");

  CHECK(ParsePlacement("appended") == Placement::kAppendedAfterOption);
  CHECK(ParsePlacement("after_context") == Placement::kAfterContext);
  CHECK_THROWS(ParsePlacement("sideways"));
}

TEST_CASE("clarified score is the minimum over clarifications and the bare option") {
  auto lm = TinyBigram();
  TaskSpec spec = Custom();
  Instance inst{"i", "a dog ran away.", std::nullopt, std::nullopt,
                {"the cat .", "the mat ."}, 0};
  std::vector<Clarification> clars = {Clar("the cat sat on the mat."), Clar("dog."),
                                      Clar("The cat sat on the mat.")};
  ScoringConfig cfg;
  Prediction base = ScoreBaseline(*lm, spec, inst);
  Prediction p = ScoreWithClarifications(*lm, spec, inst, clars, cfg);
  CHECK(p.mode == PredictionMode::kClarified);
  for (int c = 0; c < 2; ++c) {
    double best = base.choice_scores[c].score;
    for (const auto &cl : clars) {
      best = std::min(best, CrossEntropy(*lm, AssembleScoredText(spec, inst, c, cl, cfg)));
    }
    CHECK(p.choice_scores[c].score == best);
    // Duplicates (case-insensitive) are scored once, the first index kept.
    if (p.choice_scores[c].best_clarification) {
      CHECK(*p.choice_scores[c].best_clarification != 2);
      CHECK(p.choice_scores[c].clarification->text ==
            clars[*p.choice_scores[c].best_clarification].text);
    }
  }
}

TEST_CASE("without the bare option and with nothing to score the baseline is used") {
  auto lm = TinyBigram();
  Instance inst{"i", "the cat.", std::nullopt, std::nullopt, {"sat", "ran"}, 0};
  ScoringConfig cfg;
  cfg.include_bare_option = false;
  Prediction p = ScoreWithClarifications(*lm, Custom(), inst, {Clar("   ")}, cfg);
  CHECK(p.fallback);
  CHECK(p.predicted == ScoreBaseline(*lm, Custom(), inst).predicted);
}

TEST_CASE("a helpful clarification flips a wrong baseline prediction") {
  // The flip benchmark scorer makes "climb" likely right after "ladder .".
  auto lm = ToyBackend::FromFile(testing::kFixtureDir / "flip_bench" / "scorer.model");
  TaskSpec spec = Custom();
  Instance inst{"i", "Ana dropped the glass.", std::nullopt, std::nullopt,
                {"rest.", "climb."}, 1};
  Prediction base = ScoreBaseline(*lm, spec, inst);
  REQUIRE(base.predicted == 0);
  std::vector<Clarification> clars = {Clar("Ana needs a hat."), Clar("Ana needs a ladder.")};
  Prediction p = ScoreWithClarifications(*lm, spec, inst, clars, {});
  CHECK(p.predicted == 1);
  CHECK(p.choice_scores[1].best_clarification == 1);
  // Exhaustive check of the winning pair.
  double best1 = CrossEntropy(*lm, "Ana dropped the glass. Ana needs a ladder. climb.");
  CHECK(p.choice_scores[1].score == best1);
}

TEST_CASE("serial and parallel kernels agree") {
  auto lm = TinyBigram();
  std::vector<std::string> texts;
  std::mt19937_64 rng(3);
  const std::vector<std::string> words = {"the", "cat", "dog", "sat", "on", "mat", "."};
  for (int i = 0; i < 300; ++i) {
    std::string t;
    for (int k = 0; k < 1 + static_cast<int>(rng() % 12); ++k) t += words[rng() % 7] + " ";
    texts.push_back(t);
  }
  CHECK(CrossEntropySerial(*lm, texts) == CrossEntropyParallel(*lm, texts));
}

}  // namespace
}  // namespace selftalk
