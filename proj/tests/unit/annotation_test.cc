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

#include "doctest.h"
#include "selftalk/annotation.h"
#include "selftalk/errors.h"

namespace selftalk {
namespace {

// Straight transcription of the kappa definition, used as the oracle.
double KappaOracle(const std::vector<std::vector<int>> &m) {
  double items = m.size();
  double n = 0;
  for (int c : m[0]) n += c;
  std::vector<double> p(m[0].size(), 0.0);
  double p_bar = 0;
  for (const auto &row : m) {
    double agree = 0;
    for (size_t j = 0; j < row.size(); ++j) {
      p[j] += row[j] / (items * n);
      agree += row[j] * (row[j] - 1.0);
    }
    p_bar += agree / (n * (n - 1)) / items;
  }
  double p_e = 0;
  for (double pj : p) p_e += pj * pj;
  return (p_bar - p_e) / (1 - p_e);
}

TEST_CASE("kappa on a textbook matrix") {
  std::vector<std::vector<int>> m = {
      {0, 0, 0, 0, 14}, {0, 2, 6, 4, 2}, {0, 0, 3, 5, 6}, {0, 3, 9, 2, 0},
      {2, 2, 8, 1, 1},  {7, 7, 0, 0, 0}, {3, 2, 6, 3, 0}, {2, 5, 3, 2, 2},
      {6, 5, 2, 1, 0},  {0, 2, 2, 3, 7}};
  CHECK(FleissKappa(m) == doctest::Approx(KappaOracle(m)).epsilon(1e-12));
  CHECK(FleissKappa(m) == doctest::Approx(0.210).epsilon(0.005));
}

TEST_CASE("kappa edge cases") {
  CHECK(FleissKappa({{3, 0}, {3, 0}}) == 1.0);
  CHECK(FleissKappa({{3, 0}, {0, 3}}) == doctest::Approx(1.0));
  // Every item split 2-1 the same way round.
  CHECK(FleissKappa({{2, 1}, {1, 2}}) == doctest::Approx(-1.0 / 3));
  CHECK_THROWS_AS(FleissKappa({}), AnalysisError);
  CHECK_THROWS_AS(FleissKappa({{1, 0}}), AnalysisError);
  CHECK_THROWS_AS(FleissKappa({{2, 1}, {2, 0}}), AnalysisError);
  CHECK_THROWS_AS(FleissKappa({{2, 1}, {3}}), AnalysisError);
}

TEST_CASE("pairwise agreement") {
  CHECK(PairwiseAgreement({{3, 0}}) == doctest::Approx(100.0));
  CHECK(PairwiseAgreement({{2, 1}}) == doctest::Approx(100.0 / 3));
  CHECK(PairwiseAgreement({{3, 0}, {2, 1}}) == doctest::Approx(400.0 / 6));
}

std::string Rec(const std::string &item, const std::string &rater,
                const std::string &gram, const std::string &help) {
  Json j = {{"item_id", item}, {"rater_id", rater}, {"grammaticality", gram},
            {"helpfulness", help}, {"relevance", nullptr}};
  return j.dump() + "\n";
}

TEST_CASE("aggregation") {
  std::string jsonl = Rec("b", "r1", "grammatical", "yes") +
                      Rec("b", "r2", "grammatical", "no") +
                      Rec("b", "r3", "understandable", "yes") +
                      Rec("a", "r1", "grammatical", "no") +
                      Rec("a", "r2", "understandable", "no") +
                      Rec("a", "r3", "not_understandable", "no");
  auto records = ParseAnnotationRecords(jsonl);
  REQUIRE(records.size() == 6);
  CHECK(records[0].labels.count("relevance") == 0);

  AnnotationSummary s = AggregateAnnotations(records);
  REQUIRE(s.items.size() == 2);
  CHECK(s.items[0].item_id == "a");
  CHECK(s.items[0].majority.at("helpfulness") == "no");
  CHECK(s.items[0].unresolved.count("grammaticality") == 1);
  CHECK(s.items[1].majority.at("grammaticality") == "grammatical");
  CHECK(s.items[1].majority.at("helpfulness") == "yes");
  CHECK(s.agreement.count("relevance") == 0);
  const CategoryAgreement &help = s.agreement.at("helpfulness");
  CHECK(help.items == 2);
  CHECK(help.fleiss_kappa == doctest::Approx(KappaOracle({{2, 1}, {0, 3}})));
  CHECK(help.pairwise_agreement == doctest::Approx(400.0 / 6));
}

TEST_CASE("annotation input errors") {
  CHECK_THROWS_AS(ParseAnnotationRecords(Rec("a", "r", "fine", "yes")), DatasetError);
  CHECK_THROWS_AS(ParseAnnotationRecords("{\"item_id\": 1}\n"), DatasetError);
  CHECK_THROWS_AS(ParseAnnotationRecords("nope\n"), DatasetError);

  auto short_item = ParseAnnotationRecords(Rec("a", "r1", "grammatical", "yes") +
                                           Rec("a", "r2", "grammatical", "yes") +
                                           Rec("b", "r1", "grammatical", "yes") +
                                           Rec("b", "r2", "grammatical", "yes") +
                                           Rec("b", "r3", "grammatical", "yes"));
  try {
    AggregateAnnotations(short_item);
    FAIL("expected ItemListError");
  } catch (const ItemListError &e) {
    CHECK(e.ids() == std::vector<std::string>{"a"});
  }
  try {
    AggregateAnnotations(short_item, 2);  // now b has a surplus rater
    FAIL("expected ItemListError");
  } catch (const ItemListError &e) {
    CHECK(e.ids() == std::vector<std::string>{"b"});
  }
  CHECK_THROWS_AS(AggregateAnnotations(short_item, 1), ConfigError);
}

}  // namespace
}  // namespace selftalk
