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
#include "selftalk/digest.h"
#include "selftalk/errors.h"
#include "selftalk/report.h"
#include "test_util.h"

namespace selftalk {
namespace {

using testing::kFixtureDir;
using testing::ScratchDir;

// n instances, the first correct ones predicted right; gold cycles 0,0,1.
EvalResult Result(const std::string &task, const std::string &split,
                  const std::string &scorer, const std::string &knowledge,
                  const std::string &generator, int n, int correct) {
  std::vector<Instance> insts;
  std::vector<Prediction> preds;
  for (int i = 0; i < n; ++i) {
    Instance inst;
    inst.id = task + std::to_string(i);
    inst.choices = {"a", "b"};
    inst.gold = i % 3 == 2 ? 1 : 0;
    Prediction p;
    p.instance_id = inst.id;
    p.predicted = i < correct ? *inst.gold : 1 - *inst.gold;
    p.choice_scores = {{0, 1.0}, {1, 1.0}};
    insts.push_back(inst);
    preds.push_back(p);
  }
  EvalResult r = Evaluate(preds, insts);
  r.task = task;
  r.split = split;
  r.scorer = scorer;
  r.knowledge = knowledge;
  r.generator = generator;
  return r;
}

TEST_CASE("number formats") {
  CHECK(FormatAccuracy(53.0) == "53.0");
  CHECK(FormatAccuracy(66.666) == "66.7");
  CHECK(FormatSigned(10.25) == "+10.25");
  CHECK(FormatSigned(7.9) == "+7.9");
  CHECK(FormatSigned(-3.2) == "-3.2");
  CHECK(FormatSigned(10.0) == "+10.0");
  CHECK(FormatSigned(-0.001) == "+0.0");
}

TEST_CASE("knowledge labels") {
  EvalResult r;
  r.knowledge = "selftalk";
  r.generator = "GPT2";
  CHECK(KnowledgeLabel(r) == "GPT2");
  r.knowledge = "conceptnet";
  CHECK(KnowledgeLabel(r) == "ConceptNet");
  r.knowledge = "ngrams";
  CHECK(KnowledgeLabel(r) == "Google Ngrams");
  r.knowledge = "none";
  CHECK(KnowledgeLabel(r) == "");
  r.knowledge = "selftalk+ngrams";
  CHECK(KnowledgeLabel(r) == "selftalk+ngrams");
}

TEST_CASE("best setup table") {
  std::vector<EvalResult> rs = {
      Result("piqa", "dev", "LM-A", "none", "", 10, 5),
      Result("piqa", "dev", "LM-B", "none", "", 10, 6),
      Result("piqa", "test", "LM-B", "none", "", 20, 11),
      Result("piqa", "dev", "LM-A", "conceptnet", "", 10, 7),
      Result("piqa", "dev", "LM-B", "ngrams", "", 10, 7),  // tie, later
      Result("piqa", "dev", "LM-A", "selftalk", "LM-C", 10, 6),
      Result("piqa", "test", "LM-A", "selftalk", "LM-C", 20, 13),
      Result("piqa", "test", "LM-A", "selftalk", "LM-D", 20, 19),
  };
  auto rows = BestSetupTable(rs);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].model == "Majority");
  CHECK(*rows[0].dev_acc == doctest::Approx(70.0));
  CHECK(*rows[0].test_acc == doctest::Approx(70.0));
  CHECK(rows[1].model == "Baseline");
  CHECK(rows[1].lm == "LM-B");
  CHECK(*rows[1].test_acc == doctest::Approx(55.0));
  CHECK(rows[2].knowledge_source == "ConceptNet");
  CHECK(!rows[2].test_acc);
  CHECK(rows[3].knowledge_source == "LM-C");
  CHECK(*rows[3].test_acc == doctest::Approx(65.0));

  std::string csv = BestSetupCsv(rows);
  CHECK(csv ==
        "dataset,model,lm,knowledge_source,dev_acc,test_acc\n"
        "piqa,Majority,,,70.0,70.0\n"
        "piqa,Baseline,LM-B,,60.0,55.0\n"
        "piqa,Ext. Knowledge,LM-A,ConceptNet,70.0,\n"
        "piqa,Self-talk,LM-A,LM-C,60.0,65.0\n");
  std::string text = BestSetupText(rows);
  CHECK(text.find("Knowledge Source") != std::string::npos);
  CHECK(text.find("Self-talk") != std::string::npos);
}

TEST_CASE("improvement matrix averages over scorers") {
  std::vector<EvalResult> rs = {
      Result("copa", "dev", "A", "none", "", 20, 10),
      Result("copa", "dev", "B", "none", "", 20, 12),
      Result("copa", "dev", "A", "selftalk", "G", 20, 13),
      Result("copa", "dev", "B", "selftalk", "G", 20, 14),
      Result("copa", "dev", "A", "conceptnet", "", 20, 9),
      Result("copa", "dev", "C", "conceptnet", "", 20, 19),  // no baseline
      Result("piqa", "dev", "A", "none", "", 20, 10),
      Result("piqa", "dev", "A", "conceptnet", "", 20, 11),
  };
  ImprovementMatrix m = ComputeImprovementMatrix(rs);
  CHECK(m.tasks == std::vector<std::string>{"copa", "piqa"});
  REQUIRE(m.columns.size() == 2);
  CHECK(m.cells.at({"copa", "G"}) == doctest::Approx(12.5));
  CHECK(m.cells.at({"copa", "ConceptNet"}) == doctest::Approx(-5.0));
  CHECK(m.cells.count({"piqa", "G"}) == 0);
  std::string csv = ImprovementCsv(m);
  CHECK(csv.find("copa,") != std::string::npos);
  CHECK(csv.find("+12.5") != std::string::npos);
  CHECK(csv.find("piqa,") != std::string::npos);
  CHECK(csv.find(",-") != std::string::npos);
  CHECK(ImprovementText(m).find("+5.0") != std::string::npos);
}

TEST_CASE("loading run directories") {
  const auto root = kFixtureDir / "report_runs";
  auto results = LoadRunResults({root / "copa_distil_baseline", root / "copa_gpt2l_comet"});
  // The comet run contributes its own baseline as well.
  REQUIRE(results.size() == 3);
  CHECK(results[0].accuracy == doctest::Approx(53.0));

  ScratchDir dir("report");
  std::filesystem::copy(root / "copa_distil_baseline", dir / "run");
  CHECK_NOTHROW(LoadRunResults({dir / "run"}));
  Json eval = Json::parse(ReadFile(dir / "run" / "eval.json"));
  eval["accuracy"] = 99.0;
  WriteFileAtomic(dir / "run" / "eval.json", eval.dump(2));
  CHECK_THROWS_AS(LoadRunResults({dir / "run"}), DatasetError);
  std::filesystem::remove(dir / "run" / "manifest.json");
  CHECK_THROWS_AS(LoadRunResults({dir / "run"}), DatasetError);
}

}  // namespace
}  // namespace selftalk
