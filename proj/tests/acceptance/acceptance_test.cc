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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>
#include <unistd.h>

#include "selftalk/annotation.h"
#include "selftalk/concept_graph.h"
#include "selftalk/digest.h"
#include "selftalk/eval.h"
#include "selftalk/lm_backend.h"
#include "selftalk/nucleus.h"
#include "selftalk/report.h"
#include "selftalk/run.h"
#include "selftalk/scorer.h"
#include "selftalk/text.h"
#include "selftalk/toy_lm.h"

namespace fs = std::filesystem;
using namespace selftalk;  // NOLINT(build/namespaces)

namespace {

const fs::path kData = SELFTALK_DATA_DIR;
const fs::path kFixtures = kData / "fixtures";
const fs::path kFlip = kFixtures / "flip_bench";

fs::path Scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("selftalk_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Check result: pass flag plus a short detail string.
struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char *format, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

RunConfig FlipConfig(const std::string &out, std::optional<fs::path> cache) {
  RunConfig cfg;
  cfg.task_file = kFlip / "task.json";
  cfg.dataset = kFlip / "dev.jsonl";
  cfg.scorer_backend = "toy:" + (kFlip / "scorer.model").string();
  cfg.generator_backend = "toy:" + (kFlip / "generator.model").string();
  cfg.knowledge = {"selftalk"};
  cfg.seed = 0;
  cfg.data_dir = kData;
  cfg.out_dir = Scratch() / out;
  cfg.cache_dir = cache;
  return cfg;
}

// 1. Cross-entropy against hand-derived values.
Outcome CeOracle() {
  auto model = std::make_shared<const ToyLanguageModel>(
      ToyLanguageModel::LoadFile(kFixtures / "tiny_bigram.model"));
  ToyBackend backend(model, "toy:tiny");
  // Per-token bits; 1/30 and 1/15 come from backing off out of "dog".
  const std::vector<std::pair<std::string, double>> cases = {
      {"the cat sat on the mat .", (3 + 1 + 1 + 0 + 1 + 2 + 0) / 7.0},
      {"a dog ran away .", (4 + 1 + 1 + 1 + 0) / 5.0},
      {"the dog sat on a cat .", (3 + 2 + std::log2(30.0) + 0 + 1 + 1 + 2) / 7.0},
      {"cat .", (3 + 2) / 2.0},
      {"the cat ran on the mat .", (3 + 1 + 2 + 2 + 1 + 2 + 0) / 7.0},
      {"a cat sat on the mat . the dog ran away .",
       (4 + 1 + 1 + 0 + 1 + 2 + 0 + 2 + 2 + 1 + 1 + 0) / 12.0},
      {"dog dog dog", (3 + std::log2(15.0) + std::log2(15.0)) / 3.0},
      {"zebra cat .", (4 + 3 + 2) / 3.0},
      {"The Cat Sat On The Mat.", (3 + 1 + 1 + 0 + 1 + 2 + 0) / 7.0},
      {"a dog ran on the cat .", (4 + 1 + 1 + 2 + 1 + 1 + 2) / 7.0},
      {"dog , the cat .", (3 + std::log2(30.0) + 3 + 1 + 2) / 5.0},
      {"the mat .", (3 + 2 + 0) / 3.0},
      {"dog sat on the mat .", (3 + std::log2(30.0) + 0 + 1 + 2 + 0) / 6.0},
      {"ran away .", (4 + 1 + 0) / 3.0},
      {"a cat ran away . a dog ran away .", (4 + 1 + 2 + 1 + 0 + 2 + 1 + 1 + 1 + 0) / 10.0},
      {"dog the cat .", (3 + std::log2(15.0) + 1 + 2) / 4.0},
      {"the dog ran .", (3 + 2 + 1 + 2) / 4.0},
      {"dog mat .", (3 + std::log2(30.0) + 0) / 3.0},
      {"a dog . the cat .", (4 + 1 + std::log2(15.0) + 2 + 1 + 2) / 6.0},
      {"away", 4 / 1.0},
  };
  double worst = 0.0;
  for (const auto &[text, expected] : cases) {
    worst = std::max(worst, std::abs(CrossEntropy(backend, text) - expected));
  }
  return {worst <= 1e-9 && cases.size() == 20,
          Fmt("20 sentences, max |error| %.2e bits", worst)};
}

std::shared_ptr<const ToyLanguageModel> UnigramModel(const std::vector<double> &p) {
  Json doc = {{"order", 1}, {"unk", "<unk>"}};
  std::vector<std::string> vocab = {"<unk>"};
  Json table = Json::object();
  for (size_t i = 0; i < p.size(); ++i) {
    std::string w = std::string(1, static_cast<char>('a' + i));
    vocab.push_back(w);
    table[w] = std::log2(p[i]);
  }
  doc["vocabulary"] = vocab;
  doc["tables"] = {{"", table}};
  return std::make_shared<const ToyLanguageModel>(ToyLanguageModel::FromJson(doc));
}

// 2. Nucleus truncation, sampling frequencies, nesting.
Outcome Nucleus() {
  ToyBackend backend(UnigramModel({0.5, 0.3, 0.2}), "toy:abc");
  SamplingParams params;
  params.max_new_tokens = 1;
  params.num_samples = 10000;
  params.seed = 7;
  params.top_p = 0.2;
  auto narrow = backend.SampleContinuations("a", params);
  bool only_top = narrow.size() == 10000 &&
                  std::all_of(narrow.begin(), narrow.end(),
                              [](const std::string &s) { return s == "a"; });

  params.top_p = 1.0;
  auto full = backend.SampleContinuations("a", params);
  std::map<std::string, int> counts;
  for (const auto &s : full) ++counts[s];
  const std::map<std::string, double> exact = {{"a", 0.5}, {"b", 0.3}, {"c", 0.2}};
  double worst_z = 0.0;
  for (const auto &[tok, p] : exact) {
    double se = std::sqrt(p * (1 - p) / full.size());
    worst_z = std::max(worst_z, std::abs(counts[tok] / double(full.size()) - p) / se);
  }
  bool freq_ok = worst_z <= 3.0 && counts.size() == 3;

  std::mt19937_64 rng(2024);
  int nest_violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    int k = 2 + static_cast<int>(rng() % 30);
    std::vector<TokenProb> dist;
    double total = 0;
    for (int i = 0; i < k; ++i) {
      double w = UniformUnit(rng);
      dist.push_back({"t" + std::to_string(i), w});
      total += w;
    }
    for (auto &tp : dist) tp.prob /= total;
    double p1 = 0.01 + 0.99 * UniformUnit(rng);
    double p2 = 0.01 + 0.99 * UniformUnit(rng);
    if (p1 > p2) std::swap(p1, p2);
    std::set<std::string> small, large;
    for (const auto &tp : NucleusSet(dist, p1)) small.insert(tp.token);
    for (const auto &tp : NucleusSet(dist, p2)) large.insert(tp.token);
    if (!std::includes(large.begin(), large.end(), small.begin(), small.end())) {
      ++nest_violations;
    }
  }
  return {only_top && freq_ok && nest_violations == 0,
          Fmt("top_p=0.2 top-only=%g, max |z| at top_p=1.0 %.2f, nesting violations %g",
              only_top, worst_z, nest_violations)};
}

// Random order-2 model over a small vocabulary, every row partial so that all
// probabilities stay positive.
std::shared_ptr<const ToyLanguageModel> RandomBigram(std::mt19937_64 &rng,
                                                      const std::vector<std::string> &words) {
  Json doc = {{"order", 2}, {"unk", "<unk>"}};
  std::vector<std::string> vocab = words;
  vocab.push_back("<unk>");
  vocab.push_back(".");
  doc["vocabulary"] = vocab;
  Json tables = Json::object();
  auto random_row = [&](double mass, bool all) {
    Json row = Json::object();
    std::vector<std::pair<std::string, double>> w;
    double total = 0;
    for (const auto &v : vocab) {
      if (!all && rng() % 3 != 0) continue;
      double x = 0.05 + UniformUnit(rng);
      w.emplace_back(v, x);
      total += x;
    }
    for (auto &[v, x] : w) row[v] = std::log2(mass * x / total);
    return row;
  };
  tables[""] = random_row(1.0, true);
  for (const auto &v : vocab) {
    if (rng() % 2) tables[v] = random_row(0.7, false);
  }
  doc["tables"] = tables;
  return std::make_shared<const ToyLanguageModel>(ToyLanguageModel::FromJson(doc));
}

// 3. Adding a clarification never raises a score; bare option bounds baseline.
Outcome MinMonotonicity() {
  std::mt19937_64 rng(99);
  const std::vector<std::string> words = {"the", "man", "dog", "ran", "sat", "ate",
                                          "food", "home", "park", "was", "happy", "tired"};
  TaskSpec spec;
  spec.name = "random";
  spec.combine_templates = {{"default", "[context] [question] [choice]"}};
  auto sentence = [&](int lo, int hi) {
    int n = lo + static_cast<int>(rng() % (hi - lo + 1));
    std::string s;
    for (int i = 0; i < n; ++i) s = JoinText(s, words[rng() % words.size()]);
    return s + ".";
  };
  int violations = 0;
  int comparisons = 0;
  std::shared_ptr<const ToyLanguageModel> model;
  for (int trial = 0; trial < 1000; ++trial) {
    if (trial % 50 == 0) model = RandomBigram(rng, words);
    ToyBackend backend(model, "toy:random");
    Instance inst;
    inst.id = "r" + std::to_string(trial);
    inst.context = sentence(3, 8);
    inst.question = sentence(2, 4);
    int k = 2 + static_cast<int>(rng() % 3);
    for (int c = 0; c < k; ++c) inst.choices.push_back(sentence(1, 4));
    ScoringConfig cfg;
    cfg.execution = Execution::kSerial;
    cfg.placement = rng() % 2 ? Placement::kAfterContext : Placement::kAppendedAfterOption;
    std::vector<Clarification> clars;
    int m = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < m; ++i) clars.push_back({sentence(2, 6)});
    std::vector<Clarification> more = clars;
    more.push_back({sentence(2, 6)});

    Prediction base = ScoreBaseline(backend, spec, inst, Execution::kSerial);
    for (bool bare : {true, false}) {
      cfg.include_bare_option = bare;
      Prediction p = ScoreWithClarifications(backend, spec, inst, clars, cfg);
      Prediction q = ScoreWithClarifications(backend, spec, inst, more, cfg);
      for (int c = 0; c < k; ++c) {
        ++comparisons;
        if (q.choice_scores[c].score > p.choice_scores[c].score) ++violations;
        if (bare && p.choice_scores[c].score > base.choice_scores[c].score) ++violations;
      }
    }
  }
  return {violations == 0, Fmt("1000 pairs, %g score comparisons, %g violations",
                               comparisons, violations)};
}

// 4. Self-talk flips on the shipped synthetic benchmark.
Outcome FlipBenchmark() {
  RunReport a = RunScore(FlipConfig("flip_a", Scratch() / "flip_cache"));
  RunReport b = RunScore(FlipConfig("flip_b", std::nullopt));
  if (!a.eval || !a.baseline_eval || !a.flips) return {false, "run produced no evaluation"};
  double gain = a.eval->accuracy - a.baseline_eval->accuracy;
  bool same = ReadFile(Scratch() / "flip_a" / "predictions.jsonl") ==
              ReadFile(Scratch() / "flip_b" / "predictions.jsonl");
  bool pass = a.eval->n_instances == 40 && a.flips->useful >= 10 && gain >= 20.0 && same;
  return {pass, Fmt("baseline %.1f -> clarified %.1f, useful flips %g", a.baseline_eval->accuracy,
                    a.eval->accuracy, a.flips->useful) +
                    (same ? ", deterministic" : ", NOT deterministic")};
}

// 5. Graph clarifications against brute-force enumeration of short paths.
Outcome GraphPaths() {
  const RelationTemplates templates = LoadRelationTemplates(kData / "relation_templates.json");
  std::vector<std::string> relations;
  for (const auto &[r, _] : templates) relations.push_back(r);
  std::mt19937_64 rng(5);
  int mismatches = 0;
  size_t total = 0;
  for (int g = 0; g < 100; ++g) {
    int n_nodes = 2 + static_cast<int>(rng() % 199);
    int n_edges = static_cast<int>(rng() % 1001);
    // Three or more characters, so every name counts as a content word.
    auto node = [&](int i) {
      char buf[8];
      std::snprintf(buf, sizeof(buf), "n%03d", i);
      return std::string(buf);
    };
    std::vector<GraphEdge> edges;
    for (int e = 0; e < n_edges; ++e) {
      edges.push_back({relations[rng() % relations.size()], node(rng() % n_nodes),
                       node(rng() % n_nodes), 1.0});
    }
    ConceptGraph graph = ConceptGraph::FromEdges(edges, templates);

    Instance inst;
    inst.id = "g" + std::to_string(g);
    std::set<std::string> ctx_terms;
    std::string ctx;
    for (int i = 0; i < 4; ++i) {
      std::string w = node(rng() % n_nodes);
      ctx_terms.insert(w);
      ctx = JoinText(ctx, w);
    }
    inst.context = ctx + ".";
    std::vector<std::set<std::string>> choice_terms;
    for (int c = 0; c < 2; ++c) {
      std::set<std::string> terms;
      std::string text;
      for (int i = 0; i < 2; ++i) {
        std::string w = node(rng() % n_nodes);
        terms.insert(w);
        text = JoinText(text, w);
      }
      choice_terms.push_back(terms);
      inst.choices.push_back(text);
    }

    // Oracle over the deduplicated, self-loop-free edge list.
    std::set<std::tuple<std::string, std::string, std::string>> unique;
    for (const auto &e : edges) {
      if (e.head != e.tail) unique.emplace(e.relation, e.head, e.tail);
    }
    auto say = [&](const std::string &rel, const std::string &h, const std::string &t) {
      std::string s = templates.at(rel);
      s = ReplaceAll(ReplaceAll(s, "[head]", h), "[tail]", t);
      s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
      return s;
    };
    auto other_end = [](const auto &e, const std::string &x) -> std::optional<std::string> {
      if (std::get<1>(e) == x) return std::get<2>(e);
      if (std::get<2>(e) == x) return std::get<1>(e);
      return std::nullopt;
    };
    std::set<std::pair<std::string, std::string>> expected;
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto &terms : choice_terms) {
      for (const auto &b : terms) {
        for (const auto &a : ctx_terms) {
          if (a != b) pairs.emplace(a, b);
        }
      }
    }
    for (const auto &[a, b] : pairs) {
      const std::string q = RelationshipQuestion(a, b);
      for (const auto &e1 : unique) {
        auto mid = other_end(e1, a);
        if (!mid) continue;
        const std::string t1 = say(std::get<0>(e1), std::get<1>(e1), std::get<2>(e1));
        if (*mid == b) {
          expected.emplace(q, t1);
          continue;
        }
        for (const auto &e2 : unique) {
          auto end = other_end(e2, *mid);
          if (end && *end == b) {
            expected.emplace(q, t1 + " " + say(std::get<0>(e2), std::get<1>(e2), std::get<2>(e2)));
          }
        }
      }
    }
    std::set<std::pair<std::string, std::string>> got;
    for (const auto &c : GraphClarifications(graph, inst, 2, Execution::kParallel)) {
      got.emplace(*c.question_text, c.text);
    }
    total += expected.size();
    if (got != expected) ++mismatches;
  }
  return {mismatches == 0,
          Fmt("100 graphs, %g oracle clarifications, %g mismatching graphs",
              static_cast<double>(total), mismatches)};
}

int RunCli(const std::string &args) {
  std::string cmd = std::string(SELFTALK_CLI) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 6. clarified = baseline + (useful - harmful) / n * 100 on every run.
Outcome FlipIdentity() {
  int runs = 0;
  int bad = 0;
  for (uint64_t seed : {0, 1, 2}) {
    for (bool appended : {false, true}) {
      for (bool bare : {true, false}) {
        RunConfig cfg = FlipConfig("ident_" + std::to_string(runs), Scratch() / "flip_cache");
        cfg.seed = seed;
        cfg.scoring.placement = appended ? Placement::kAppendedAfterOption : Placement::kAfterContext;
        cfg.scoring.include_bare_option = bare;
        RunReport r = RunScore(cfg);
        ++runs;
        const FlipAccounting &f = *r.flips;
        // Exact in integers; the percent form follows.
        bool counts_ok = f.clarified_correct == f.baseline_correct + f.useful - f.harmful;
        double lhs = r.eval->accuracy;
        double rhs = r.baseline_eval->accuracy + 100.0 * (f.useful - f.harmful) / f.n;
        bool pct_ok = std::abs(lhs - rhs) < 1e-9;
        int rc = RunCli("analyze flips --run " + cfg.out_dir.string() + " --dataset " +
                        cfg.dataset.string());
        if (!counts_ok || !pct_ok || rc != 0) ++bad;
      }
    }
  }
  return {bad == 0, Fmt("%g runs checked by analyze flips, %g violations", runs, bad)};
}

// 7. Fleiss' kappa boundary cases.
Outcome Kappa() {
  double perfect = FleissKappa({{3, 0}, {0, 3}, {3, 0}});
  double two_item = FleissKappa({{2, 1}, {1, 2}});
  bool pass = perfect == 1.0 && std::abs(two_item - (-1.0 / 3.0)) <= 1e-12;
  return {pass, Fmt("perfect %.17g, two-item %.17g", perfect, two_item)};
}

// 8. Best-setup table and improvement cell from fixture run records.
Outcome Report() {
  const fs::path runs = kFixtures / "report_runs";
  const fs::path out = Scratch() / "report";
  std::string args = "report --out " + out.string() + " --runs";
  for (const char *r : {"copa_distil_baseline", "copa_gpt2l_baseline", "copa_gpt2l_comet",
                        "copa_distil_comet", "copa_distil_selftalk_distil"}) {
    args += " " + (runs / r).string();
  }
  int rc = RunCli(args);
  if (rc != 0) return {false, "report exited with " + std::to_string(rc)};
  const std::string best_expected =
      "dataset,model,lm,knowledge_source,dev_acc,test_acc\n"
      "copa,Majority,,,55.0,\n"
      "copa,Baseline,Distil-GPT2,,53.0,\n"
      "copa,Ext. Knowledge,GPT2-L,COMET,69.0,\n"
      "copa,Self-talk,Distil-GPT2,Distil-GPT2,66.0,\n";
  const std::string improvement_expected =
      "dataset,COMET,Distil-GPT2\n"
      "copa,+10.25,+13.0\n";
  bool best = ReadFile(out / "best_setup.csv") == best_expected;
  bool impr = ReadFile(out / "improvement.csv") == improvement_expected;
  return {best && impr, std::string("best_setup.csv ") + (best ? "matches" : "DIFFERS") +
                            ", improvement.csv " + (impr ? "matches" : "DIFFERS")};
}

// 9. Byte-identical reruns, zero computations on a warm cache.
Outcome DeterminismAndCache() {
  const fs::path cache = Scratch() / "det_cache";
  RunReport cold = RunScore(FlipConfig("det_cold", cache));
  RunReport warm = RunScore(FlipConfig("det_warm", cache));
  RunConfig serial_cfg = FlipConfig("det_serial", std::nullopt);
  serial_cfg.scoring.execution = Execution::kSerial;
  RunScore(serial_cfg);
  const std::string p0 = ReadFile(Scratch() / "det_cold" / "predictions.jsonl");
  bool identical = p0 == ReadFile(Scratch() / "det_warm" / "predictions.jsonl") &&
                   p0 == ReadFile(Scratch() / "det_serial" / "predictions.jsonl");
  bool zero = warm.counts.backend_computations == 0 &&
              warm.counts.cache_hits == cold.counts.lm_calls;
  return {identical && zero,
          Fmt("cold %g computations, warm %g computations / %g hits", 
              static_cast<double>(cold.counts.backend_computations),
              static_cast<double>(warm.counts.backend_computations),
              static_cast<double>(warm.counts.cache_hits)) +
              (identical ? ", predictions identical" : ", predictions DIFFER")};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  struct Criterion {
    int id;
    const char *name;
    double budget_ms;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {1, "cross-entropy oracle", 1000, CeOracle},
      {2, "nucleus sampling", 10000, Nucleus},
      {3, "min-monotonicity", 0, MinMonotonicity},
      {4, "flip benchmark", 60000, FlipBenchmark},
      {5, "graph-path oracle", 30000, GraphPaths},
      {6, "flip-accounting identity", 0, FlipIdentity},
      {7, "agreement statistics", 0, Kappa},
      {8, "report reproduction", 0, Report},
      {9, "determinism and cache", 0, DeterminismAndCache},
  };
  int failed = 0;
  for (const auto &c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start).count();
    if (c.budget_ms > 0 && ms > c.budget_ms) {
      o.pass = false;
      o.detail += Fmt(" (over the %.0f ms budget)", c.budget_ms);
    }
    if (!o.pass) ++failed;
    std::printf("criterion %d %s: %s (%.0f ms) %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL",
                ms, o.detail.c_str());
  }
  std::fflush(stdout);
  fs::remove_all(Scratch());
  return failed;
}
