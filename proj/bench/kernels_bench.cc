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

// Serial reference kernels against their OpenMP counterparts.

#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "selftalk/concept_graph.h"
#include "selftalk/scorer.h"
#include "selftalk/toy_lm.h"

namespace selftalk {
namespace {

const std::filesystem::path kFlip =
    std::filesystem::path(SELFTALK_DATA_DIR) / "fixtures" / "flip_bench";

std::vector<std::string> Texts(int n) {
  static const char *kNames[] = {"Ana", "Ben", "Cleo", "Dev", "Eli"};
  static const char *kActions[] = {"climbed up.", "went home.", "painted it.",
                                   "cut the rope.", "sat down."};
  std::vector<std::string> out;
  std::mt19937_64 rng(1);
  for (int i = 0; i < n; ++i) {
    out.push_back(std::string(kNames[rng() % 5]) + " dropped the glass. " +
                  kNames[rng() % 5] + " needs a ladder. " + kActions[rng() % 5]);
  }
  return out;
}

const ToyBackend &Scorer() {
  static auto *backend = ToyBackend::FromFile(kFlip / "scorer.model").release();
  return *backend;
}

void BM_CrossEntropySerial(benchmark::State &state) {
  auto texts = Texts(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(CrossEntropySerial(Scorer(), texts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_CrossEntropyParallel(benchmark::State &state) {
  auto texts = Texts(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(CrossEntropyParallel(Scorer(), texts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_CrossEntropySerial)->Arg(64)->Arg(512);
BENCHMARK(BM_CrossEntropyParallel)->Arg(64)->Arg(512);

// Dense random graph over content-word node names.
const ConceptGraph &Graph() {
  static const ConceptGraph *graph = [] {
    RelationTemplates templates = {{"RelatedTo", "[head] is related to [tail]"},
                                   {"UsedFor", "[head] is used for [tail]"}};
    std::vector<GraphEdge> edges;
    std::mt19937_64 rng(7);
    char a[16], b[16];
    for (int i = 0; i < 3000; ++i) {
      std::snprintf(a, sizeof(a), "n%03d", static_cast<int>(rng() % 200));
      std::snprintf(b, sizeof(b), "n%03d", static_cast<int>(rng() % 200));
      edges.push_back({rng() % 2 ? "RelatedTo" : "UsedFor", a, b, 1.0});
    }
    return new ConceptGraph(ConceptGraph::FromEdges(edges, templates));
  }();
  return *graph;
}

Instance GraphInstance() {
  Instance inst;
  inst.id = "bench";
  inst.context = "n001 n002 n003 n004 n005 n006";
  inst.choices = {"n010 n011 n012", "n020 n021 n022"};
  return inst;
}

void BM_GraphClarifications(benchmark::State &state) {
  const Execution exec = state.range(0) ? Execution::kParallel : Execution::kSerial;
  const Instance inst = GraphInstance();
  for (auto _ : state) {
    benchmark::DoNotOptimize(GraphClarifications(Graph(), inst, 2, exec));
  }
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}

BENCHMARK(BM_GraphClarifications)->Arg(0)->Arg(1);

}  // namespace
}  // namespace selftalk

BENCHMARK_MAIN();
