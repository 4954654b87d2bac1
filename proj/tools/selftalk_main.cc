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

// selftalk: batch command-line driver.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "selftalk/annotation.h"
#include "selftalk/concept_graph.h"
#include "selftalk/dataset.h"
#include "selftalk/digest.h"
#include "selftalk/errors.h"
#include "selftalk/eval.h"
#include "selftalk/ngram_table.h"
#include "selftalk/report.h"
#include "selftalk/run.h"
#include "selftalk/text.h"

namespace fs = std::filesystem;
using namespace selftalk;  // NOLINT(build/namespaces)

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDataset = 3;
constexpr int kExitBackend = 4;
constexpr int kExitIdentity = 5;

// Flags that feed a RunConfig. Unset optionals leave config-file / env /
// default values in place.
struct RunFlags {
  std::optional<std::string> task, task_file, dataset, split, scorer, generator,
      knowledge, cache_dir, out, placement, conceptnet, ngrams, routes, data_dir,
      execution;
  std::optional<uint64_t> seed;
  std::optional<int> max_path_len;
  std::string config;
  bool copa_swap = false;
  bool no_bare = false;
};

void AddRunFlags(CLI::App *cmd, RunFlags &f, bool scoring) {
  cmd->add_option("--config", f.config, "JSON run configuration file");
  cmd->add_option("--task", f.task, "built-in task id (copa, piqa, ...)");
  cmd->add_option("--task-file", f.task_file, "custom task spec JSON");
  cmd->add_option("--dataset", f.dataset, "instances, one JSON object per line");
  cmd->add_option("--split", f.split, "split label recorded in eval output (default dev)");
  cmd->add_option("--scorer-backend", f.scorer, "toy:<model.json> or remote:<model>[@url]");
  cmd->add_option("--generator-backend", f.generator, "backend used for generation");
  cmd->add_option("--seed", f.seed, "root seed (default 0)");
  cmd->add_option("--cache-dir", f.cache_dir, "response cache directory");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--data-dir", f.data_dir, "directory with task specs and templates");
  cmd->add_option("--execution", f.execution, "parallel or serial");
  cmd->add_flag("--copa-swap-templates", f.copa_swap, "swap COPA answer templates");
  if (!scoring) return;
  cmd->add_option("--knowledge", f.knowledge,
                  "selftalk|conceptnet|ngrams|generative|all, comma separated");
  cmd->add_option("--placement", f.placement, "after_context or appended");
  cmd->add_flag("--no-bare-option", f.no_bare, "drop the unclarified option from the min");
  cmd->add_option("--conceptnet", f.conceptnet, "ConceptNet dump or .index file");
  cmd->add_option("--ngrams", f.ngrams, "n-gram dump or .index file");
  cmd->add_option("--routes", f.routes, "relation route table for generative knowledge");
  cmd->add_option("--max-path-len", f.max_path_len, "ConceptNet path length (default 2)");
}

// Precedence: flag > config file > environment > default.
RunConfig BuildRunConfig(const RunFlags &f) {
  RunConfig cfg;
  cfg.data_dir = SELFTALK_DATA_DIR;
  if (const char *env = std::getenv("SELFTALK_ENDPOINT"); env) cfg.endpoint = env;
  if (const char *env = std::getenv("SELFTALK_API_TOKEN"); env) cfg.api_token = env;
  if (!f.config.empty()) {
    try {
      ApplyConfigJson(Json::parse(ReadFile(f.config)), cfg);
    } catch (const Json::exception &e) {
      throw ConfigError("config " + f.config + ": " + e.what());
    }
  }
  if (f.task) cfg.task = *f.task;
  if (f.task_file) cfg.task_file = *f.task_file;
  if (f.dataset) cfg.dataset = *f.dataset;
  if (f.split) cfg.split = *f.split;
  if (f.scorer) cfg.scorer_backend = *f.scorer;
  if (f.generator) cfg.generator_backend = *f.generator;
  if (f.knowledge) cfg.knowledge = ParseKnowledge(*f.knowledge);
  if (f.seed) cfg.seed = *f.seed;
  if (f.cache_dir) cfg.cache_dir = *f.cache_dir;
  if (f.out) cfg.out_dir = *f.out;
  if (f.data_dir) cfg.data_dir = *f.data_dir;
  if (f.placement) cfg.scoring.placement = ParsePlacement(*f.placement);
  if (f.no_bare) cfg.scoring.include_bare_option = false;
  if (f.conceptnet) cfg.conceptnet_path = *f.conceptnet;
  if (f.ngrams) cfg.ngrams_path = *f.ngrams;
  if (f.routes) cfg.routes_path = *f.routes;
  if (f.max_path_len) cfg.max_path_len = *f.max_path_len;
  if (f.copa_swap) cfg.copa_swap_templates = true;
  if (f.execution) {
    if (*f.execution == "serial") {
      cfg.scoring.execution = Execution::kSerial;
    } else if (*f.execution == "parallel") {
      cfg.scoring.execution = Execution::kParallel;
    } else {
      throw ConfigError("--execution must be serial or parallel");
    }
  }
  return cfg;
}

template <typename T>
std::vector<T> ReadJsonLines(const fs::path &path) {
  std::vector<T> out;
  std::istringstream in(ReadFile(path));
  std::string line;
  size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (Trim(line).empty()) continue;
    try {
      out.push_back(Json::parse(line).get<T>());
    } catch (const Json::exception &e) {
      throw DatasetError(path.string() + " line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

template <typename T>
std::string JsonLines(const std::vector<T> &items) {
  std::string out;
  for (const auto &item : items) out += Json(item).dump() + "\n";
  return out;
}

void Emit(const std::optional<std::string> &out, const std::string &bytes) {
  if (out) {
    WriteFileAtomic(*out, bytes);
  } else {
    std::cout << bytes;
  }
}

std::string TaskOfRun(const fs::path &run_dir, const std::optional<std::string> &flag) {
  if (flag) return *flag;
  if (fs::exists(run_dir / "eval.json")) {
    return Json::parse(ReadFile(run_dir / "eval.json")).value("task", std::string());
  }
  Json manifest = VerifyManifest(run_dir);
  return manifest.at("config").value("task", std::string());
}

int Dispatch(int argc, char **argv) {
  CLI::App app{"Unsupervised commonsense QA with self-talk clarifications"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off");

  // score
  RunFlags score_flags;
  auto *score = app.add_subcommand("score", "score a dataset, baseline or clarified");
  AddRunFlags(score, score_flags, true);

  // selftalk
  RunFlags st_flags;
  auto *st = app.add_subcommand("selftalk", "generate self-talk clarifications only");
  AddRunFlags(st, st_flags, false);

  // kb
  auto *kb = app.add_subcommand("kb", "ingest or query knowledge dumps");
  kb->require_subcommand(1);
  std::string kb_kind, kb_in, kb_out, kb_templates;
  auto *kb_ingest = kb->add_subcommand("ingest", "build a binary index from a dump");
  kb_ingest->add_option("--kind", kb_kind, "conceptnet or ngrams")->required();
  kb_ingest->add_option("--input", kb_in, "dump file")->required();
  kb_ingest->add_option("--out", kb_out, "index file")->required();
  kb_ingest->add_option("--templates", kb_templates, "relation templates JSON");
  std::string q_kind, q_index, q_a, q_b, q_templates;
  int q_len = 2;
  auto *kb_query = kb->add_subcommand("query", "list knowledge linking two terms");
  kb_query->add_option("--kind", q_kind, "conceptnet or ngrams")->required();
  kb_query->add_option("--index", q_index, "index or dump file")->required();
  kb_query->add_option("--from", q_a, "first term")->required();
  kb_query->add_option("--to", q_b, "second term")->required();
  kb_query->add_option("--max-path-len", q_len, "ConceptNet path length");
  kb_query->add_option("--templates", q_templates, "relation templates JSON");

  // eval
  std::string ev_pred, ev_data, ev_task, ev_split = "dev";
  std::optional<std::string> ev_out;
  auto *ev = app.add_subcommand("eval", "accuracy of a prediction file");
  ev->add_option("--predictions", ev_pred)->required();
  ev->add_option("--dataset", ev_data)->required();
  ev->add_option("--task", ev_task);
  ev->add_option("--split", ev_split);
  ev->add_option("--out", ev_out, "write eval JSON here instead of stdout");

  // analyze
  auto *an = app.add_subcommand("analyze", "flips, annotation files, error taxonomy");
  an->require_subcommand(1);
  std::string fl_run, fl_data;
  std::optional<std::string> fl_task, fl_out;
  auto *flips = an->add_subcommand("flips", "list flip clarifications and check accounting");
  flips->add_option("--run", fl_run, "clarified score output directory")->required();
  flips->add_option("--dataset", fl_data)->required();
  flips->add_option("--task", fl_task);
  flips->add_option("--out", fl_out, "flip judgments JSONL");

  std::string sa_in;
  int sa_cap = 25;
  uint64_t sa_seed = 0;
  std::optional<std::string> sa_out;
  auto *sample = an->add_subcommand("sample", "sample flip judgments for annotation");
  sample->add_option("--judgments", sa_in)->required();
  sample->add_option("--per-cell", sa_cap, "items per (task, source) cell");
  sample->add_option("--seed", sa_seed);
  sample->add_option("--out", sa_out);

  std::string ann_in;
  int ann_raters = 3;
  std::optional<std::string> ann_out;
  auto *ann = an->add_subcommand("annotations", "aggregate ratings and agreement");
  ann->add_option("--records", ann_in)->required();
  ann->add_option("--raters", ann_raters);
  ann->add_option("--out", ann_out);

  std::string tx_in;
  std::optional<std::string> tx_out;
  auto *tx_export = an->add_subcommand("taxonomy-export", "worksheet for harmful flips");
  tx_export->add_option("--judgments", tx_in)->required();
  tx_export->add_option("--out", tx_out);
  std::string ti_in;
  std::optional<std::string> ti_out;
  auto *tx_ingest = an->add_subcommand("taxonomy-ingest", "label distribution of a worksheet");
  tx_ingest->add_option("--worksheet", ti_in)->required();
  tx_ingest->add_option("--out", ti_out);

  // report
  std::vector<std::string> rp_runs;
  std::string rp_out;
  auto *rp = app.add_subcommand("report", "best-setup table and improvement matrix");
  rp->add_option("--runs", rp_runs, "score output directories")->required();
  rp->add_option("--out", rp_out, "report directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));
  spdlog::set_default_logger(spdlog::default_logger());

  if (*score) {
    RunReport r = RunScore(BuildRunConfig(score_flags));
    if (r.eval) {
      std::cout << "accuracy " << FormatAccuracy(r.eval->accuracy);
      if (r.baseline_eval) std::cout << " (baseline " << FormatAccuracy(r.baseline_eval->accuracy) << ")";
      std::cout << "\n";
    }
    if (r.flips && !r.flips->Holds()) {
      spdlog::error("flip accounting identity violated");
      return kExitIdentity;
    }
    return 0;
  }
  if (*st) {
    RunSelfTalk(BuildRunConfig(st_flags));
    return 0;
  }
  if (*kb_ingest) {
    if (kb_kind == "conceptnet") {
      fs::path tpl = kb_templates.empty() ? fs::path(SELFTALK_DATA_DIR) / "relation_templates.json"
                                          : fs::path(kb_templates);
      GraphIngestStats s;
      ConceptGraph g = ConceptGraph::IngestFile(kb_in, LoadRelationTemplates(tpl), &s);
      g.Save(kb_out);
      std::cout << "lines " << s.lines << " edges " << s.edges << " nodes " << g.num_nodes()
                << " skipped: self_loops " << s.self_loops << " unknown_relations "
                << s.unknown_relations << " non_english " << s.non_english
                << " duplicates " << s.duplicates << "\n";
    } else if (kb_kind == "ngrams") {
      NgramIngestStats s;
      NgramTable t = NgramTable::IngestFile(kb_in, &s);
      t.Save(kb_out);
      std::cout << "lines " << s.lines << " entries " << s.entries << " out_of_range "
                << s.out_of_range << " merged " << s.merged << "\n";
    } else {
      throw ConfigError("--kind must be conceptnet or ngrams");
    }
    return 0;
  }
  if (*kb_query) {
    const bool is_index = fs::path(q_index).extension() == ".index";
    if (q_kind == "conceptnet") {
      fs::path tpl = q_templates.empty() ? fs::path(SELFTALK_DATA_DIR) / "relation_templates.json"
                                         : fs::path(q_templates);
      ConceptGraph g = is_index ? ConceptGraph::Load(q_index)
                                : ConceptGraph::IngestFile(q_index, LoadRelationTemplates(tpl));
      for (const auto &p : g.FindPaths(NormalizeConcept(q_a), NormalizeConcept(q_b), q_len)) {
        std::cout << g.Verbalize(p) << "\n";
      }
    } else if (q_kind == "ngrams") {
      NgramTable t = is_index ? NgramTable::Load(q_index) : NgramTable::IngestFile(q_index);
      for (const auto *e : t.Containing(ToLower(q_a), ToLower(q_b))) {
        std::cout << e->count << "\t" << e->text << "\n";
      }
    } else {
      throw ConfigError("--kind must be conceptnet or ngrams");
    }
    return 0;
  }
  if (*ev) {
    EvalResult r = Evaluate(ReadPredictions(ev_pred), LoadInstances(ev_data));
    r.task = ev_task;
    r.split = ev_split;
    Emit(ev_out, Json(r).dump(2) + "\n");
    return 0;
  }
  if (*flips) {
    const fs::path run(fl_run);
    if (!fs::exists(run / "baseline.jsonl")) {
      throw DatasetError(run.string() + " has no baseline.jsonl (not a clarified run)");
    }
    auto base = ReadPredictions(run / "baseline.jsonl");
    auto clar = ReadPredictions(run / "predictions.jsonl");
    auto instances = LoadInstances(fl_data);
    const std::string task = TaskOfRun(run, fl_task);
    auto judgments = FindFlipClarifications(base, clar, instances, FlipKind::kUseful, task);
    for (auto &j : FindFlipClarifications(base, clar, instances, FlipKind::kHarmful, task)) {
      judgments.push_back(std::move(j));
    }
    if (fl_out) WriteFileAtomic(*fl_out, JsonLines(judgments));
    FlipAccounting a = AccountFlips(base, clar, instances);
    const double base_acc = 100.0 * a.baseline_correct / a.n;
    const double clar_acc = 100.0 * a.clarified_correct / a.n;
    std::cout << "n " << a.n << " baseline " << FormatAccuracy(base_acc) << " clarified "
              << FormatAccuracy(clar_acc) << " useful " << a.useful << " harmful "
              << a.harmful << "\n";
    if (!a.Holds()) {
      std::cout << "identity VIOLATED: clarified != baseline + (useful - harmful)\n";
      return kExitIdentity;
    }
    std::cout << "identity holds: clarified = baseline + (useful - harmful) / n * 100\n";
    return 0;
  }
  if (*sample) {
    auto tasks = SampleForAnnotation(ReadJsonLines<ClarificationJudgment>(sa_in), sa_cap, sa_seed);
    Emit(sa_out, JsonLines(tasks));
    return 0;
  }
  if (*ann) {
    AnnotationSummary s = AggregateAnnotations(ParseAnnotationRecords(ReadFile(ann_in)), ann_raters);
    Json doc = {{"items", Json::array()}, {"agreement", Json::object()}};
    for (const auto &item : s.items) {
      doc["items"].push_back({{"item_id", item.item_id},
                              {"majority", item.majority},
                              {"unresolved", item.unresolved}});
    }
    for (const auto &[cat, ag] : s.agreement) {
      doc["agreement"][cat] = {{"items", ag.items},
                               {"fleiss_kappa", ag.fleiss_kappa},
                               {"pairwise_agreement", ag.pairwise_agreement}};
    }
    Emit(ann_out, doc.dump(2) + "\n");
    return 0;
  }
  if (*tx_export) {
    Emit(tx_out, ExportErrorTaxonomy(ReadJsonLines<ClarificationJudgment>(tx_in)));
    return 0;
  }
  if (*tx_ingest) {
    Emit(ti_out, FormatErrorDistribution(IngestErrorTaxonomy(ReadFile(ti_in))));
    return 0;
  }
  if (*rp) {
    std::vector<fs::path> dirs(rp_runs.begin(), rp_runs.end());
    auto results = LoadRunResults(dirs);
    auto rows = BestSetupTable(results);
    auto matrix = ComputeImprovementMatrix(results);
    fs::create_directories(rp_out);
    WriteFileAtomic(fs::path(rp_out) / "best_setup.csv", BestSetupCsv(rows));
    WriteFileAtomic(fs::path(rp_out) / "best_setup.txt", BestSetupText(rows));
    WriteFileAtomic(fs::path(rp_out) / "improvement.csv", ImprovementCsv(matrix));
    WriteFileAtomic(fs::path(rp_out) / "improvement.txt", ImprovementText(matrix));
    std::cout << BestSetupText(rows) << "\n" << ImprovementText(matrix);
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  try {
    return Dispatch(argc, argv);
  } catch (const ConfigError &e) {
    spdlog::error("config error: {}", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument &e) {
    spdlog::error("config error: {}", e.what());
    return kExitConfig;
  } catch (const DatasetError &e) {
    spdlog::error("dataset error: {}", e.what());
    return kExitDataset;
  } catch (const TemplateError &e) {
    spdlog::error("template error: {}", e.what());
    return kExitDataset;
  } catch (const PrefixMismatchError &e) {
    spdlog::error("template error: {}", e.what());
    return kExitDataset;
  } catch (const BackendError &e) {
    spdlog::error("backend error: {}", e.what());
    return kExitBackend;
  } catch (const std::exception &e) {
    spdlog::error("{}", e.what());
    return 1;
  }
}
