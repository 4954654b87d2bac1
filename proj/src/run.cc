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

#include "selftalk/run.h"

#include <algorithm>
#include <atomic>
#include <ctime>
#include <exception>
#include <map>
#include <sstream>

#include <omp.h>
#include <spdlog/spdlog.h>

#include "selftalk/concept_graph.h"
#include "selftalk/dataset.h"
#include "selftalk/digest.h"
#include "selftalk/errors.h"
#include "selftalk/remote_backend.h"
#include "selftalk/response_cache.h"
#include "selftalk/task_spec.h"
#include "selftalk/text.h"
#include "selftalk/toy_lm.h"

namespace selftalk {

namespace {

const std::vector<std::string> &AllSources() {
  static const auto *sources =
      new std::vector<std::string>{"selftalk", "generative", "conceptnet", "ngrams"};
  return *sources;
}

bool Uses(const RunConfig &cfg, const std::string &source) {
  return std::find(cfg.knowledge.begin(), cfg.knowledge.end(), source) !=
         cfg.knowledge.end();
}

bool NeedsGenerator(const RunConfig &cfg) {
  return Uses(cfg, "selftalk") || Uses(cfg, "generative");
}

std::string IsoTime(std::chrono::system_clock::time_point t) {
  std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool IsIndexFile(const std::filesystem::path &p) { return p.extension() == ".index"; }

// Everything a run needs, loaded once before any instance is processed.
struct RunContext {
  TaskSpec spec;
  std::vector<Instance> instances;
  std::shared_ptr<ResponseCache> cache;
  std::shared_ptr<const LMBackend> scorer;
  std::shared_ptr<const LMBackend> generator;
  std::optional<ConceptGraph> graph;
  std::optional<NgramTable> ngrams;
  std::optional<RouteTable> routes;
};

RunContext Prepare(const RunConfig &cfg) {
  cfg.Validate();
  RunContext ctx;
  ctx.spec = cfg.task_file ? LoadTaskSpec(*cfg.task_file)
                           : LoadBuiltinTaskSpec(cfg.task, cfg.data_dir);
  ctx.spec.copa_swap_templates = ctx.spec.copa_swap_templates || cfg.copa_swap_templates;
  if (Uses(cfg, "selftalk")) ctx.spec.ValidateForSelfTalk();
  if (Uses(cfg, "generative")) {
    ctx.routes = LoadRouteTable(cfg.routes_path.value_or(cfg.data_dir / "routes.json"));
  }
  if (Uses(cfg, "conceptnet")) {
    if (IsIndexFile(*cfg.conceptnet_path)) {
      ctx.graph = ConceptGraph::Load(*cfg.conceptnet_path);
    } else {
      ctx.graph = ConceptGraph::IngestFile(
          *cfg.conceptnet_path,
          LoadRelationTemplates(cfg.data_dir / "relation_templates.json"));
    }
  }
  if (Uses(cfg, "ngrams")) {
    ctx.ngrams = IsIndexFile(*cfg.ngrams_path) ? NgramTable::Load(*cfg.ngrams_path)
                                               : NgramTable::IngestFile(*cfg.ngrams_path);
  }

  ctx.instances = LoadInstances(cfg.dataset);
  if (ctx.instances.empty()) throw DatasetError("dataset " + cfg.dataset.string() + " is empty");

  ctx.cache = std::make_shared<ResponseCache>(cfg.cache_dir);
  ctx.scorer = std::make_shared<CachingBackend>(MakeBackend(cfg.scorer_backend, cfg), ctx.cache);
  if (cfg.generator_backend && NeedsGenerator(cfg)) {
    ctx.generator =
        std::make_shared<CachingBackend>(MakeBackend(*cfg.generator_backend, cfg), ctx.cache);
  }

  std::filesystem::create_directories(cfg.out_dir);
  std::filesystem::remove(cfg.out_dir / "manifest.json");
  return ctx;
}

std::vector<Clarification> GatherClarifications(const RunConfig &cfg,
                                                const RunContext &ctx,
                                                const Instance &inst) {
  std::vector<Clarification> all;
  auto append = [&](std::vector<Clarification> more) {
    for (auto &c : more) all.push_back(std::move(c));
  };
  if (Uses(cfg, "selftalk")) {
    append(GenerateClarifications(*ctx.generator, ctx.spec, inst, cfg.selftalk,
                                  cfg.seed, cfg.scoring.execution));
  }
  if (Uses(cfg, "generative")) {
    append(GenerativeKbClarifications(*ctx.generator, *ctx.routes, inst,
                                      cfg.generative, cfg.seed));
  }
  if (Uses(cfg, "conceptnet")) {
    append(GraphClarifications(*ctx.graph, inst, cfg.max_path_len, cfg.scoring.execution));
  }
  if (Uses(cfg, "ngrams")) append(NgramClarifications(*ctx.ngrams, inst, cfg.ngrams));
  return all;
}

// Runs body(i) over all instances, in parallel unless configured serial,
// keeping the first exception.
template <typename Fn>
void ForEachInstance(const RunConfig &cfg, const RunContext &ctx, Fn body) {
  const int n = static_cast<int>(ctx.instances.size());
  if (cfg.scoring.execution == Execution::kSerial) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  int threads = std::min(omp_get_max_threads(), ctx.scorer->descriptor().max_concurrency);
  if (ctx.generator) {
    threads = std::min(threads, ctx.generator->descriptor().max_concurrency);
  }
  std::exception_ptr error;
  std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, threads))
  for (int i = 0; i < n; ++i) {
    // No break in an OpenMP loop; skip the rest once anything has failed.
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      body(i);
    } catch (...) {
      failed = true;
#pragma omp critical(selftalk_run_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

std::string ClarificationLines(const std::vector<Instance> &instances,
                               const std::vector<std::vector<Clarification>> &per_instance) {
  std::string out;
  for (size_t i = 0; i < instances.size(); ++i) {
    out += Json{{"instance_id", instances[i].id},
                {"clarifications", per_instance[i]}}.dump() + "\n";
  }
  return out;
}

bool AllGold(const std::vector<Instance> &instances) {
  return std::all_of(instances.begin(), instances.end(),
                     [](const Instance &i) { return i.gold.has_value(); });
}

RunCounts Counts(const RunContext &ctx) {
  CacheStats s = ctx.cache->stats();
  return {static_cast<int>(ctx.instances.size()), s.requests, s.hits, s.computations};
}

Json CountsJson(const RunCounts &c) {
  return {{"instances", c.instances},
          {"lm_calls", c.lm_calls},
          {"cache_hits", c.cache_hits},
          {"backend_computations", c.backend_computations}};
}

void Write(const RunConfig &cfg, const std::string &name, const std::string &bytes,
           std::vector<std::string> &files) {
  WriteFileAtomic(cfg.out_dir / name, bytes);
  files.push_back(name);
}

}  // namespace

void RunConfig::Validate() const {
  if (task.empty() && !task_file) throw ConfigError("no task given (--task)");
  if (dataset.empty()) throw ConfigError("no dataset given (--dataset)");
  if (scorer_backend.empty()) throw ConfigError("no scorer backend given (--scorer-backend)");
  if (out_dir.empty()) throw ConfigError("no output directory given (--out)");
  if (split.empty()) throw ConfigError("split must not be empty");
  for (const auto &k : knowledge) {
    if (std::find(AllSources().begin(), AllSources().end(), k) == AllSources().end()) {
      throw ConfigError("unknown knowledge source '" + k + "'");
    }
  }
  if (NeedsGenerator(*this) && !generator_backend) {
    throw ConfigError("self-talk and generative knowledge need --generator-backend");
  }
  if (Uses(*this, "conceptnet") && !conceptnet_path) {
    throw ConfigError("conceptnet knowledge needs --conceptnet <dump or index>");
  }
  if (Uses(*this, "ngrams") && !ngrams_path) {
    throw ConfigError("ngrams knowledge needs --ngrams <dump or index>");
  }
  if (max_path_len < 1) throw ConfigError("max_path_len must be at least 1");
  if (ngrams.min_freq < 1 || ngrams.top_k < 0) throw ConfigError("bad n-gram options");
  if (remote_max_concurrency < 1) throw ConfigError("remote_max_concurrency must be positive");
  selftalk.Validate();
  if (!(generative.top_p > 0.0 && generative.top_p <= 1.0) ||
      generative.max_new_tokens < 1 || generative.samples_per_relation < 1) {
    throw ConfigError("bad generative knowledge options");
  }
}

Json RunConfig::ToJson() const {
  auto opt_path = [](const std::optional<std::filesystem::path> &p) {
    return p ? Json(p->string()) : Json(nullptr);
  };
  return Json{
      {"task", task},
      {"task_file", opt_path(task_file)},
      {"dataset", dataset.string()},
      {"split", split},
      {"scorer_backend", scorer_backend},
      {"generator_backend", generator_backend ? Json(*generator_backend) : Json(nullptr)},
      {"knowledge", knowledge},
      {"selftalk", selftalk},
      {"placement", PlacementName(scoring.placement)},
      {"include_bare_option", scoring.include_bare_option},
      {"execution", scoring.execution == Execution::kSerial ? "serial" : "parallel"},
      {"generative", {{"top_p", generative.top_p},
                      {"max_new_tokens", generative.max_new_tokens},
                      {"samples_per_relation", generative.samples_per_relation}}},
      {"ngram_min_freq", ngrams.min_freq},
      {"ngram_top_k", ngrams.top_k},
      {"max_path_len", max_path_len},
      {"seed", seed},
      {"cache_dir", opt_path(cache_dir)},
      {"out", out_dir.string()},
      {"data_dir", data_dir.string()},
      {"conceptnet", opt_path(conceptnet_path)},
      {"ngrams", opt_path(ngrams_path)},
      {"routes", opt_path(routes_path)},
      {"copa_swap_templates", copa_swap_templates},
      {"endpoint", endpoint},
      {"remote_max_concurrency", remote_max_concurrency},
  };
}

void ApplyConfigJson(const Json &doc, RunConfig &cfg) {
  if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
  auto path = [](const Json &v) { return std::filesystem::path(v.get<std::string>()); };
  try {
    for (const auto &[key, v] : doc.items()) {
      if (key == "task") {
        cfg.task = v.get<std::string>();
      } else if (key == "task_file") {
        if (!v.is_null()) cfg.task_file = path(v);
      } else if (key == "dataset") {
        cfg.dataset = path(v);
      } else if (key == "split") {
        cfg.split = v.get<std::string>();
      } else if (key == "scorer_backend") {
        cfg.scorer_backend = v.get<std::string>();
      } else if (key == "generator_backend") {
        if (!v.is_null()) cfg.generator_backend = v.get<std::string>();
      } else if (key == "knowledge") {
        if (v.is_array()) {
          std::string joined;
          for (const auto &k : v) joined += (joined.empty() ? "" : ",") + k.get<std::string>();
          cfg.knowledge = ParseKnowledge(joined);
        } else {
          cfg.knowledge = ParseKnowledge(v.get<std::string>());
        }
      } else if (key == "selftalk") {
        cfg.selftalk = v.get<SelfTalkConfig>();
      } else if (key == "placement") {
        cfg.scoring.placement = ParsePlacement(v.get<std::string>());
      } else if (key == "include_bare_option") {
        cfg.scoring.include_bare_option = v.get<bool>();
      } else if (key == "execution") {
        std::string e = v.get<std::string>();
        if (e != "serial" && e != "parallel") throw ConfigError("execution must be serial or parallel");
        cfg.scoring.execution = e == "serial" ? Execution::kSerial : Execution::kParallel;
      } else if (key == "generative") {
        cfg.generative.top_p = v.value("top_p", cfg.generative.top_p);
        cfg.generative.max_new_tokens = v.value("max_new_tokens", cfg.generative.max_new_tokens);
        cfg.generative.samples_per_relation =
            v.value("samples_per_relation", cfg.generative.samples_per_relation);
      } else if (key == "ngram_min_freq") {
        cfg.ngrams.min_freq = v.get<int64_t>();
      } else if (key == "ngram_top_k") {
        cfg.ngrams.top_k = v.get<int>();
      } else if (key == "max_path_len") {
        cfg.max_path_len = v.get<int>();
      } else if (key == "seed") {
        cfg.seed = v.get<uint64_t>();
      } else if (key == "cache_dir") {
        if (!v.is_null()) cfg.cache_dir = path(v);
      } else if (key == "out") {
        cfg.out_dir = path(v);
      } else if (key == "data_dir") {
        cfg.data_dir = path(v);
      } else if (key == "conceptnet") {
        if (!v.is_null()) cfg.conceptnet_path = path(v);
      } else if (key == "ngrams") {
        if (!v.is_null()) cfg.ngrams_path = path(v);
      } else if (key == "routes") {
        if (!v.is_null()) cfg.routes_path = path(v);
      } else if (key == "copa_swap_templates") {
        cfg.copa_swap_templates = v.get<bool>();
      } else if (key == "endpoint") {
        cfg.endpoint = v.get<std::string>();
      } else if (key == "api_token") {
        cfg.api_token = v.get<std::string>();
      } else if (key == "remote_max_concurrency") {
        cfg.remote_max_concurrency = v.get<int>();
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  } catch (const Json::exception &e) {
    throw ConfigError(std::string("config file: ") + e.what());
  }
}

std::vector<std::string> ParseKnowledge(const std::string &spec) {
  std::vector<std::string> requested;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = ToLower(Trim(item));
    if (item.empty() || item == "none") continue;
    if (item == "all") {
      requested = AllSources();
      continue;
    }
    if (std::find(AllSources().begin(), AllSources().end(), item) == AllSources().end()) {
      throw ConfigError("unknown knowledge source '" + item + "'");
    }
    requested.push_back(item);
  }
  std::vector<std::string> out;
  for (const auto &s : AllSources()) {
    if (std::find(requested.begin(), requested.end(), s) != requested.end()) out.push_back(s);
  }
  return out;
}

std::string KnowledgeId(const std::vector<std::string> &knowledge) {
  if (knowledge.empty()) return "none";
  if (knowledge.size() == AllSources().size()) return "all";
  std::string out;
  for (const auto &k : knowledge) out += (out.empty() ? "" : "+") + k;
  return out;
}

std::shared_ptr<const LMBackend> MakeBackend(const std::string &spec,
                                             const RunConfig &cfg) {
  if (StartsWith(spec, "toy:")) {
    return ToyBackend::FromFile(spec.substr(4));
  }
  if (StartsWith(spec, "remote:")) {
    RemoteConfig rc;
    std::string rest = spec.substr(7);
    size_t at = rest.find('@');
    rc.model = rest.substr(0, at);
    if (at != std::string::npos) rc.base_url = rest.substr(at + 1);
    if (rc.base_url.empty()) rc.base_url = cfg.endpoint;
    rc.api_token = cfg.api_token;
    rc.max_concurrency = cfg.remote_max_concurrency;
    rc.ApplyEnvironment();
    if (rc.model.empty()) throw ConfigError("remote backend spec needs a model name");
    return std::make_shared<RemoteBackend>(rc);
  }
  throw ConfigError("backend spec '" + spec + "' must start with toy: or remote:");
}

RunReport RunScore(const RunConfig &cfg) {
  const auto started = std::chrono::system_clock::now();
  RunContext ctx = Prepare(cfg);
  const bool clarified = !cfg.knowledge.empty();
  const size_t n = ctx.instances.size();

  RunReport report;
  report.predictions.resize(n);
  if (clarified) report.baseline.resize(n);
  std::vector<std::vector<Clarification>> clarifications(n);

  ForEachInstance(cfg, ctx, [&](int i) {
    const Instance &inst = ctx.instances[i];
    Prediction base = ScoreBaseline(*ctx.scorer, ctx.spec, inst, cfg.scoring.execution);
    if (!clarified) {
      report.predictions[i] = std::move(base);
      return;
    }
    clarifications[i] = GatherClarifications(cfg, ctx, inst);
    report.predictions[i] =
        ScoreWithClarifications(*ctx.scorer, ctx.spec, inst, clarifications[i], cfg.scoring);
    report.baseline[i] = std::move(base);
  });

  std::vector<std::string> files;
  Write(cfg, "predictions.jsonl", ToJsonLines(report.predictions), files);
  if (clarified) {
    Write(cfg, "baseline.jsonl", ToJsonLines(report.baseline), files);
    Write(cfg, "clarifications.jsonl", ClarificationLines(ctx.instances, clarifications),
          files);
  }

  Json counts;
  if (AllGold(ctx.instances)) {
    auto fill = [&](EvalResult r, const std::string &knowledge) {
      r.task = ctx.spec.name;
      r.split = cfg.split;
      r.scorer = ctx.scorer->descriptor().display_name;
      r.knowledge = knowledge;
      if (NeedsGenerator(cfg) && knowledge != "none" && ctx.generator) {
        r.generator = ctx.generator->descriptor().display_name;
      }
      return r;
    };
    report.eval = fill(Evaluate(report.predictions, ctx.instances), KnowledgeId(cfg.knowledge));
    if (clarified) {
      report.baseline_eval = fill(Evaluate(report.baseline, ctx.instances), "none");
      report.flips = AccountFlips(report.baseline, report.predictions, ctx.instances);
      Write(cfg, "baseline_eval.json", Json(*report.baseline_eval).dump(2) + "\n", files);
    }
    Write(cfg, "eval.json", Json(*report.eval).dump(2) + "\n", files);
  }

  report.counts = Counts(ctx);
  counts = CountsJson(report.counts);
  if (report.flips) {
    counts["flips"] = {{"useful", report.flips->useful},
                       {"harmful", report.flips->harmful},
                       {"baseline_correct", report.flips->baseline_correct},
                       {"clarified_correct", report.flips->clarified_correct},
                       {"identity_holds", report.flips->Holds()}};
  }
  WriteManifest(cfg.out_dir, cfg.ToJson(), counts, files, started,
                std::chrono::system_clock::now());
  spdlog::info("scored {} instances: {} LM calls, {} cache hits, {} computed",
               report.counts.instances, report.counts.lm_calls,
               report.counts.cache_hits, report.counts.backend_computations);
  return report;
}

RunReport RunSelfTalk(const RunConfig &cfg) {
  const auto started = std::chrono::system_clock::now();
  RunConfig st = cfg;
  st.knowledge = {"selftalk"};
  // Generation only; the scorer slot just has to name a loadable backend.
  if (st.scorer_backend.empty() && st.generator_backend) st.scorer_backend = *st.generator_backend;
  RunContext ctx = Prepare(st);
  std::vector<std::vector<Clarification>> clarifications(ctx.instances.size());
  ForEachInstance(st, ctx, [&](int i) {
    clarifications[i] = GenerateClarifications(*ctx.generator, ctx.spec, ctx.instances[i],
                                               st.selftalk, st.seed, st.scoring.execution);
  });
  std::vector<std::string> files;
  Write(st, "clarifications.jsonl", ClarificationLines(ctx.instances, clarifications), files);
  RunReport report;
  report.counts = Counts(ctx);
  WriteManifest(st.out_dir, st.ToJson(), CountsJson(report.counts), files, started,
                std::chrono::system_clock::now());
  return report;
}

void WriteManifest(const std::filesystem::path &dir, const Json &config,
                   const Json &counts, const std::vector<std::string> &files,
                   std::chrono::system_clock::time_point started,
                   std::chrono::system_clock::time_point finished) {
  Json outputs = Json::array();
  for (const auto &f : files) {
    outputs.push_back({{"file", f},
                       {"sha256", Sha256File(dir / f)},
                       {"bytes", std::filesystem::file_size(dir / f)}});
  }
  Json manifest = {{"version", kArtifactVersion},
                   {"config", config},
                   {"started_at", IsoTime(started)},
                   {"finished_at", IsoTime(finished)},
                   {"counts", counts},
                   {"outputs", outputs}};
  WriteFileAtomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

Json VerifyManifest(const std::filesystem::path &dir) {
  const auto path = dir / "manifest.json";
  if (!std::filesystem::exists(path)) {
    throw DatasetError("run " + dir.string() + " has no manifest (incomplete run)");
  }
  Json manifest;
  try {
    manifest = Json::parse(ReadFile(path));
  } catch (const Json::exception &e) {
    throw DatasetError("manifest " + path.string() + ": " + e.what());
  }
  for (const auto &o : manifest.value("outputs", Json::array())) {
    const auto file = dir / o.at("file").get<std::string>();
    if (!std::filesystem::exists(file) ||
        Sha256File(file) != o.at("sha256").get<std::string>()) {
      throw DatasetError("output " + file.string() + " does not match the manifest");
    }
  }
  return manifest;
}

std::string ToJsonLines(const std::vector<Prediction> &predictions) {
  std::string out;
  for (const auto &p : predictions) out += Json(p).dump() + "\n";
  return out;
}

std::vector<Prediction> ReadPredictions(const std::filesystem::path &path) {
  std::vector<Prediction> out;
  std::istringstream in(ReadFile(path));
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    try {
      out.push_back(Json::parse(line).get<Prediction>());
    } catch (const Json::exception &e) {
      throw DatasetError(path.string() + " line " + std::to_string(line_no) + ": " +
                         e.what());
    }
  }
  return out;
}

}  // namespace selftalk
