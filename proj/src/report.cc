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

#include "selftalk/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "selftalk/digest.h"
#include "selftalk/errors.h"

namespace selftalk {

namespace {

enum class ModelType { kBaseline, kExtKnowledge, kSelfTalk };

ModelType TypeOf(const EvalResult &r) {
  if (r.knowledge.empty() || r.knowledge == "none") return ModelType::kBaseline;
  if (r.knowledge == "selftalk") return ModelType::kSelfTalk;
  return ModelType::kExtKnowledge;
}

const char *TypeName(ModelType t) {
  switch (t) {
    case ModelType::kBaseline: return "Baseline";
    case ModelType::kExtKnowledge: return "Ext. Knowledge";
    case ModelType::kSelfTalk: return "Self-talk";
  }
  return "";
}

int ColumnRank(const std::string &knowledge) {
  if (knowledge == "generative") return 0;
  if (knowledge == "conceptnet") return 1;
  if (knowledge == "ngrams") return 2;
  if (knowledge == "selftalk") return 4;
  return 3;
}

EvalResult ReadEval(const std::filesystem::path &path) {
  try {
    return Json::parse(ReadFile(path)).get<EvalResult>();
  } catch (const Json::exception &e) {
    throw DatasetError("run record " + path.string() + ": " + e.what());
  }
}

std::string Cell(const std::optional<double> &v) {
  return v ? FormatAccuracy(*v) : "";
}

std::string AlignedTable(const std::vector<std::vector<std::string>> &rows) {
  std::vector<size_t> widths;
  for (const auto &row : rows) {
    if (widths.size() < row.size()) widths.resize(row.size(), 0);
    for (size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
  }
  std::string out;
  for (const auto &row : rows) {
    std::string line;
    for (size_t i = 0; i < row.size(); ++i) {
      if (i > 0) line += "  ";
      line += row[i] + std::string(widths[i] - row[i].size(), ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

}  // namespace

std::vector<EvalResult> LoadRunResults(const std::vector<std::filesystem::path> &dirs) {
  std::vector<EvalResult> out;
  for (const auto &dir : dirs) {
    const auto manifest_path = dir / "manifest.json";
    if (!std::filesystem::exists(manifest_path)) {
      throw DatasetError("run " + dir.string() + " has no manifest (incomplete run)");
    }
    Json manifest;
    try {
      manifest = Json::parse(ReadFile(manifest_path));
    } catch (const Json::exception &e) {
      throw DatasetError("manifest " + manifest_path.string() + ": " + e.what());
    }
    std::map<std::string, std::string> digests;
    for (const auto &o : manifest.value("outputs", Json::array())) {
      digests[o.at("file").get<std::string>()] = o.at("sha256").get<std::string>();
    }
    for (const char *name : {"baseline_eval.json", "eval.json"}) {
      const auto path = dir / name;
      if (!std::filesystem::exists(path)) continue;
      auto it = digests.find(name);
      if (it == digests.end() || it->second != Sha256File(path)) {
        throw DatasetError(path.string() + " does not match its manifest entry");
      }
      out.push_back(ReadEval(path));
    }
  }
  return out;
}

std::string KnowledgeLabel(const EvalResult &r) {
  if (r.knowledge == "selftalk" || r.knowledge == "generative") {
    return r.generator.empty() ? r.knowledge : r.generator;
  }
  if (r.knowledge == "conceptnet") return "ConceptNet";
  if (r.knowledge == "ngrams") return "Google Ngrams";
  if (r.knowledge == "none" || r.knowledge.empty()) return "";
  return r.knowledge;
}

std::vector<BestSetupRow> BestSetupTable(const std::vector<EvalResult> &results) {
  std::vector<std::string> tasks;
  for (const auto &r : results) {
    if (std::find(tasks.begin(), tasks.end(), r.task) == tasks.end()) tasks.push_back(r.task);
  }
  std::vector<BestSetupRow> rows;
  for (const auto &task : tasks) {
    std::optional<double> maj_dev;
    std::optional<double> maj_test;
    for (const auto &r : results) {
      if (r.task != task) continue;
      if (r.split == "dev" && !maj_dev) maj_dev = r.majority_accuracy;
      if (r.split == "test" && !maj_test) maj_test = r.majority_accuracy;
    }
    rows.push_back({task, "Majority", "", "", maj_dev, maj_test});

    for (ModelType type :
         {ModelType::kBaseline, ModelType::kExtKnowledge, ModelType::kSelfTalk}) {
      const EvalResult *best = nullptr;
      for (const auto &r : results) {
        if (r.task != task || r.split != "dev" || TypeOf(r) != type) continue;
        if (best == nullptr || r.accuracy > best->accuracy) best = &r;
      }
      if (best == nullptr) continue;
      BestSetupRow row{task, TypeName(type), best->scorer,
                       type == ModelType::kBaseline ? "" : KnowledgeLabel(*best),
                       best->accuracy, std::nullopt};
      for (const auto &r : results) {
        if (r.task == task && r.split == "test" && r.scorer == best->scorer &&
            r.generator == best->generator && r.knowledge == best->knowledge) {
          row.test_acc = r.accuracy;
          break;
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

ImprovementMatrix ComputeImprovementMatrix(const std::vector<EvalResult> &results) {
  ImprovementMatrix m;
  std::map<std::pair<std::string, std::string>, std::vector<double>> diffs;
  std::set<std::pair<int, std::string>> columns;
  for (const auto &r : results) {
    if (r.split != "dev" || TypeOf(r) == ModelType::kBaseline) continue;
    const EvalResult *base = nullptr;
    for (const auto &b : results) {
      if (b.task == r.task && b.split == r.split && b.scorer == r.scorer &&
          TypeOf(b) == ModelType::kBaseline) {
        base = &b;
        break;
      }
    }
    if (base == nullptr) continue;
    const std::string column = KnowledgeLabel(r);
    diffs[{r.task, column}].push_back(RelativeImprovement(r, *base));
    columns.insert({ColumnRank(r.knowledge), column});
    if (std::find(m.tasks.begin(), m.tasks.end(), r.task) == m.tasks.end()) {
      m.tasks.push_back(r.task);
    }
  }
  for (const auto &[rank, name] : columns) {
    if (std::find(m.columns.begin(), m.columns.end(), name) == m.columns.end()) {
      m.columns.push_back(name);
    }
  }
  for (const auto &[key, values] : diffs) {
    double sum = 0.0;
    for (double v : values) sum += v;
    m.cells[key] = sum / static_cast<double>(values.size());
  }
  return m;
}

std::string FormatAccuracy(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

std::string FormatSigned(double v) {
  if (std::abs(v) < 0.005) v = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%+.2f", v);
  std::string s = buf;
  if (s.back() == '0') s.pop_back();
  return s;
}

std::string BestSetupCsv(const std::vector<BestSetupRow> &rows) {
  std::string out = "dataset,model,lm,knowledge_source,dev_acc,test_acc\n";
  for (const auto &r : rows) {
    out += r.dataset + "," + r.model + "," + r.lm + "," + r.knowledge_source + "," +
           Cell(r.dev_acc) + "," + Cell(r.test_acc) + "\n";
  }
  return out;
}

std::string BestSetupText(const std::vector<BestSetupRow> &rows) {
  std::vector<std::vector<std::string>> table = {
      {"Dataset", "Model", "LM", "Knowledge Source", "Dev Acc.", "Test Acc."}};
  std::string last;
  for (const auto &r : rows) {
    table.push_back({r.dataset == last ? "" : r.dataset, r.model, r.lm,
                     r.knowledge_source, Cell(r.dev_acc), Cell(r.test_acc)});
    last = r.dataset;
  }
  return AlignedTable(table);
}

std::string ImprovementCsv(const ImprovementMatrix &m) {
  std::string out = "dataset";
  for (const auto &c : m.columns) out += "," + c;
  out += "\n";
  for (const auto &t : m.tasks) {
    out += t;
    for (const auto &c : m.columns) {
      auto it = m.cells.find({t, c});
      out += "," + (it == m.cells.end() ? std::string("-") : FormatSigned(it->second));
    }
    out += "\n";
  }
  return out;
}

std::string ImprovementText(const ImprovementMatrix &m) {
  std::vector<std::vector<std::string>> table;
  std::vector<std::string> header = {""};
  header.insert(header.end(), m.columns.begin(), m.columns.end());
  table.push_back(header);
  for (const auto &t : m.tasks) {
    std::vector<std::string> row = {t};
    for (const auto &c : m.columns) {
      auto it = m.cells.find({t, c});
      row.push_back(it == m.cells.end() ? "-" : FormatSigned(it->second));
    }
    table.push_back(std::move(row));
  }
  return AlignedTable(table);
}

}  // namespace selftalk
