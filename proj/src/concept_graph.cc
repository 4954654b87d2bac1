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

#include "selftalk/concept_graph.h"

#include <algorithm>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <cereal/archives/binary.hpp>
#include <cereal/types/map.hpp>
#include <cereal/types/string.hpp>
#include <cereal/types/vector.hpp>
#include <omp.h>

#include "selftalk/digest.h"
#include "selftalk/errors.h"
#include "selftalk/terms.h"
#include "selftalk/text.h"

namespace selftalk {

namespace {

constexpr char kIndexMagic[] = "selftalk-concept-graph-v1";

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, '\t')) fields.push_back(field);
  if (!line.empty() && line.back() == '\t') fields.emplace_back();
  return fields;
}

}  // namespace

RelationTemplates LoadRelationTemplates(const std::filesystem::path &path) {
  try {
    RelationTemplates t = Json::parse(ReadFile(path)).get<RelationTemplates>();
    for (const auto &[rel, tmpl] : t) {
      if (tmpl.find("[head]") == std::string::npos ||
          tmpl.find("[tail]") == std::string::npos) {
        throw ConfigError("relation template for " + rel +
                          " needs [head] and [tail] slots");
      }
    }
    return t;
  } catch (const Json::exception &e) {
    throw ConfigError("relation templates " + path.string() + ": " + e.what());
  }
}

std::string NormalizeConcept(const std::string &raw) {
  std::string s = Trim(raw);
  if (StartsWith(s, "/c/")) {
    if (!StartsWith(s, "/c/en/")) return "";
    s = s.substr(6);
    s = s.substr(0, s.find('/'));
  }
  std::replace(s.begin(), s.end(), '_', ' ');
  return CollapseWhitespace(ToLower(s));
}

std::string NormalizeRelation(const std::string &raw) {
  std::string s = Trim(raw);
  if (StartsWith(s, "/r/")) s = s.substr(3);
  return s;
}

std::string RelationshipQuestion(const std::string &a, const std::string &b) {
  return "What is the relationship between '" + a + "' and '" + b + "'?";
}

void ConceptGraph::AddEdge(GraphEdge edge, GraphIngestStats *stats) {
  GraphIngestStats unused;
  GraphIngestStats &st = stats ? *stats : unused;
  edge.relation = NormalizeRelation(edge.relation);
  std::string head = NormalizeConcept(edge.head);
  std::string tail = NormalizeConcept(edge.tail);
  if (head.empty() || tail.empty()) {
    ++st.non_english;
    return;
  }
  if (head == tail) {
    ++st.self_loops;
    return;
  }
  if (!templates_.count(edge.relation)) {
    ++st.unknown_relations;
    return;
  }
  edge.head = head;
  edge.tail = tail;
  auto key = std::make_tuple(edge.relation, edge.head, edge.tail);
  if (edge_ids_.count(key)) {
    ++st.duplicates;
    return;
  }
  const int id = static_cast<int>(edges_.size());
  edge_ids_.emplace(key, id);
  incident_[edge.head].push_back(id);
  incident_[edge.tail].push_back(id);
  edges_.push_back(std::move(edge));
  ++st.edges;
}

void ConceptGraph::Reindex() {
  incident_.clear();
  edge_ids_.clear();
  for (size_t i = 0; i < edges_.size(); ++i) {
    const GraphEdge &e = edges_[i];
    edge_ids_.emplace(std::make_tuple(e.relation, e.head, e.tail), static_cast<int>(i));
    incident_[e.head].push_back(static_cast<int>(i));
    incident_[e.tail].push_back(static_cast<int>(i));
  }
}

ConceptGraph ConceptGraph::Ingest(std::istream &in,
                                  const RelationTemplates &templates,
                                  GraphIngestStats *stats) {
  ConceptGraph g;
  g.templates_ = templates;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty() || line[0] == '#') continue;
    if (stats) ++stats->lines;
    std::vector<std::string> f = SplitTabs(line);
    if (f.size() != 4) {
      throw DatasetError("concept dump line " + std::to_string(line_no) +
                         ": expected 4 tab-separated fields");
    }
    GraphEdge edge{f[0], f[1], f[2], 0.0};
    try {
      const std::string w = Trim(f[3]);
      size_t used = 0;
      edge.weight = std::stod(w, &used);
      if (used != w.size()) throw std::invalid_argument(w);
    } catch (const std::exception &) {
      throw DatasetError("concept dump line " + std::to_string(line_no) +
                         ": bad weight '" + f[3] + "'");
    }
    g.AddEdge(std::move(edge), stats);
  }
  return g;
}

ConceptGraph ConceptGraph::IngestFile(const std::filesystem::path &path,
                                      const RelationTemplates &templates,
                                      GraphIngestStats *stats) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open concept dump " + path.string());
  return Ingest(in, templates, stats);
}

ConceptGraph ConceptGraph::FromEdges(const std::vector<GraphEdge> &edges,
                                     const RelationTemplates &templates) {
  ConceptGraph g;
  g.templates_ = templates;
  for (const auto &e : edges) g.AddEdge(e, nullptr);
  return g;
}

void ConceptGraph::Save(const std::filesystem::path &path) const {
  std::ostringstream out(std::ios::binary);
  {
    cereal::BinaryOutputArchive ar(out);
    ar(std::string(kIndexMagic), templates_, edges_);
  }
  WriteFileAtomic(path, out.str());
}

ConceptGraph ConceptGraph::Load(const std::filesystem::path &path) {
  std::istringstream in(ReadFile(path), std::ios::binary);
  ConceptGraph g;
  try {
    cereal::BinaryInputArchive ar(in);
    std::string magic;
    ar(magic);
    if (magic != kIndexMagic) throw DatasetError("not a concept graph index");
    ar(g.templates_, g.edges_);
  } catch (const cereal::Exception &e) {
    throw DatasetError("concept graph index " + path.string() + ": " + e.what());
  }
  g.Reindex();
  return g;
}

std::vector<GraphPath> ConceptGraph::FindPaths(const std::string &from,
                                               const std::string &to,
                                               int max_len) const {
  std::vector<GraphPath> out;
  if (from == to || !HasNode(from) || !HasNode(to) || max_len < 1) return out;
  GraphPath current;
  current.nodes.push_back(from);
  // Depth-first; a node may appear once per path.
  auto dfs = [&](auto &&self, const std::string &node) -> void {
    for (int id : incident_.at(node)) {
      const GraphEdge &e = edges_[id];
      const std::string &next = e.head == node ? e.tail : e.head;
      if (std::find(current.nodes.begin(), current.nodes.end(), next) !=
          current.nodes.end()) {
        continue;
      }
      current.edges.push_back(id);
      current.nodes.push_back(next);
      if (next == to) {
        out.push_back(current);
      } else if (static_cast<int>(current.edges.size()) < max_len) {
        self(self, next);
      }
      current.edges.pop_back();
      current.nodes.pop_back();
    }
  };
  dfs(dfs, from);
  return out;
}

std::string ConceptGraph::Verbalize(const GraphEdge &edge) const {
  std::string s = templates_.at(edge.relation);
  s = ReplaceAll(s, "[head]", edge.head);
  s = ReplaceAll(s, "[tail]", edge.tail);
  return Capitalize(s);
}

std::string ConceptGraph::Verbalize(const GraphPath &path) const {
  std::string out;
  for (int id : path.edges) out = JoinText(out, Verbalize(edges_[id]));
  return out;
}

std::vector<Clarification> GraphClarifications(const ConceptGraph &graph,
                                               const Instance &inst,
                                               int max_path_len, Execution exec) {
  const TermSets terms = ExtractTerms(inst);
  std::set<std::pair<std::string, std::string>> pair_set;
  for (const auto &choice : terms.choice_terms) {
    for (const auto &b : choice) {
      for (const auto &a : terms.context_terms) {
        if (a != b) pair_set.emplace(a, b);
      }
    }
  }
  const std::vector<std::pair<std::string, std::string>> pairs(pair_set.begin(),
                                                               pair_set.end());
  const long n = static_cast<long>(pairs.size());
  std::vector<std::vector<Clarification>> per_pair(pairs.size());
  auto work = [&](long i) {
    const auto &[a, b] = pairs[i];
    for (const auto &path : graph.FindPaths(a, b, max_path_len)) {
      Clarification c;
      c.text = graph.Verbalize(path);
      c.source = ClarificationSource::kConceptNet;
      c.question_text = RelationshipQuestion(a, b);
      per_pair[i].push_back(std::move(c));
    }
  };
  if (exec == Execution::kSerial || omp_in_parallel() || n < 2) {
    for (long i = 0; i < n; ++i) work(i);
  } else {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) work(i);
  }
  std::vector<Clarification> out;
  for (auto &v : per_pair) {
    for (auto &c : v) out.push_back(std::move(c));
  }
  return out;
}

}  // namespace selftalk
