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

// A concept graph ingested from a relation dump, with paths between terms
// verbalized into clarification sentences.
//
// Dump format, one edge per line:
//   relation<TAB>head<TAB>tail<TAB>weight
// Relations and nodes may be plain ("IsA", "dog") or URIs ("/r/IsA",
// "/c/en/hot_dog/n"). Nodes are lowercased and underscores become spaces.

#ifndef SELFTALK_CONCEPT_GRAPH_H_
#define SELFTALK_CONCEPT_GRAPH_H_

#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "selftalk/scorer.h"
#include "selftalk/types.h"

namespace selftalk {

using RelationTemplates = std::map<std::string, std::string>;

// Relation -> sentence template with [head] and [tail] slots.
RelationTemplates LoadRelationTemplates(const std::filesystem::path &path);

struct GraphEdge {
  std::string relation;
  std::string head;
  std::string tail;
  double weight = 1.0;

  bool operator==(const GraphEdge &) const = default;
  template <class Archive>
  void serialize(Archive &ar) {
    ar(relation, head, tail, weight);
  }
};

struct GraphIngestStats {
  size_t lines = 0;
  size_t edges = 0;
  size_t self_loops = 0;
  size_t unknown_relations = 0;
  size_t non_english = 0;
  size_t duplicates = 0;
};

// A path as the edges it crosses, in order, and the nodes it visits.
struct GraphPath {
  std::vector<int> edges;
  std::vector<std::string> nodes;
};

class ConceptGraph {
 public:
  ConceptGraph() = default;

  // Throws DatasetError on a malformed line. Self-loops, relations without a
  // template, non-English nodes and repeated edges are skipped and counted.
  static ConceptGraph Ingest(std::istream &in, const RelationTemplates &templates,
                             GraphIngestStats *stats = nullptr);
  static ConceptGraph IngestFile(const std::filesystem::path &path,
                                 const RelationTemplates &templates,
                                 GraphIngestStats *stats = nullptr);
  // Edges are normalized and filtered the same way as ingested lines.
  static ConceptGraph FromEdges(const std::vector<GraphEdge> &edges,
                                const RelationTemplates &templates);

  // Binary index; Load(Save(g)) == g.
  void Save(const std::filesystem::path &path) const;
  static ConceptGraph Load(const std::filesystem::path &path);

  const std::vector<GraphEdge> &edges() const { return edges_; }
  const RelationTemplates &templates() const { return templates_; }
  size_t num_nodes() const { return incident_.size(); }
  bool HasNode(const std::string &node) const { return incident_.count(node) > 0; }

  // Simple paths from `from` to `to` of 1..max_len edges, ignoring edge
  // direction. Enumerated depth-first in edge-index order.
  std::vector<GraphPath> FindPaths(const std::string &from, const std::string &to,
                                   int max_len) const;

  // The edge's sentence. The edge's own head and tail fill the slots
  // whichever way a path crosses it.
  std::string Verbalize(const GraphEdge &edge) const;
  std::string Verbalize(const GraphPath &path) const;

  bool operator==(const ConceptGraph &other) const {
    return edges_ == other.edges_ && templates_ == other.templates_;
  }

 private:
  void AddEdge(GraphEdge edge, GraphIngestStats *stats);
  void Reindex();

  std::vector<GraphEdge> edges_;
  RelationTemplates templates_;
  std::unordered_map<std::string, std::vector<int>> incident_;
  std::map<std::tuple<std::string, std::string, std::string>, int> edge_ids_;
};

// "/c/en/hot_dog/n" -> "hot dog"; plain terms are lowercased. Returns an
// empty string for non-English URIs.
std::string NormalizeConcept(const std::string &raw);
// "/r/IsA" -> "IsA".
std::string NormalizeRelation(const std::string &raw);

std::string RelationshipQuestion(const std::string &a, const std::string &b);

// One clarification per path between a context term and a choice term.
std::vector<Clarification> GraphClarifications(
    const ConceptGraph &graph, const Instance &inst, int max_path_len = 2,
    Execution exec = Execution::kParallel);

}  // namespace selftalk

#endif  // SELFTALK_CONCEPT_GRAPH_H_
