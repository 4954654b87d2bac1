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

// Relation-routed prompting of a generative commonsense model. A route maps an
// instance (by question kind or by the shape of its question) to relation
// dimensions; each relation has a prompt about a generic person that is
// filled with the instance's subject and continued by the backend.

#ifndef SELFTALK_GENERATIVE_KB_H_
#define SELFTALK_GENERATIVE_KB_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "selftalk/lm_backend.h"
#include "selftalk/types.h"

namespace selftalk {

struct RelationRoute {
  std::optional<std::string> question_kind;    // exact match
  std::optional<std::string> question_prefix;  // pattern, wildcard allowed
  std::vector<std::string> relations;
  std::map<std::string, std::string> prompts;  // per-route overrides
  bool subject_substitution = true;
};

struct RouteTable {
  std::string person_placeholder = "PersonX";
  std::string pattern_wildcard = "X";
  std::map<std::string, std::string> relation_prompts;
  std::vector<RelationRoute> routes;  // first match wins
  std::vector<std::string> default_relations;

  // Throws ConfigError.
  void Validate() const;
};

RouteTable LoadRouteTable(const std::filesystem::path &path);
RouteTable ParseRouteTable(const Json &doc);

struct RoutedRelation {
  std::string relation;
  std::string prompt;  // subject already substituted

  bool operator==(const RoutedRelation &) const = default;
};

// The relations and filled prompts for an instance. Throws ConfigError when
// no route matches and the table has no default relations.
std::vector<RoutedRelation> RouteInstance(const RouteTable &routes,
                                          const Instance &inst);

struct GenerativeKbConfig {
  double top_p = 0.5;
  int max_new_tokens = 10;
  int samples_per_relation = 5;
};

std::vector<Clarification> GenerativeKbClarifications(
    const LMBackend &generator, const RouteTable &routes, const Instance &inst,
    const GenerativeKbConfig &cfg, uint64_t seed);

}  // namespace selftalk

#endif  // SELFTALK_GENERATIVE_KB_H_
