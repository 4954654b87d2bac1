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

#include "selftalk/generative_kb.h"

#include <unordered_set>

#include "selftalk/combine.h"
#include "selftalk/digest.h"
#include "selftalk/errors.h"
#include "selftalk/terms.h"
#include "selftalk/text.h"

namespace selftalk {

void RouteTable::Validate() const {
  auto check = [&](const std::string &rel) {
    if (!relation_prompts.count(rel)) {
      throw ConfigError("route table: relation '" + rel + "' has no prompt");
    }
  };
  for (const auto &route : routes) {
    if (route.relations.empty()) {
      throw ConfigError("route table: a route lists no relations");
    }
    if (!route.question_kind && !route.question_prefix) {
      throw ConfigError("route table: a route has no trigger");
    }
    for (const auto &rel : route.relations) {
      if (!route.prompts.count(rel)) check(rel);
    }
  }
  for (const auto &rel : default_relations) check(rel);
}

RouteTable ParseRouteTable(const Json &doc) {
  RouteTable t;
  try {
    t.person_placeholder = doc.value("person_placeholder", t.person_placeholder);
    t.pattern_wildcard = doc.value("pattern_wildcard", t.pattern_wildcard);
    t.relation_prompts = doc.at("relations").get<std::map<std::string, std::string>>();
    for (const auto &r : doc.value("routes", Json::array())) {
      RelationRoute route;
      const Json &trigger = r.at("trigger");
      if (trigger.contains("question_kind")) {
        route.question_kind = trigger.at("question_kind").get<std::string>();
      }
      if (trigger.contains("question_prefix")) {
        route.question_prefix = trigger.at("question_prefix").get<std::string>();
      }
      route.relations = r.at("relations").get<std::vector<std::string>>();
      route.prompts = r.value("prompts", std::map<std::string, std::string>{});
      route.subject_substitution = r.value("subject_substitution", true);
      t.routes.push_back(std::move(route));
    }
    t.default_relations =
        doc.value("default_relations", std::vector<std::string>{});
  } catch (const Json::exception &e) {
    throw ConfigError(std::string("route table: ") + e.what());
  }
  t.Validate();
  return t;
}

RouteTable LoadRouteTable(const std::filesystem::path &path) {
  try {
    return ParseRouteTable(Json::parse(ReadFile(path)));
  } catch (const Json::parse_error &e) {
    throw ConfigError("route table " + path.string() + ": " + e.what());
  }
}

std::vector<RoutedRelation> RouteInstance(const RouteTable &routes,
                                          const Instance &inst) {
  const RelationRoute *match = nullptr;
  for (const auto &route : routes.routes) {
    if (route.question_kind) {
      if (inst.question_kind && *inst.question_kind == *route.question_kind) {
        match = &route;
        break;
      }
      continue;
    }
    if (inst.question &&
        MatchPrefixPattern(*route.question_prefix, *inst.question,
                           routes.pattern_wildcard)) {
      match = &route;
      break;
    }
  }

  RelationRoute fallback;
  if (match == nullptr) {
    if (routes.default_relations.empty()) {
      throw ConfigError("instance " + inst.id +
                        " matches no relation route and there is no default");
    }
    fallback.relations = routes.default_relations;
    match = &fallback;
  }

  std::optional<std::string> subject;
  if (match->subject_substitution) subject = ExtractSubject(inst.context.value_or(""));

  std::vector<RoutedRelation> out;
  for (const auto &rel : match->relations) {
    auto it = match->prompts.find(rel);
    std::string prompt =
        it != match->prompts.end() ? it->second : routes.relation_prompts.at(rel);
    if (subject) prompt = ReplaceWord(prompt, routes.person_placeholder, *subject);
    out.push_back({rel, prompt});
  }
  return out;
}

std::vector<Clarification> GenerativeKbClarifications(
    const LMBackend &generator, const RouteTable &routes, const Instance &inst,
    const GenerativeKbConfig &cfg, uint64_t seed) {
  const std::string event =
      inst.context && !Trim(*inst.context).empty() ? *inst.context
                                                   : GenerationContext(inst);
  SamplingParams params;
  params.top_p = cfg.top_p;
  params.max_new_tokens = cfg.max_new_tokens;
  params.num_samples = cfg.samples_per_relation;
  params.seed = seed;
  params.stop_sequences = {".", "!", "?"};

  std::vector<Clarification> out;
  std::unordered_set<std::string> seen;
  for (const auto &routed : RouteInstance(routes, inst)) {
    for (const auto &raw : generator.SampleContinuations(
             JoinText(event, routed.prompt), params)) {
      std::string cont = Trim(raw);
      size_t end = cont.find_first_of(".!?");
      if (end != std::string::npos) cont.resize(end + 1);
      if (cont.empty() || cont == ".") continue;
      std::string text = JoinText(routed.prompt, cont);
      if (!seen.insert(NormalizeForDedup(text)).second) continue;
      Clarification c;
      c.text = text;
      c.source = ClarificationSource::kGenerativeKb;
      c.question_prefix = routed.relation;
      c.answer_prefix = routed.prompt;
      c.raw_generation = text.substr(routed.prompt.size());
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace selftalk
