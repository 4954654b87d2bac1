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
#include "selftalk/dataset.h"

#include <set>
#include <sstream>

#include "selftalk/digest.h"
#include "selftalk/errors.h"
#include "selftalk/text.h"

namespace selftalk {

namespace {

std::optional<std::string> Clean(const std::optional<std::string> &s) {
  if (!s) return s;
  std::string c = CollapseWhitespace(*s);
  if (c.empty()) return std::nullopt;
  return c;
}

}  // namespace

Instance NormalizeMultiAnswer(Instance inst, const std::vector<bool> &labels) {
  if (labels.size() != inst.choices.size()) {
    throw DatasetError("instance " + inst.id +
                       ": labels and choices differ in length");
  }
  std::vector<std::string> kept;
  std::optional<int> gold;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) {
      if (gold) continue;
      gold = static_cast<int>(kept.size());
    }
    kept.push_back(inst.choices[i]);
  }
  if (!gold) throw DatasetError("instance " + inst.id + ": no correct answer");
  inst.choices = std::move(kept);
  inst.gold = gold;
  return inst;
}

std::vector<Instance> ParseInstances(std::string_view jsonl) {
  std::vector<Instance> out;
  std::set<std::string> seen;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    Instance inst;
    try {
      Json j = Json::parse(line);
      inst = j.get<Instance>();
      inst.context = Clean(inst.context);
      inst.question = Clean(inst.question);
      for (auto &c : inst.choices) c = CollapseWhitespace(c);
      if (auto it = j.find("labels"); it != j.end()) {
        std::vector<bool> labels;
        for (const auto &v : *it) {
          labels.push_back(v.is_boolean() ? v.get<bool>() : v.get<int>() != 0);
        }
        inst = NormalizeMultiAnswer(std::move(inst), labels);
      }
      inst.Validate();
    } catch (const Json::exception &e) {
      throw DatasetError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const DatasetError &e) {
      throw DatasetError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!seen.insert(inst.id).second) {
      throw DatasetError("line " + std::to_string(line_no) +
                         ": duplicate instance id " + inst.id);
    }
    out.push_back(std::move(inst));
  }
  if (out.empty()) throw DatasetError("dataset has no instances");
  return out;
}

std::vector<Instance> LoadInstances(const std::filesystem::path &path) {
  std::string bytes;
  try {
    bytes = ReadFile(path);
  } catch (const ConfigError &e) {
    throw DatasetError(e.what());
  }
  return ParseInstances(bytes);
}

}  // namespace selftalk
