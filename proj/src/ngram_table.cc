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

#include "selftalk/ngram_table.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <cereal/archives/binary.hpp>
#include <cereal/types/string.hpp>
#include <cereal/types/vector.hpp>

#include "selftalk/digest.h"
#include "selftalk/errors.h"
#include "selftalk/terms.h"
#include "selftalk/text.h"

namespace selftalk {

namespace {

constexpr char kIndexMagic[] = "selftalk-ngram-table-v1";

}  // namespace

NgramTable NgramTable::Ingest(std::istream &in, NgramIngestStats *stats) {
  NgramIngestStats unused;
  NgramIngestStats &st = stats ? *stats : unused;
  NgramTable t;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    ++st.lines;
    size_t tab = line.rfind('\t');
    if (tab == std::string::npos) {
      throw DatasetError("n-gram dump line " + std::to_string(line_no) +
                         ": expected '<fragment><TAB><count>'");
    }
    std::string text = CollapseWhitespace(ToLower(line.substr(0, tab)));
    std::string count_field = Trim(line.substr(tab + 1));
    int64_t count = 0;
    try {
      size_t used = 0;
      count = std::stoll(count_field, &used);
      if (used != count_field.size()) throw std::invalid_argument(count_field);
    } catch (const std::exception &) {
      throw DatasetError("n-gram dump line " + std::to_string(line_no) +
                         ": bad count '" + count_field + "'");
    }
    if (count < 1) {
      throw DatasetError("n-gram dump line " + std::to_string(line_no) +
                         ": count must be at least 1");
    }
    size_t words = SplitWords(text).size();
    if (words < 2 || words > 5) {
      ++st.out_of_range;
      continue;
    }
    auto [it, inserted] = t.by_text_.emplace(text, static_cast<int>(t.entries_.size()));
    if (inserted) {
      t.entries_.push_back({text, count});
      ++st.entries;
    } else {
      t.entries_[it->second].count += count;
      ++st.merged;
    }
  }
  t.Reindex();
  return t;
}

NgramTable NgramTable::IngestFile(const std::filesystem::path &path,
                                  NgramIngestStats *stats) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open n-gram dump " + path.string());
  return Ingest(in, stats);
}

void NgramTable::Reindex() {
  by_text_.clear();
  by_word_.clear();
  for (size_t i = 0; i < entries_.size(); ++i) {
    by_text_.emplace(entries_[i].text, static_cast<int>(i));
    std::set<std::string> words;
    for (const auto &w : SplitWords(entries_[i].text)) words.insert(w);
    for (const auto &w : words) by_word_[w].push_back(static_cast<int>(i));
  }
}

void NgramTable::Save(const std::filesystem::path &path) const {
  std::ostringstream out(std::ios::binary);
  {
    cereal::BinaryOutputArchive ar(out);
    ar(std::string(kIndexMagic), entries_);
  }
  WriteFileAtomic(path, out.str());
}

NgramTable NgramTable::Load(const std::filesystem::path &path) {
  std::istringstream in(ReadFile(path), std::ios::binary);
  NgramTable t;
  try {
    cereal::BinaryInputArchive ar(in);
    std::string magic;
    ar(magic);
    if (magic != kIndexMagic) throw DatasetError("not an n-gram index");
    ar(t.entries_);
  } catch (const cereal::Exception &e) {
    throw DatasetError("n-gram index " + path.string() + ": " + e.what());
  }
  t.Reindex();
  return t;
}

int64_t NgramTable::Count(const std::string &fragment) const {
  auto it = by_text_.find(CollapseWhitespace(ToLower(fragment)));
  return it == by_text_.end() ? 0 : entries_[it->second].count;
}

std::vector<const NgramEntry *> NgramTable::Containing(const std::string &a,
                                                       const std::string &b) const {
  std::vector<const NgramEntry *> out;
  auto ia = by_word_.find(a);
  auto ib = by_word_.find(b);
  if (ia == by_word_.end() || ib == by_word_.end()) return out;
  // Both lists are sorted by entry index.
  std::vector<int> both;
  std::set_intersection(ia->second.begin(), ia->second.end(), ib->second.begin(),
                        ib->second.end(), std::back_inserter(both));
  for (int i : both) out.push_back(&entries_[i]);
  return out;
}

std::vector<Clarification> NgramClarifications(const NgramTable &table,
                                               const Instance &inst,
                                               const NgramOptions &opts) {
  const TermSets terms = ExtractTerms(inst);
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto &choice : terms.choice_terms) {
    for (const auto &b : choice) {
      for (const auto &a : terms.context_terms) {
        if (a != b) pairs.emplace(a, b);
      }
    }
  }
  std::vector<Clarification> out;
  std::unordered_set<std::string> seen;
  for (const auto &[a, b] : pairs) {
    std::vector<const NgramEntry *> hits;
    for (const NgramEntry *e : table.Containing(a, b)) {
      if (e->count >= opts.min_freq) hits.push_back(e);
    }
    std::sort(hits.begin(), hits.end(), [](const NgramEntry *x, const NgramEntry *y) {
      if (x->count != y->count) return x->count > y->count;
      return x->text < y->text;
    });
    if (static_cast<int>(hits.size()) > opts.top_k) hits.resize(std::max(0, opts.top_k));
    for (const NgramEntry *e : hits) {
      if (!seen.insert(e->text).second) continue;
      Clarification c;
      c.text = e->text;
      c.source = ClarificationSource::kNgrams;
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace selftalk
