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

// Counted n-gram fragments (2 to 5 words) indexed by word, for mining
// fragments in which a context term and a choice term co-occur.
//
// Dump format, one fragment per line:
//   token sequence<TAB>count

#ifndef SELFTALK_NGRAM_TABLE_H_
#define SELFTALK_NGRAM_TABLE_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <unordered_map>
#include <vector>

#include "selftalk/types.h"

namespace selftalk {

struct NgramIngestStats {
  size_t lines = 0;
  size_t entries = 0;
  size_t out_of_range = 0;  // fewer than 2 or more than 5 words
  size_t merged = 0;        // repeated fragments whose counts were summed
};

struct NgramEntry {
  std::string text;  // lowercased, single-spaced
  int64_t count = 0;

  bool operator==(const NgramEntry &) const = default;
  template <class Archive>
  void serialize(Archive &ar) {
    ar(text, count);
  }
};

class NgramTable {
 public:
  NgramTable() = default;

  // Throws DatasetError on a malformed line or a count below 1.
  static NgramTable Ingest(std::istream &in, NgramIngestStats *stats = nullptr);
  static NgramTable IngestFile(const std::filesystem::path &path,
                               NgramIngestStats *stats = nullptr);

  void Save(const std::filesystem::path &path) const;
  static NgramTable Load(const std::filesystem::path &path);

  const std::vector<NgramEntry> &entries() const { return entries_; }
  // Count of a fragment after normalization; 0 when absent.
  int64_t Count(const std::string &fragment) const;
  // Entries containing both words anywhere in the fragment.
  std::vector<const NgramEntry *> Containing(const std::string &a,
                                             const std::string &b) const;

  bool operator==(const NgramTable &other) const { return entries_ == other.entries_; }

 private:
  void Reindex();

  std::vector<NgramEntry> entries_;
  std::unordered_map<std::string, int> by_text_;
  std::unordered_map<std::string, std::vector<int>> by_word_;
};

struct NgramOptions {
  int64_t min_freq = 100;
  int top_k = 3;  // per (context term, choice term) pair
};

// Fragments joining a context term and a choice term, most frequent first
// within each pair, deduplicated across pairs.
std::vector<Clarification> NgramClarifications(const NgramTable &table,
                                               const Instance &inst,
                                               const NgramOptions &opts = {});

}  // namespace selftalk

#endif  // SELFTALK_NGRAM_TABLE_H_
