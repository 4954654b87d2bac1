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

// Aggregation of crowd annotations: per-item majority labels, Fleiss' kappa
// and pairwise rater agreement per category.
//
// Record format, one JSON object per line:
//   {"item_id": ..., "rater_id": ..., "grammaticality": ..., "relevance": ...,
//    "correctness": ..., "helpfulness": ...}
// Categories a rater skipped are omitted or null.

#ifndef SELFTALK_ANNOTATION_H_
#define SELFTALK_ANNOTATION_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "selftalk/types.h"

namespace selftalk {

struct AnnotationRecord {
  std::string item_id;
  std::string rater_id;
  std::map<std::string, std::string> labels;  // category -> label

  bool operator==(const AnnotationRecord &) const = default;
};

// Throws DatasetError on malformed lines or labels outside a category's set.
std::vector<AnnotationRecord> ParseAnnotationRecords(std::string_view jsonl);

struct ItemMajority {
  std::string item_id;
  std::map<std::string, std::string> majority;  // resolved categories only
  std::set<std::string> unresolved;             // tied pluralities
};

struct CategoryAgreement {
  int items = 0;
  double fleiss_kappa = 0.0;
  double pairwise_agreement = 0.0;  // percent of agreeing rater pairs
};

struct AnnotationSummary {
  std::vector<ItemMajority> items;  // sorted by item id
  std::map<std::string, CategoryAgreement> agreement;
};

// Fleiss' kappa from an items x labels count matrix in which every row sums
// to the same number of raters (>= 2). Returns 1.0 when every rating falls
// in one label.
double FleissKappa(const std::vector<std::vector<int>> &counts);

// Percent of rater pairs, pooled over items, that gave the same label.
double PairwiseAgreement(const std::vector<std::vector<int>> &counts);

// Each item must carry exactly raters_per_item ratings in every category it
// was rated in; a category with no ratings for an item is skipped. Throws
// ItemListError naming items with missing or surplus raters.
AnnotationSummary AggregateAnnotations(const std::vector<AnnotationRecord> &records,
                                       int raters_per_item = 3);

}  // namespace selftalk

#endif  // SELFTALK_ANNOTATION_H_
