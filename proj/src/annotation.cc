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

#include "selftalk/annotation.h"

#include <algorithm>
#include <sstream>

#include "selftalk/errors.h"
#include "selftalk/eval.h"
#include "selftalk/text.h"

namespace selftalk {

namespace {

const AnnotationQuestion *FindCategory(const std::string &category) {
  for (const auto &q : AnnotationQuestions()) {
    if (q.category == category) return &q;
  }
  return nullptr;
}

}  // namespace

std::vector<AnnotationRecord> ParseAnnotationRecords(std::string_view jsonl) {
  std::vector<AnnotationRecord> out;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const std::string where = "annotation line " + std::to_string(line_no);
    try {
      Json doc = Json::parse(line);
      AnnotationRecord r;
      r.item_id = doc.at("item_id").get<std::string>();
      r.rater_id = doc.at("rater_id").get<std::string>();
      for (const auto &q : AnnotationQuestions()) {
        if (!doc.contains(q.category) || doc.at(q.category).is_null()) continue;
        std::string label = doc.at(q.category).get<std::string>();
        if (std::find(q.labels.begin(), q.labels.end(), label) == q.labels.end()) {
          throw DatasetError(where + ": label '" + label + "' is not valid for " +
                             q.category);
        }
        r.labels[q.category] = label;
      }
      out.push_back(std::move(r));
    } catch (const Json::exception &e) {
      throw DatasetError(where + ": " + e.what());
    }
  }
  return out;
}

double FleissKappa(const std::vector<std::vector<int>> &counts) {
  if (counts.empty()) throw AnalysisError("kappa needs at least one item");
  const size_t k = counts[0].size();
  int n = 0;
  for (int c : counts[0]) n += c;
  if (n < 2) throw AnalysisError("kappa needs at least two raters per item");
  const double N = static_cast<double>(counts.size());
  std::vector<double> label_totals(k, 0.0);
  double p_bar = 0.0;
  for (const auto &row : counts) {
    if (row.size() != k) throw AnalysisError("ragged kappa count matrix");
    int sum = 0;
    double sq = 0.0;
    for (size_t j = 0; j < k; ++j) {
      sum += row[j];
      sq += static_cast<double>(row[j]) * row[j];
      label_totals[j] += row[j];
    }
    if (sum != n) throw AnalysisError("items have different numbers of raters");
    p_bar += (sq - n) / (static_cast<double>(n) * (n - 1));
  }
  p_bar /= N;
  double p_e = 0.0;
  for (double t : label_totals) {
    double p = t / (N * n);
    p_e += p * p;
  }
  if (p_e == 1.0) return 1.0;
  return (p_bar - p_e) / (1.0 - p_e);
}

double PairwiseAgreement(const std::vector<std::vector<int>> &counts) {
  long agreeing = 0;
  long pairs = 0;
  for (const auto &row : counts) {
    int n = 0;
    for (int c : row) {
      n += c;
      agreeing += static_cast<long>(c) * (c - 1) / 2;
    }
    pairs += static_cast<long>(n) * (n - 1) / 2;
  }
  if (pairs == 0) throw AnalysisError("agreement needs at least two raters");
  return 100.0 * static_cast<double>(agreeing) / static_cast<double>(pairs);
}

AnnotationSummary AggregateAnnotations(const std::vector<AnnotationRecord> &records,
                                       int raters_per_item) {
  if (raters_per_item < 2) throw ConfigError("raters_per_item must be at least 2");
  // item -> category -> label -> count
  std::map<std::string, std::map<std::string, std::map<std::string, int>>> tally;
  for (const auto &r : records) {
    auto &item = tally[r.item_id];
    for (const auto &[category, label] : r.labels) {
      if (!FindCategory(category)) {
        throw DatasetError("unknown annotation category '" + category + "'");
      }
      ++item[category][label];
    }
  }

  std::vector<std::string> bad;
  for (const auto &[item_id, categories] : tally) {
    for (const auto &[category, labels] : categories) {
      int n = 0;
      for (const auto &[_, c] : labels) n += c;
      if (n != raters_per_item) {
        bad.push_back(item_id);
        break;
      }
    }
  }
  if (!bad.empty()) {
    throw ItemListError("items without exactly " + std::to_string(raters_per_item) +
                            " ratings per category",
                        bad);
  }

  AnnotationSummary summary;
  std::map<std::string, std::vector<std::vector<int>>> matrices;
  for (const auto &[item_id, categories] : tally) {
    ItemMajority m;
    m.item_id = item_id;
    for (const auto &[category, labels] : categories) {
      const AnnotationQuestion *q = FindCategory(category);
      std::vector<int> row;
      int best = 0;
      int winners = 0;
      std::string winner;
      for (const auto &label : q->labels) {
        auto it = labels.find(label);
        int c = it == labels.end() ? 0 : it->second;
        row.push_back(c);
        if (c > best) {
          best = c;
          winners = 1;
          winner = label;
        } else if (c == best && c > 0) {
          ++winners;
        }
      }
      matrices[category].push_back(std::move(row));
      if (winners == 1) {
        m.majority[category] = winner;
      } else {
        m.unresolved.insert(category);
      }
    }
    summary.items.push_back(std::move(m));
  }
  for (const auto &[category, matrix] : matrices) {
    summary.agreement[category] = {static_cast<int>(matrix.size()),
                                   FleissKappa(matrix), PairwiseAgreement(matrix)};
  }
  return summary;
}

}  // namespace selftalk
