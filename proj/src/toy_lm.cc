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

#include "selftalk/toy_lm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "selftalk/digest.h"
#include "selftalk/errors.h"
#include "selftalk/text.h"

namespace selftalk {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kSumTolerance = 1e-9;
constexpr double kMassEpsilon = 1e-12;

}  // namespace

ToyLanguageModel ToyLanguageModel::FromJson(const Json &doc) {
  ToyLanguageModel m;
  try {
    m.name_ = doc.value("name", std::string("toy"));
    m.order_ = doc.at("order").get<int>();
    if (m.order_ < 1) throw ConfigError("toy model: order must be >= 1");

    m.vocab_ = doc.at("vocabulary").get<std::vector<std::string>>();
    for (size_t i = 0; i < m.vocab_.size(); ++i) {
      if (!m.ids_.emplace(m.vocab_[i], static_cast<int>(i)).second) {
        throw ConfigError("toy model: duplicate vocabulary token '" +
                          m.vocab_[i] + "'");
      }
    }
    std::string unk = doc.value("unk", std::string("<unk>"));
    auto unk_it = m.ids_.find(unk);
    if (unk_it == m.ids_.end()) {
      throw ConfigError("toy model: unknown token '" + unk +
                        "' missing from vocabulary");
    }
    m.unk_id_ = unk_it->second;
    if (doc.contains("end") && !doc.at("end").is_null()) {
      std::string end = doc.at("end").get<std::string>();
      auto end_it = m.ids_.find(end);
      if (end_it == m.ids_.end()) {
        throw ConfigError("toy model: end token '" + end +
                          "' missing from vocabulary");
      }
      m.end_id_ = end_it->second;
    }

    auto strict_id = [&](const std::string &token) {
      auto it = m.ids_.find(token);
      if (it == m.ids_.end()) {
        throw ConfigError("toy model: token '" + token +
                          "' is not in the vocabulary");
      }
      return it->second;
    };
    auto parse_history = [&](const std::string &key) {
      std::vector<int> h;
      for (const auto &w : SplitWords(key)) h.push_back(strict_id(w));
      if (static_cast<int>(h.size()) > m.order_ - 1) {
        throw ConfigError("toy model: history '" + key +
                          "' is longer than order-1");
      }
      return h;
    };

    for (const auto &[key, entries] : doc.at("tables").items()) {
      Table table;
      for (const auto &[token, lp] : entries.items()) {
        double v = lp.get<double>();
        if (!std::isfinite(v) || v > kMassEpsilon) {
          throw ConfigError("toy model: log-probability of '" + token +
                            "' after '" + key + "' must be finite and <= 0");
        }
        table.logprobs[strict_id(token)] = std::min(v, 0.0);
      }
      if (!m.tables_.emplace(parse_history(key), std::move(table)).second) {
        throw ConfigError("toy model: duplicate history '" + key + "'");
      }
    }
    if (!m.tables_.count({})) {
      throw ConfigError("toy model: missing unigram table \"\"");
    }

    std::map<std::vector<int>, std::optional<double>> stated;
    if (doc.contains("backoff")) {
      for (const auto &[key, w] : doc.at("backoff").items()) {
        std::vector<int> h = parse_history(key);
        if (!m.tables_.count(h)) {
          throw ConfigError("toy model: backoff weight for unlisted history '" +
                            key + "'");
        }
        stated[h] = w.is_null() ? kNegInf : w.get<double>();
      }
    }

    // Shorter histories first: a weight depends on the lower-order model.
    std::vector<std::vector<int>> histories;
    for (const auto &[h, _] : m.tables_) histories.push_back(h);
    std::stable_sort(histories.begin(), histories.end(),
                     [](const auto &a, const auto &b) { return a.size() < b.size(); });
    for (const auto &h : histories) {
      Table &table = m.tables_.at(h);
      if (h.empty()) {
        table.backoff = kNegInf;
        continue;
      }
      if (auto it = stated.find(h); it != stated.end()) {
        table.backoff = *it->second;
        continue;
      }
      double listed = 0.0;
      double lower = 0.0;
      std::span<const int> shorter(h.data() + 1, h.size() - 1);
      for (const auto &[w, lp] : table.logprobs) {
        listed += std::exp2(lp);
        lower += std::exp2(m.LogProb(shorter, w));
      }
      if (1.0 - listed <= kMassEpsilon) {
        table.backoff = kNegInf;
      } else if (1.0 - lower <= kMassEpsilon) {
        throw ConfigError("toy model: history cannot back off, lower-order "
                          "mass is exhausted");
      } else {
        table.backoff = std::log2((1.0 - listed) / (1.0 - lower));
      }
    }
  } catch (const Json::exception &e) {
    throw ConfigError(std::string("toy model: ") + e.what());
  }

  double err = m.MaxNormalizationError();
  if (err > kSumTolerance) {
    throw ConfigError("toy model: a conditional distribution is off by " +
                      std::to_string(err) + " from 1");
  }
  return m;
}

ToyLanguageModel ToyLanguageModel::LoadFile(const std::filesystem::path &path) {
  Json doc;
  try {
    doc = Json::parse(ReadFile(path));
  } catch (const Json::exception &e) {
    throw ConfigError("toy model " + path.string() + ": " + e.what());
  }
  return FromJson(doc);
}

std::optional<std::string> ToyLanguageModel::end_token() const {
  if (end_id_ < 0) return std::nullopt;
  return vocab_[end_id_];
}

int ToyLanguageModel::TokenId(const std::string &token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? unk_id_ : it->second;
}

const ToyLanguageModel::Table *ToyLanguageModel::FindTable(
    std::span<const int> history) const {
  auto it = tables_.find(std::vector<int>(history.begin(), history.end()));
  return it == tables_.end() ? nullptr : &it->second;
}

double ToyLanguageModel::LogProb(std::span<const int> history, int token) const {
  size_t keep = std::min(history.size(), static_cast<size_t>(order_ - 1));
  std::span<const int> h = history.subspan(history.size() - keep);
  double weight = 0.0;
  for (size_t start = 0; start <= h.size(); ++start) {
    const Table *table = FindTable(h.subspan(start));
    if (table == nullptr) continue;
    auto it = table->logprobs.find(token);
    if (it != table->logprobs.end()) return weight + it->second;
    weight += table->backoff;
    if (weight == kNegInf) return kNegInf;
  }
  return kNegInf;
}

std::vector<TokenProb> ToyLanguageModel::NextDistribution(
    std::span<const int> history) const {
  std::vector<TokenProb> dist;
  dist.reserve(vocab_.size());
  for (size_t w = 0; w < vocab_.size(); ++w) {
    dist.push_back({vocab_[w], std::exp2(LogProb(history, static_cast<int>(w)))});
  }
  return dist;
}

double ToyLanguageModel::MaxNormalizationError() const {
  double worst = 0.0;
  for (const auto &[h, _] : tables_) {
    double mass = 0.0;
    for (size_t w = 0; w < vocab_.size(); ++w) {
      mass += std::exp2(LogProb(h, static_cast<int>(w)));
    }
    worst = std::max(worst, std::abs(mass - 1.0));
  }
  return worst;
}

ToyBackend::ToyBackend(std::shared_ptr<const ToyLanguageModel> model,
                       std::string backend_id)
    : model_(std::move(model)) {
  descriptor_.backend_id = std::move(backend_id);
  descriptor_.kind = BackendKind::kToy;
  descriptor_.max_concurrency = 1 << 16;
  descriptor_.display_name = model_->name();
}

std::unique_ptr<ToyBackend> ToyBackend::FromFile(
    const std::filesystem::path &path) {
  std::string bytes = ReadFile(path);
  Json doc;
  try {
    doc = Json::parse(bytes);
  } catch (const Json::exception &e) {
    throw ConfigError("toy model " + path.string() + ": " + e.what());
  }
  auto model = std::make_shared<const ToyLanguageModel>(
      ToyLanguageModel::FromJson(doc));
  return std::make_unique<ToyBackend>(std::move(model),
                                      "toy:" + Sha256Hex(bytes));
}

std::vector<TokenLogProb> ToyBackend::ScoreText(std::string_view text) const {
  std::vector<std::string> tokens = ToyTokenize(text);
  if (tokens.empty()) throw BackendError("cannot score empty text");
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto &t : tokens) ids.push_back(model_->TokenId(t));

  std::vector<TokenLogProb> out;
  out.reserve(tokens.size());
  for (size_t i = 0; i < ids.size(); ++i) {
    std::span<const int> history(ids.data(), i);
    out.push_back({tokens[i], model_->LogProb(history, ids[i])});
  }
  return out;
}

std::vector<std::string> ToyBackend::SampleContinuations(
    std::string_view prompt, const SamplingParams &params) const {
  params.Validate();
  std::vector<int> prompt_ids;
  for (const auto &t : ToyTokenize(prompt)) prompt_ids.push_back(model_->TokenId(t));
  if (prompt_ids.empty()) throw BackendError("cannot continue an empty prompt");

  const uint64_t root = params.seed ? *params.seed : std::random_device{}();
  const std::optional<std::string> end = model_->end_token();

  std::vector<std::string> out;
  out.reserve(params.num_samples);
  for (int s = 0; s < params.num_samples; ++s) {
    std::mt19937_64 engine(DeriveSeed(root, prompt, static_cast<uint64_t>(s)));
    std::vector<int> history = prompt_ids;
    std::vector<std::string> generated;
    std::string text;
    for (int step = 0; step < params.max_new_tokens; ++step) {
      std::vector<TokenProb> nucleus =
          NucleusSet(model_->NextDistribution(history), params.top_p);
      if (nucleus.empty()) break;
      const std::string &token = nucleus[SampleIndex(nucleus, engine)].token;
      if (end && token == *end) break;
      generated.push_back(token);
      history.push_back(model_->TokenId(token));
      text = Detokenize(generated);
      bool stopped = false;
      for (const auto &stop : params.stop_sequences) {
        size_t pos = stop.empty() ? std::string::npos : text.find(stop);
        if (pos != std::string::npos) {
          text.resize(pos + stop.size());
          stopped = true;
          break;
        }
      }
      if (stopped) break;
    }
    out.push_back(std::move(text));
  }
  return out;
}

}  // namespace selftalk
