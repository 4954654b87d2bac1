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

#include "selftalk/remote_backend.h"

#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

#include "httplib.h"
#include "selftalk/errors.h"
#include "selftalk/text.h"

namespace selftalk {

namespace {

// Releases an admission slot on scope exit.
class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<> &sem) : sem_(sem) { sem_.acquire(); }
  ~SlotGuard() { sem_.release(); }
  SlotGuard(const SlotGuard &) = delete;
  SlotGuard &operator=(const SlotGuard &) = delete;

 private:
  std::counting_semaphore<> &sem_;
};

}  // namespace

void RemoteConfig::ApplyEnvironment() {
  if (base_url.empty()) {
    if (const char *env = std::getenv("SELFTALK_ENDPOINT"); env) base_url = env;
  }
  if (api_token.empty()) {
    if (const char *env = std::getenv("SELFTALK_API_TOKEN"); env) api_token = env;
  }
}

double ToLog2(double value, const std::string &base) {
  if (base == "2") return value;
  if (base == "e") return value / std::log(2.0);
  throw BackendError("unsupported logprob base '" + base + "'");
}

RemoteBackend::RemoteBackend(RemoteConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) {
    throw ConfigError("remote backend needs a base URL (SELFTALK_ENDPOINT)");
  }
  if (config_.max_concurrency < 1) {
    throw ConfigError("remote backend max_concurrency must be positive");
  }
  descriptor_.backend_id = "remote:" + config_.model + "@" + config_.base_url;
  descriptor_.kind = BackendKind::kRemote;
  descriptor_.max_concurrency = config_.max_concurrency;
  descriptor_.display_name = config_.model.empty() ? config_.base_url : config_.model;
  slots_ = std::make_unique<std::counting_semaphore<>>(config_.max_concurrency);
}

RemoteBackend::~RemoteBackend() = default;

Json RemoteBackend::Post(const Json &request) const {
  SlotGuard guard(*slots_);
  httplib::Client client(config_.base_url);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  httplib::Headers headers;
  if (!config_.api_token.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_token);
  }
  const std::string body = request.dump();

  std::string last_error;
  auto backoff = config_.initial_backoff;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    auto res = client.Post(config_.path, headers, body, "application/json");
    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
    } else if (res->status == 501) {
      throw CapabilityError("remote backend does not support this request: " +
                            res->body);
    } else if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
    } else if (res->status != 200) {
      throw BackendError("remote backend rejected request: HTTP " +
                         std::to_string(res->status) + " " + res->body);
    } else {
      try {
        return Json::parse(res->body);
      } catch (const Json::exception &e) {
        throw BackendError(std::string("malformed response: ") + e.what());
      }
    }
    if (attempt < config_.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw TransportError("remote backend unreachable after " +
                           std::to_string(config_.max_attempts) +
                           " attempts: " + last_error,
                       config_.max_attempts);
}

std::vector<TokenLogProb> RemoteBackend::ScoreText(std::string_view text) const {
  if (Trim(text).empty()) throw BackendError("cannot score empty text");
  Json request = {{"model", config_.model},  {"prompt", std::string(text)},
                  {"max_tokens", 0},         {"top_p", 1.0},
                  {"n", 1},                  {"echo_logprobs", true}};
  Json response = Post(request);
  std::vector<TokenLogProb> out;
  try {
    std::string base = response.value("logprob_base", std::string("e"));
    const Json &prompt = response.at("prompt");
    const Json &tokens = prompt.at("tokens");
    const Json &logprobs = prompt.at("logprobs");
    if (tokens.size() != logprobs.size()) {
      throw BackendError("prompt tokens and logprobs differ in length");
    }
    for (size_t i = 0; i < tokens.size(); ++i) {
      if (logprobs[i].is_null()) continue;
      out.push_back({tokens[i].get<std::string>(),
                     ToLog2(logprobs[i].get<double>(), base)});
    }
  } catch (const Json::exception &e) {
    throw BackendError(std::string("malformed scoring response: ") + e.what());
  }
  if (out.empty()) throw BackendError("backend scored no tokens");
  return out;
}

std::vector<std::string> RemoteBackend::SampleContinuations(
    std::string_view prompt, const SamplingParams &params) const {
  if (!config_.supports_sampling) {
    throw CapabilityError("remote backend " + descriptor_.backend_id +
                          " has no sampling controls");
  }
  params.Validate();
  if (Trim(prompt).empty()) throw BackendError("cannot continue an empty prompt");
  Json request = {{"model", config_.model},
                  {"prompt", std::string(prompt)},
                  {"max_tokens", params.max_new_tokens},
                  {"top_p", params.top_p},
                  {"n", params.num_samples},
                  {"echo_logprobs", true}};
  if (params.seed) request["seed"] = DeriveSeed(*params.seed, prompt, 0);
  Json response = Post(request);

  std::vector<std::string> out;
  try {
    for (const auto &choice : response.at("choices")) {
      if (static_cast<int>(out.size()) >= params.num_samples) break;
      std::string text = Trim(choice.at("text").get<std::string>());
      for (const auto &stop : params.stop_sequences) {
        size_t pos = stop.empty() ? std::string::npos : text.find(stop);
        if (pos != std::string::npos) {
          text.resize(pos + stop.size());
          break;
        }
      }
      out.push_back(std::move(text));
    }
  } catch (const Json::exception &e) {
    throw BackendError(std::string("malformed sampling response: ") + e.what());
  }
  return out;
}

}  // namespace selftalk
