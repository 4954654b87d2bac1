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

#ifndef SELFTALK_ERRORS_H_
#define SELFTALK_ERRORS_H_

#include <stdexcept>
#include <string>
#include <vector>

namespace selftalk {

// Malformed run configuration, task spec or model file. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dataset, annotation or run-record input that fails validation. Exit code 3.
class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A template slot that cannot be filled from the instance.
class TemplateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A fill-in-the-blank context without its placeholder token.
class PlaceholderError : public TemplateError {
 public:
  using TemplateError::TemplateError;
};

// A generated question that does not match the prefix it was generated from.
class PrefixMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Any failure reported by a language-model backend. Exit code 4.
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The backend cannot serve the requested operation (e.g. no sampling).
class CapabilityError : public BackendError {
 public:
  using BackendError::BackendError;
};

// The remote backend could not be reached after all retries.
class TransportError : public BackendError {
 public:
  TransportError(const std::string &what, int attempts)
      : BackendError(what), attempts_(attempts) {}
  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

// Analysis input that is inconsistent, e.g. a flip without a clarification.
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input error that concerns a list of items (instances, annotation items).
class ItemListError : public DatasetError {
 public:
  ItemListError(const std::string &what, std::vector<std::string> ids)
      : DatasetError(what + ": " + Join(ids)), ids_(std::move(ids)) {}
  const std::vector<std::string> &ids() const { return ids_; }

 private:
  static std::string Join(const std::vector<std::string> &ids) {
    std::string out;
    for (const auto &id : ids) {
      if (!out.empty()) out += ", ";
      out += id;
    }
    return out;
  }
  std::vector<std::string> ids_;
};

}  // namespace selftalk

#endif  // SELFTALK_ERRORS_H_
