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
#ifndef SELFTALK_DIGEST_H_
#define SELFTALK_DIGEST_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace selftalk {

// Lowercase hex SHA-256 of a byte string.
std::string Sha256Hex(std::string_view bytes);

// SHA-256 of a whole file. Throws ConfigError when the file cannot be read.
std::string Sha256File(const std::filesystem::path &path);

std::string ReadFile(const std::filesystem::path &path);

// Writes through a temporary sibling and renames it into place, so readers
// never observe a partially written file.
void WriteFileAtomic(const std::filesystem::path &path, std::string_view bytes);

}  // namespace selftalk

#endif  // SELFTALK_DIGEST_H_
