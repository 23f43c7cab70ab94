// tools/manifest.h
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
//
// Copyright 2026 The Cascade Authors.
//
// Run manifests written beside CLI outputs.

#ifndef CASCADE_TOOLS_MANIFEST_H_
#define CASCADE_TOOLS_MANIFEST_H_

#include <string>
#include <vector>

#include "json.hpp"

namespace cascade::tools {

inline constexpr const char *kVersion = "0.1.0";

// Hex SHA-256 of a file's bytes. Throws DataError when unreadable.
std::string Sha256File(const std::string &path);

struct Manifest {
  std::string subcommand;
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::string> inputs;
  double seconds = 0.0;

  nlohmann::json ToJson() const;
};

void WriteManifest(const Manifest &manifest, const std::string &path);

}  // namespace cascade::tools

#endif  // CASCADE_TOOLS_MANIFEST_H_
