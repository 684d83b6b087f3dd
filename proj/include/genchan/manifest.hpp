// SPDX-License-Identifier: Apache-2.0
//
// genchan - generative modeling of geometric MIMO wireless channels
// Copyright (C) 2026 genchan contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Run manifests: every CLI output artifact gets a JSON sidecar recording the
// command, its fully resolved configuration, the seed and the wall-clock
// duration, so any artifact can be reproduced from its manifest alone.

#ifndef GENCHAN_MANIFEST_HPP
#define GENCHAN_MANIFEST_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "genchan/common.hpp"

namespace genchan {

struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  double duration_seconds = 0.0;
};

// Sidecar path for an artifact: <artifact>.manifest.json
inline std::filesystem::path manifest_path(const std::filesystem::path &artifact) {
  std::filesystem::path p = artifact;
  p += ".manifest.json";
  return p;
}

// Writes atomically (temp file + rename) next to the artifact.
inline void write_manifest(const RunManifest &manifest, const std::filesystem::path &artifact) {
  nlohmann::json j;
  j["command"] = manifest.command;
  j["config"] = manifest.config;
  j["seed"] = manifest.seed;
  j["inputs"] = manifest.inputs;
  j["outputs"] = manifest.outputs;
  j["tool_version"] = kVersion;
  j["duration_seconds"] = manifest.duration_seconds;

  const std::filesystem::path target = manifest_path(artifact);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream os(tmp);
    if (!os) throw std::runtime_error("write_manifest: cannot open " + tmp.string());
    os << j.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace genchan

#endif
