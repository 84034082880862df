// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef MCSE_MANIFEST_H_
#define MCSE_MANIFEST_H_

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace mcse {

// Manifests are JSON Lines. The first line may be a header object
// ({"type":"header", ...}) carrying the configuration echo that produced the
// artifact; data rows follow, one object per item.

struct Manifest {
  std::optional<nlohmann::json> header;
  std::vector<nlohmann::json> rows;
};

Manifest ReadManifest(const std::string& path);
void WriteManifest(const std::string& path, const Manifest& manifest);

nlohmann::json ReadJsonFile(const std::string& path);
void WriteJsonFile(const std::string& path, const nlohmann::json& doc);

}  // namespace mcse

#endif  // MCSE_MANIFEST_H_
