// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "mcse/manifest.h"

#include <fstream>

#include "mcse/common.h"

namespace mcse {

using json = nlohmann::json;

Manifest ReadManifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("manifest: cannot open " + path);
  Manifest m;
  std::string line;
  long line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    json row;
    try {
      row = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError("manifest: bad JSON at " + path + ":" +
                        std::to_string(line_no) + ": " + e.what());
    }
    if (line_no == 1 && row.is_object() && row.value("type", "") == "header")
      m.header = std::move(row);
    else
      m.rows.push_back(std::move(row));
  }
  return m;
}

void WriteManifest(const std::string& path, const Manifest& manifest) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("manifest: cannot open for writing " + path);
  if (manifest.header) f << manifest.header->dump() << "\n";
  for (const json& row : manifest.rows) f << row.dump() << "\n";
  if (!f) throw IoError("manifest: write failed: " + path);
}

json ReadJsonFile(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("json: cannot open " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw FormatError("json: parse error in " + path + ": " + e.what());
  }
}

void WriteJsonFile(const std::string& path, const json& doc) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("json: cannot open for writing " + path);
  f << doc.dump(2) << "\n";
  if (!f) throw IoError("json: write failed: " + path);
}

}  // namespace mcse
