#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace anchorfit::cli {

inline constexpr const char* kToolVersion = "anchorfit 1.0.0";

/// Provenance record written beside every output as <output>.manifest.json.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> parameters;
  std::map<std::string, std::string> input_digests;  // path -> sha256 hex
  std::string tool_version = kToolVersion;
  std::string timestamp;  // ISO-8601 UTC; SOURCE_DATE_EPOCH when set
};

std::string sha256_file(const std::filesystem::path& path);
std::string iso8601_now();

RunManifest make_manifest(std::string command, std::map<std::string, std::string> parameters,
                          const std::vector<std::filesystem::path>& inputs);

/// Writes the manifest next to `output`.
void write_manifest(const RunManifest& manifest, const std::filesystem::path& output);

}  // namespace anchorfit::cli
