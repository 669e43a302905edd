#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <string>

#include "json.hpp"

namespace aspect {

/// Provenance record written next to the outputs of every CLI run.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::map<std::string, std::string> input_hashes;  // path -> sha256 hex
  std::string tool_version;
  std::chrono::system_clock::time_point started;
  std::chrono::system_clock::time_point finished;

  void add_input(const std::filesystem::path& path);
};

std::string sha256_hex(const std::filesystem::path& path);

/// ISO-8601 UTC with millisecond precision, e.g. "2024-05-01T12:00:00.123Z".
std::string utc_timestamp(std::chrono::system_clock::time_point tp);

nlohmann::ordered_json to_json(const RunManifest& manifest);

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);

std::string_view tool_version();

}  // namespace aspect
