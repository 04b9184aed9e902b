#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace rngkit {

struct InputDigest {
  std::string path;
  std::string sha256;
  std::uint64_t bytes = 0;
};

// Provenance record written next to a command's outputs: the exact command
// line, the effective configuration, digests of every input consumed, and
// the tool version. Timestamps live here (not in reports) so reports stay
// reproducible.
struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::vector<InputDigest> inputs;
  std::string version;
  std::string timestamp;
};

std::string sha256_hex(std::span<const std::uint8_t> data);
InputDigest digest_file(const std::filesystem::path& path);

std::string now_rfc3339();

nlohmann::json to_json(const RunManifest& manifest);
void write_manifest(const RunManifest& manifest,
                    const std::filesystem::path& path);

}  // namespace rngkit
