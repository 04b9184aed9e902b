#include "rngkit/manifest.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace rngkit {

namespace {

struct DigestContext {
  EVP_MD_CTX* ctx;
  DigestContext() : ctx(EVP_MD_CTX_new()) {
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
      throw std::runtime_error("sha256: init failed");
    }
  }
  ~DigestContext() { EVP_MD_CTX_free(ctx); }

  void update(const void* data, std::size_t len) {
    if (EVP_DigestUpdate(ctx, data, len) != 1) {
      throw std::runtime_error("sha256: update failed");
    }
  }

  std::string finish() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx, md, &len) != 1) {
      throw std::runtime_error("sha256: final failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(hex[md[i] >> 4]);
      out.push_back(hex[md[i] & 0xF]);
    }
    return out;
  }
};

}  // namespace

std::string sha256_hex(std::span<const std::uint8_t> data) {
  DigestContext d;
  d.update(data.data(), data.size());
  return d.finish();
}

InputDigest digest_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open file for digest: " + path.string());
  }
  DigestContext d;
  std::vector<char> buf(1 << 20);
  std::uint64_t total = 0;
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got == 0) break;
    d.update(buf.data(), got);
    total += got;
  }
  return {path.string(), d.finish(), total};
}

std::string now_rfc3339() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec);
  return buf;
}

nlohmann::json to_json(const RunManifest& manifest) {
  nlohmann::json inputs = nlohmann::json::array();
  for (const InputDigest& input : manifest.inputs) {
    inputs.push_back({{"path", input.path},
                      {"sha256", input.sha256},
                      {"bytes", input.bytes}});
  }
  return {
      {"command", manifest.command},
      {"config", manifest.config},
      {"inputs", std::move(inputs)},
      {"version", manifest.version},
      {"timestamp", manifest.timestamp},
  };
}

void write_manifest(const RunManifest& manifest,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open manifest output: " + path.string());
  }
  out << to_json(manifest).dump(2) << '\n';
  if (!out) {
    throw std::runtime_error("manifest write failed: " + path.string());
  }
}

}  // namespace rngkit
