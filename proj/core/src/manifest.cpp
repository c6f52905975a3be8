#include "quasim/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace quasim {

std::uint64_t fnv1a64(const void* data, std::size_t len) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t fnv1a64(std::string_view text) {
  return fnv1a64(text.data(), text.size());
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(value));
  return std::string(buf);
}

std::uint64_t file_checksum(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checksum: cannot open " + path);
  std::ostringstream buffer;
  buffer << is.rdbuf();
  const std::string content = buffer.str();
  return fnv1a64(content);
}

void add_file(RunManifest& manifest, const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("manifest: cannot open " + path);
  std::ostringstream buffer;
  buffer << is.rdbuf();
  const std::string content = buffer.str();
  manifest.files.push_back(
      ManifestFile{path, hex64(fnv1a64(content)), content.size()});
}

std::string manifest_json(const RunManifest& manifest) {
  nlohmann::json j;
  j["command"] = manifest.command;
  j["config_digest"] = manifest.config_digest;
  j["seed"] = manifest.seed;
  j["duration_ms"] = manifest.duration_ms;
  j["files"] = nlohmann::json::array();
  for (const auto& f : manifest.files) {
    nlohmann::json jf;
    jf["path"] = f.path;
    jf["checksum"] = f.checksum;
    jf["bytes"] = f.bytes;
    j["files"].push_back(jf);
  }
  return j.dump(2) + "\n";
}

void save_manifest(const RunManifest& manifest, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("manifest: cannot open " + path);
  os << manifest_json(manifest);
  if (!os) throw std::runtime_error("manifest: write failed for " + path);
}

}  // namespace quasim
